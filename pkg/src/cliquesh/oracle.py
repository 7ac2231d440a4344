"""Slow, obviously-correct reference implementations.

Everything here works on plain Python sets of variable sets and follows
the defining equations one for one: no bitmasks, no indexing, no reuse of
the production code paths.  Tests freeze expected values computed through
these functions, and the verify mode re-runs whole analyses on top of
them to cross-check the fast implementations.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .cliques import CliquePair
from .sharing import SharingSet
from .terms import ContractError, Struct, Term, Var, var_set, vars_of

Group = frozenset[Var]
Groups = frozenset[Group]

MAX_EXPAND_CLIQUE = 20


# ---- conversions ----


def groups_of(s: SharingSet) -> Groups:
    return s.groups_as_varsets()


def sharing_from(domain: Iterable[Var], groups: Iterable[Group]) -> SharingSet:
    return SharingSet.of(domain, groups)


# ---- the defining operations, naively ----


def ref_bin(a: Groups, b: Groups) -> Groups:
    return frozenset(x | y for x in a for y in b)


def ref_star(a: Groups) -> Groups:
    """Unions of every nonempty subset, reached as a pairwise fixpoint."""
    result = set(a)
    while True:
        fresh = {x | y for x in result for y in result} - result
        if not fresh:
            return frozenset(result)
        result |= fresh


def ref_rel(t: Term, a: Groups) -> Groups:
    tvars = var_set(t)
    return frozenset(s for s in a if s & tvars)


def ref_irrel(t: Term, a: Groups) -> Groups:
    tvars = var_set(t)
    return frozenset(s for s in a if not (s & tvars))


def ref_amgu(x: Var, t: Term, a: Groups) -> Groups:
    xt = Struct("$pair", (x, t))
    return ref_irrel(xt, a) | ref_bin(ref_star(ref_rel(x, a)), ref_star(ref_rel(t, a)))


def ref_project(g: Term, a: Groups) -> Groups:
    gvars = var_set(g)
    return frozenset(s & gvars for s in a if s & gvars)


def ref_extend(call: Groups, g: Term, prime: Groups) -> Groups:
    gvars = var_set(g)
    closed = ref_star(ref_rel(g, call))
    return ref_irrel(g, call) | frozenset(s for s in closed if s & gvars in prime)


def ref_count_covered(candidate: Group, cliques: Iterable[Group]) -> int:
    """How many nonempty subsets of candidate lie inside some clique,
    counted by enumerating every subset."""
    members = sorted(candidate, key=lambda v: v.id)
    if len(members) > MAX_EXPAND_CLIQUE:
        raise ContractError("candidate too large for exhaustive counting")
    cls = list(cliques)
    count = 0
    for size in range(1, len(members) + 1):
        for sub in combinations(members, size):
            s = frozenset(sub)
            if any(s <= c for c in cls):
                count += 1
    return count


# ---- clique expansion ----


def expand(pair: CliquePair) -> SharingSet:
    """The set-sharing description a clique pair stands for: its groups
    plus every nonempty subset of every clique."""
    groups: set[Group] = set(groups_of(pair.sh))
    for c in pair.cl.groups:
        members = sorted(pair.cl.group_vars(c), key=lambda v: v.id)
        if len(members) > MAX_EXPAND_CLIQUE:
            raise ContractError(
                f"clique of {len(members)} variables is too large to expand"
            )
        for size in range(1, len(members) + 1):
            for sub in combinations(members, size):
                groups.add(frozenset(sub))
    return SharingSet.of(pair.domain, groups)


# ---- a SharingSet whose transfer functions run through the oracle ----


class OracleSharingSet(SharingSet):
    """Drop-in sharing carrier computing every transfer step naively."""

    @classmethod
    def _wrap(cls, domain: Iterable[Var], groups: Iterable[Group]) -> "OracleSharingSet":
        plain = SharingSet.of(domain, groups)
        return cls(plain.domain, plain.groups)

    @classmethod
    def lift(cls, s: SharingSet) -> "OracleSharingSet":
        return cls(s.domain, s.groups)

    def amgu(self, x: Var, t: Term) -> "OracleSharingSet":
        self.mask_of([x])
        self.term_mask(t)
        return self._wrap(self.domain, ref_amgu(x, t, groups_of(self)))

    def project(self, g: Term) -> "OracleSharingSet":
        return self._wrap(var_set(g), ref_project(g, groups_of(self)))

    def augment(self, g: Term) -> "OracleSharingSet":
        fresh = vars_of(g)
        if set(fresh) & set(self.domain):
            raise ContractError("augment requires fresh variables")
        singletons = {frozenset({v}) for v in fresh}
        return self._wrap(
            tuple(self.domain) + fresh, set(groups_of(self)) | singletons
        )

    def extend(self, g: Term, prime: SharingSet) -> "OracleSharingSet":
        if set(prime.domain) != var_set(g):
            raise ContractError("prime must be expressed over the goal's variables")
        return self._wrap(
            self.domain, ref_extend(groups_of(self), g, groups_of(prime))
        )

    def lub(self, other: SharingSet) -> "OracleSharingSet":
        if self.domain != other.domain:
            raise ContractError("lub requires equal domains")
        return self._wrap(self.domain, groups_of(self) | groups_of(other))
