"""Uniform interface over the four abstract domains.

The fixpoint engine is generic: it manipulates abstract substitutions
only through an AbstractDomain adapter, so the same five-equation wiring
runs unchanged over plain sharing, sharing with freeness, clique-sharing,
and clique-sharing with freeness.  Bottom (the description of an
unreachable point) is shared across domains and handled by the engine
before any adapter call; adapters never see it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .cliques import CliquePair
from .freeness import CliqueSharingFreeness, SharingFreeness
from .normalize import NormalizePolicy
from .sharing import MAX_TOP_VARS, SharingSet
from .terms import ContractError, Struct, Term, Var, solve, vars_of


@dataclass(frozen=True)
class Bottom:
    """The description of an unreachable program point."""

    def render(self) -> str:
        return "bottom"

    def __str__(self) -> str:
        return "bottom"


BOTTOM = Bottom()


def is_bottom(state: object) -> bool:
    return isinstance(state, Bottom)


# A variable-free term; unifying a variable against it makes it ground.
_GROUND_TOKEN = Struct("$ground")


def _nonempty_submasks(mask: int) -> frozenset[int]:
    out = []
    sub = mask
    while sub:
        out.append(sub)
        sub = (sub - 1) & mask
    return frozenset(out)


def rename_sharing(s: SharingSet, mapping: dict[Var, Var]) -> SharingSet:
    """Carry a sharing set to renamed variables, same groups, same class."""
    target = type(s).empty(mapping[v] for v in s.domain)
    groups = frozenset(
        target.mask_of(mapping[v] for v in s.group_vars(m)) for m in s.groups
    )
    return replace(target, groups=groups)


class AbstractDomain:
    """Operations the engine needs, dispatched to the carrier types.

    States are immutable carrier values (SharingSet, CliquePair, or their
    freeness-carrying wrappers); every method returns a fresh state.
    """

    name = "abstract"
    has_freeness = False
    has_cliques = False

    # ---- construction ----

    def top(
        self,
        vs: Iterable[Var],
        ground: Iterable[Var] = (),
        free: Iterable[Var] = (),
    ) -> object:
        raise NotImplementedError

    # ---- lattice ----

    def lub(self, a: object, b: object) -> object:
        return a.lub(b)

    def leq(self, a: object, b: object) -> bool:
        return a.leq(b)

    # ---- transfer functions ----

    def project(self, state: object, g: Term) -> object:
        return state.project(g)

    def augment(self, state: object, g: Term) -> object:
        return state.augment(g)

    def amgu(self, state: object, x: Var, t: Term) -> object:
        return state.amgu(x, t)

    def extend(self, call: object, g: Term, prime: object, clsh_limit: int = 24) -> object:
        return call.extend(g, prime)

    def unify(self, state: object, t1: Term, t2: Term) -> object:
        """Conclude t1 = t2 on a state that does not yet know t1.

        The variables of t1 must be fresh for the state; the result is
        expressed on exactly those variables.  Unification failure is
        Bottom.
        """
        eqs = solve(t1, t2)
        if eqs is None:
            return BOTTOM
        out = self.augment(state, t1)
        for v, t in eqs:
            out = self.amgu(out, v, t)
        return self.project(out, t1)

    def eq_transfer(self, state: object, lhs: Term, rhs: Term) -> object:
        """The =/2 builtin: solve and fold the bindings into the state."""
        eqs = solve(lhs, rhs)
        if eqs is None:
            return BOTTOM
        out = state
        for v, t in eqs:
            out = self.amgu(out, v, t)
        return out

    def ground_transfer(self, state: object, t: Term) -> object:
        """Make every variable of t ground (arithmetic and comparisons)."""
        out = state
        for v in vars_of(t):
            out = self.amgu(out, v, _GROUND_TOKEN)
        return out

    # ---- policy and hygiene hooks ----

    def apply_policy(self, state: object, site: str, policy: NormalizePolicy) -> object:
        return state

    def sweep(self, state: object) -> object:
        return state

    # ---- renaming and inspection ----

    def rename(self, state: object, mapping: dict[Var, Var]) -> object:
        raise NotImplementedError

    def render(self, state: object) -> str:
        return state.render()

    def var_domain(self, state: object) -> tuple[Var, ...]:
        return state.domain

    def sharing_sets(self, state: object) -> frozenset[frozenset[Var]]:
        raise NotImplementedError

    def clique_sets(self, state: object) -> frozenset[frozenset[Var]]:
        return frozenset()

    def free_vars(self, state: object) -> Optional[frozenset[Var]]:
        return None

    def group_count(self, state: object) -> int:
        return len(self.sharing_sets(state))

    def clique_count(self, state: object) -> int:
        return len(self.clique_sets(state))

    def size(self, state: object) -> int:
        return self.group_count(state) + self.clique_count(state)


def _worst_case_base(vs: Iterable[Var], ground: Iterable[Var]) -> tuple[SharingSet, int]:
    base = SharingSet.empty(vs)
    grounded = set(ground)
    nonground = base.mask_of(v for v in base.domain if v not in grounded)
    return base, nonground


class SharingDomain(AbstractDomain):
    name = "sharing"
    carrier = SharingSet

    def top(self, vs, ground=(), free=()):
        base = self.carrier.empty(vs)
        grounded = set(ground)
        nonground = base.mask_of(v for v in base.domain if v not in grounded)
        if nonground.bit_count() > MAX_TOP_VARS:
            raise ContractError(
                f"worst-case sharing over {nonground.bit_count()} variables is too large"
            )
        return replace(base, groups=_nonempty_submasks(nonground))

    def rename(self, state, mapping):
        return rename_sharing(state, mapping)

    def sharing_sets(self, state):
        return state.groups_as_varsets()


class SharingFreenessDomain(AbstractDomain):
    name = "sharing-freeness"
    has_freeness = True

    def top(self, vs, ground=(), free=()):
        sh = SharingDomain().top(vs, ground)
        return SharingFreeness(sh, frozenset(free))

    def sweep(self, state):
        return state.drop_unsupported_free()

    def rename(self, state, mapping):
        return SharingFreeness(
            rename_sharing(state.sh, mapping),
            frozenset(mapping[v] for v in state.free),
        )

    def sharing_sets(self, state):
        return state.sh.groups_as_varsets()

    def free_vars(self, state):
        return state.free


class CliqueSharingDomain(AbstractDomain):
    name = "clique-sharing"
    has_cliques = True

    def top(self, vs, ground=(), free=()):
        base, nonground = _worst_case_base(vs, ground)
        cl = replace(base, groups=frozenset({nonground} if nonground else ()))
        return CliquePair(cl, base)

    def extend(self, call, g, prime, clsh_limit=24):
        return call.extend(g, prime, clsh_limit=clsh_limit)

    def apply_policy(self, state, site, policy):
        return policy.apply(state) if policy.wants(site) else state

    def rename(self, state, mapping):
        return CliquePair(
            rename_sharing(state.cl, mapping), rename_sharing(state.sh, mapping)
        )

    def unify_free_heads(self, state: CliquePair, t1: Term, t2: Term) -> object:
        """Like unify, but exploits that t1's fresh variables are free while
        the bindings are folded in; the freeness itself is discarded."""
        lifted = CliqueSharingFreeness(state, frozenset())
        out = CliqueSharingFreenessDomain().unify(lifted, t1, t2)
        if is_bottom(out):
            return out
        return out.pair

    def sharing_sets(self, state):
        return state.sh.groups_as_varsets()

    def clique_sets(self, state):
        return state.cl.groups_as_varsets()


class CliqueSharingFreenessDomain(AbstractDomain):
    name = "clique-sharing-freeness"
    has_freeness = True
    has_cliques = True

    def top(self, vs, ground=(), free=()):
        pair = CliqueSharingDomain().top(vs, ground)
        return CliqueSharingFreeness(pair, frozenset(free))

    def extend(self, call, g, prime, clsh_limit=24):
        return call.extend(g, prime, clsh_limit=clsh_limit)

    def apply_policy(self, state, site, policy):
        if not policy.wants(site):
            return state
        return replace(state, pair=policy.apply(state.pair))

    def sweep(self, state):
        return state.drop_unsupported_free()

    def rename(self, state, mapping):
        pair = CliqueSharingDomain().rename(state.pair, mapping)
        return CliqueSharingFreeness(pair, frozenset(mapping[v] for v in state.free))

    def sharing_sets(self, state):
        return state.pair.sh.groups_as_varsets()

    def clique_sets(self, state):
        return state.pair.cl.groups_as_varsets()

    def free_vars(self, state):
        return state.free


class OracleSharingDomain(SharingDomain):
    """Plain sharing computed through the reference implementations.

    Hidden from the public domain list; the verify machinery re-runs an
    analysis on this carrier and demands exact agreement.
    """

    name = "sharing-oracle"

    @property
    def carrier(self):
        from .oracle import OracleSharingSet

        return OracleSharingSet


DOMAINS: dict[str, AbstractDomain] = {
    d.name: d
    for d in (
        SharingDomain(),
        SharingFreenessDomain(),
        CliqueSharingDomain(),
        CliqueSharingFreenessDomain(),
        OracleSharingDomain(),
    )
}

# The public, user-selectable domains; the oracle twin stays internal.
DOMAIN_NAMES = ("sharing", "sharing-freeness", "clique-sharing", "clique-sharing-freeness")


def get_domain(name: str) -> AbstractDomain:
    try:
        return DOMAINS[name]
    except KeyError:
        raise ContractError(
            f"unknown domain {name!r}; expected one of {', '.join(DOMAIN_NAMES)}"
        ) from None
