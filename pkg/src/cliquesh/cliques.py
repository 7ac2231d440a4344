"""Clique-sharing abstract substitutions.

A clique is a set of variables standing for its whole powerset of sharing
groups.  A clique pair (cl, sh) describes nothing more than the sharing set
"every nonempty subset of some clique, plus the explicit groups of sh";
it trades precision for a representation that stays small where plain
set-sharing blows up.

The operations mirror the plain domain: unification distinguishes whether
the cliques are involved at all (and collapses everything touched into a
single clique when they are), projection and augmentation act
componentwise, and extend rebuilds the four pieces of the success
description separately so they stay individually testable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .normalize import maximal_masks, normalize
from .sharing import SharingSet, binary_union, union_closure
from .terms import ContractError, Term, Var, var_set


def strip_vars(cliques: Iterable[int], mask: int) -> frozenset[int]:
    """Remove the masked variables from every clique, dropping emptied ones."""
    return frozenset(c & ~mask for c in cliques) - {0}


@dataclass(frozen=True)
class CliquePair:
    cl: SharingSet
    sh: SharingSet

    def __post_init__(self) -> None:
        if self.cl.domain != self.sh.domain:
            raise ContractError("clique and sharing components must share a domain")

    # ---- construction ----

    @classmethod
    def empty(cls, domain: Iterable[Var]) -> "CliquePair":
        return cls(SharingSet.empty(domain), SharingSet.empty(domain))

    @classmethod
    def top(cls, domain: Iterable[Var]) -> "CliquePair":
        """Worst-case sharing as one clique over the whole domain."""
        base = SharingSet.empty(domain)
        if not base.domain:
            return cls(base, base)
        full = (1 << len(base.domain)) - 1
        return cls(base.with_groups({full}), base)

    @classmethod
    def of(
        cls,
        domain: Iterable[Var],
        cliques: Iterable[Iterable[Var]],
        groups: Iterable[Iterable[Var]],
    ) -> "CliquePair":
        return cls(SharingSet.of(domain, cliques), SharingSet.of(domain, groups))

    @property
    def domain(self) -> tuple[Var, ...]:
        return self.sh.domain

    def with_parts(self, cl_masks: Iterable[int], sh_masks: Iterable[int]) -> "CliquePair":
        return replace(
            self, cl=self.cl.with_groups(cl_masks), sh=self.sh.with_groups(sh_masks)
        )

    def is_empty(self) -> bool:
        return not self.cl.groups and not self.sh.groups

    # ---- the domain operations ----

    def amgu(self, x: Var, t: Term) -> "CliquePair":
        """Abstract unification of x = t.  When no clique is touched this is
        plain amgu on sh; when one side has no sharing at all the touched
        variables simply disappear; otherwise everything touched collapses
        into one clique."""
        xmask = self.sh.mask_of([x])
        tmask = self.sh.term_mask(t)
        xt = xmask | tmask
        cl_x = self.cl.relevant(xmask)
        cl_t = self.cl.relevant(tmask)
        sh_x = self.sh.relevant(xmask)
        sh_t = self.sh.relevant(tmask)
        sh_keep = self.sh.irrelevant(xt)
        if not cl_x and not cl_t:
            mixed = binary_union(union_closure(sh_x), union_closure(sh_t))
            return self.with_parts(self.cl.groups, sh_keep | mixed)
        if (not cl_x and not sh_x) or (not cl_t and not sh_t):
            return self.with_parts(strip_vars(self.cl.groups, xt), sh_keep)
        lump = 0
        for m in cl_x | cl_t | sh_x | sh_t:
            lump |= m
        merged = maximal_masks(strip_vars(self.cl.groups, xt) | {lump})
        return self.with_parts(merged, sh_keep)

    def project(self, g: Term) -> "CliquePair":
        out = replace(self, cl=self.cl.project(g), sh=self.sh.project(g))
        return replace(out, cl=out.cl.with_groups(maximal_masks(out.cl.groups)))

    def augment(self, g: Term) -> "CliquePair":
        # the fresh variables join the domain of both components but only
        # the sharing part gets their singleton groups
        new_sh = self.sh.augment(g)
        new_cl = SharingSet.empty(new_sh.domain).with_groups(
            self.cl.translate(c, new_sh) for c in self.cl.groups
        )
        return replace(self, cl=new_cl, sh=new_sh)

    def extend(self, g: Term, prime: "CliquePair", *, clsh_limit: int = 24) -> "CliquePair":
        return extend_pair(self, g, prime, clsh_limit=clsh_limit)

    def lub(self, other: "CliquePair") -> "CliquePair":
        return self.with_parts(
            maximal_masks(self.cl.lub(other.cl).groups), self.sh.lub(other.sh).groups
        )

    def leq(self, other: "CliquePair") -> bool:
        """Sufficient syntactic order check: cliques must sit inside cliques,
        groups inside groups or cliques.  May answer False for pairs whose
        expansions are actually ordered."""
        if self.domain != other.domain:
            raise ContractError("leq requires equal domains")
        cl2 = other.cl.groups
        for c in self.cl.groups:
            if not any(c & ~c2 == 0 for c2 in cl2):
                return False
        for s in self.sh.groups:
            if s not in other.sh.groups and not any(s & ~c2 == 0 for c2 in cl2):
                return False
        return True

    # ---- inspection ----

    def occurring_vars(self) -> frozenset[Var]:
        occur = 0
        for m in self.cl.groups | self.sh.groups:
            occur |= m
        return frozenset(self.sh.group_vars(occur))

    def render(self) -> str:
        return f"({self.cl.render()}, {self.sh.render()})"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class ExtendParts:
    """The intermediate pieces of extend, kept for inspection and tests."""

    worstcase: CliquePair  # normalized worst-case success (cl', sh')
    ext_sh: frozenset[int]  # classical extend applied to the sh component
    ext_cl: frozenset[int]  # clique remnants plus clique/prime-clique products
    cliques_groups: frozenset[int]  # groups dug out of cl' whose projection is in prime.sh
    overflow_cliques: frozenset[int]  # cliques too large to enumerate, kept whole
    groups_covered: frozenset[int]  # sh' groups whose projection sits inside a prime clique

    def assemble(self, base: CliquePair) -> CliquePair:
        cl = maximal_masks(self.ext_cl | self.overflow_cliques)
        sh = self.ext_sh | self.cliques_groups | self.groups_covered
        return base.with_parts(cl, sh)


def worstcase_success(call: CliquePair, gmask: int) -> CliquePair:
    """Normalized worst-case description of the goal's success: every way
    the relevant cliques and groups can join, nothing filtered yet."""
    cl_rel = union_closure(call.cl.relevant(gmask))
    sh_rel = union_closure(call.sh.relevant(gmask))
    cl_wc = cl_rel | binary_union(cl_rel, sh_rel)
    return normalize(call.with_parts(cl_wc, sh_rel))


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def extend_parts(
    call: CliquePair, g: Term, prime: CliquePair, *, clsh_limit: int = 24
) -> ExtendParts:
    gvars = var_set(g)
    if set(prime.domain) != gvars:
        raise ContractError("prime must be expressed over the goal's variables")
    gmask = call.sh.term_mask(g, strict=False)
    wc = worstcase_success(call, gmask)
    sh2 = frozenset(prime.sh.translate(m, call.sh) for m in prime.sh.groups)
    cl2 = frozenset(prime.cl.translate(m, call.cl) for m in prime.cl.groups)

    ext_sh = frozenset(call.sh.irrelevant(gmask)) | frozenset(
        s for s in wc.sh.groups if s & gmask in sh2
    )
    ext_cl = strip_vars(call.cl.groups, gmask) | (
        frozenset((c & s2) | (c & ~gmask) for c in wc.cl.groups for s2 in cl2) - {0}
    )

    dug: set[int] = set()
    overflow: set[int] = set()
    for c in wc.cl.groups:
        if c.bit_count() > clsh_limit:
            overflow.add(c)
            continue
        rest = c & ~gmask
        for p in sh2:
            if p & ~c == 0:
                for q in _submasks(rest):
                    dug.add(p | q)

    covered = frozenset(
        s for s in wc.sh.groups if any((s & gmask) & ~c2 == 0 for c2 in cl2)
    )
    return ExtendParts(wc, ext_sh, ext_cl, frozenset(dug), frozenset(overflow), covered)


def extend_pair(
    call: CliquePair, g: Term, prime: CliquePair, *, clsh_limit: int = 24
) -> CliquePair:
    return extend_parts(call, g, prime, clsh_limit=clsh_limit).assemble(call)
