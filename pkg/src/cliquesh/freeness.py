"""Sharing domains enriched with definite freeness.

The freeness component f is must-information: a variable in f is known to
be unbound.  Unification exploits it twice over plain sharing: when one
side of x = t is a known-free variable no transitive closure is needed,
and when t is linear for the current sharing only a capped amount of
mixing can happen.  Both shortcuts apply to the clique component as well.

The plain sharing+freeness domain is the cl = empty instantiation of the
clique version; its amgu is implemented as exactly that embedding so there
is a single code path for the case analysis.

These functions implement the transfer formulas verbatim and do not
re-derive groundness from the result; the engine re-establishes the
"no ground variable stays in f" invariant after each transfer step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .cliques import CliquePair, strip_vars
from .normalize import maximal_masks
from .sharing import SharingSet, binary_union, union_closure
from .terms import ContractError, Term, Var, is_linear, var_set


def singleton_union(masks: Iterable[int]) -> frozenset[int]:
    """The one-group set holding the union of all masks; empty when there
    is nothing to join (the empty group does not exist)."""
    total = 0
    for m in masks:
        total |= m
    return frozenset({total}) if total else frozenset()


def state_linear(t: Term, pair: CliquePair) -> bool:
    """Is t linear for this sharing state: syntactically linear, and no
    relevant group or clique touches two of its variables."""
    if not is_linear(t):
        return False
    tmask = pair.sh.term_mask(t, strict=False)
    ok = all(
        (s & tmask).bit_count() == 1
        for s in pair.sh.relevant(tmask) | pair.cl.relevant(tmask)
    )
    assert ok == _state_linear_pairwise(t, pair), "linearity checks disagree"
    return ok


def _state_linear_pairwise(t: Term, pair: CliquePair) -> bool:
    """Quadratic formulation used to cross-check state_linear in debug runs."""
    if not is_linear(t):
        return False
    vs = sorted(var_set(t) & set(pair.domain), key=lambda v: v.id)
    for i, y in enumerate(vs):
        ymask = pair.sh.mask_of([y])
        for z in vs[i + 1 :]:
            zmask = pair.sh.mask_of([z])
            if pair.sh.relevant(ymask) & pair.sh.relevant(zmask):
                return False
            if pair.cl.relevant(ymask) & pair.cl.relevant(zmask):
                return False
    return True


@dataclass(frozen=True)
class CliqueSharingFreeness:
    pair: CliquePair
    free: frozenset[Var]

    def __post_init__(self) -> None:
        stray = self.free - set(self.pair.domain)
        if stray:
            names = ", ".join(sorted(v.name for v in stray))
            raise ContractError(f"free variables outside the domain: {names}")

    # ---- construction ----

    @classmethod
    def empty(cls, domain: Iterable[Var]) -> "CliqueSharingFreeness":
        return cls(CliquePair.empty(domain), frozenset())

    @classmethod
    def top(cls, domain: Iterable[Var]) -> "CliqueSharingFreeness":
        return cls(CliquePair.top(domain), frozenset())

    @property
    def domain(self) -> tuple[Var, ...]:
        return self.pair.domain

    # ---- abstract unification ----

    def amgu(self, x: Var, t: Term) -> "CliqueSharingFreeness":
        x_free = x in self.free
        t_free = isinstance(t, Var) and t in self.free
        if x_free or t_free:
            new_pair = self._amgu_free_side(x, t)
        elif state_linear(t, self.pair):
            new_pair = self._amgu_linear(x, t)
        else:
            new_pair = self.pair.amgu(x, t)
        return replace(self, pair=new_pair, free=self._free_after(x, t, x_free, t_free))

    def _parts(self, x: Var, t: Term):
        pair = self.pair
        xmask = pair.sh.mask_of([x])
        tmask = pair.sh.term_mask(t)
        return (
            xmask | tmask,
            pair.cl.relevant(xmask),
            pair.cl.relevant(tmask),
            pair.sh.relevant(xmask),
            pair.sh.relevant(tmask),
        )

    def _amgu_free_side(self, x: Var, t: Term) -> CliquePair:
        # one side is known free: groups combine once, no closure
        xt, cl_x, cl_t, sh_x, sh_t = self._parts(x, t)
        cl = (
            strip_vars(self.pair.cl.groups, xt)
            | binary_union(cl_x | sh_x, cl_t)
            | binary_union(cl_x, sh_t)
        )
        sh = self.pair.sh.irrelevant(xt) | binary_union(sh_x, sh_t)
        return self.pair.with_parts(maximal_masks(cl), sh)

    def _amgu_linear(self, x: Var, t: Term) -> CliquePair:
        # t linear for the current sharing: the t side is joined wholesale.
        # The union closure lands on the t side only; the x side stays open.
        xt, cl_x, cl_t, sh_x, sh_t = self._parts(x, t)
        keep = self.pair.sh.irrelevant(xt)
        if not cl_t:
            cl = strip_vars(self.pair.cl.groups, xt) | binary_union(
                cl_x, singleton_union(sh_t)
            )
            sh = keep | binary_union(sh_x, union_closure(sh_t))
        else:
            cl = strip_vars(self.pair.cl.groups, xt) | binary_union(
                cl_x | sh_x, singleton_union(cl_t | sh_t)
            )
            sh = keep
        return self.pair.with_parts(maximal_masks(cl), sh)

    def _free_after(self, x: Var, t: Term, x_free: bool, t_free: bool) -> frozenset[Var]:
        if x_free and t_free:
            return self.free
        _, cl_x, cl_t, sh_x, sh_t = self._parts(x, t)

        def all_vars(masks: frozenset[int]) -> frozenset[Var]:
            total = 0
            for m in masks:
                total |= m
            return frozenset(self.pair.sh.group_vars(total))

        if x_free:
            return self.free - all_vars(sh_x | cl_x)
        if t_free:
            return self.free - all_vars(sh_t | cl_t)
        return self.free - all_vars(sh_x | cl_x | sh_t | cl_t)

    # ---- the framework operations ----

    def project(self, g: Term) -> "CliqueSharingFreeness":
        return replace(
            self, pair=self.pair.project(g), free=self.free & var_set(g)
        )

    def augment(self, g: Term) -> "CliqueSharingFreeness":
        # fresh variables are unconstrained, hence free
        return replace(
            self, pair=self.pair.augment(g), free=self.free | var_set(g)
        )

    def extend(
        self, g: Term, prime: "CliqueSharingFreeness", *, clsh_limit: int = 24
    ) -> "CliqueSharingFreeness":
        new_pair = self.pair.extend(g, prime.pair, clsh_limit=clsh_limit)
        gvars = var_set(g)
        kept = set(prime.free)
        for v in self.free - gvars:
            vmask = new_pair.sh.mask_of([v])
            touched = 0
            for m in new_pair.sh.relevant(vmask) | new_pair.cl.relevant(vmask):
                touched |= m
            reached = frozenset(new_pair.sh.group_vars(touched)) & gvars
            if reached <= prime.free:
                kept.add(v)
        return replace(self, pair=new_pair, free=frozenset(kept))

    def lub(self, other: "CliqueSharingFreeness") -> "CliqueSharingFreeness":
        return replace(
            self, pair=self.pair.lub(other.pair), free=self.free & other.free
        )

    def leq(self, other: "CliqueSharingFreeness") -> bool:
        return self.pair.leq(other.pair) and self.free >= other.free

    def drop_unsupported_free(self) -> "CliqueSharingFreeness":
        """Re-establish the hygiene invariant: ground variables (absent from
        every group and clique) cannot be free."""
        return replace(self, free=self.free & self.pair.occurring_vars())

    def render(self) -> str:
        free = "{" + ", ".join(sorted(v.name for v in self.free)) + "}"
        return f"({self.pair.render()}, free: {free})"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class SharingFreeness:
    sh: SharingSet
    free: frozenset[Var]

    def __post_init__(self) -> None:
        stray = self.free - set(self.sh.domain)
        if stray:
            names = ", ".join(sorted(v.name for v in stray))
            raise ContractError(f"free variables outside the domain: {names}")

    @classmethod
    def empty(cls, domain: Iterable[Var]) -> "SharingFreeness":
        return cls(SharingSet.empty(domain), frozenset())

    @classmethod
    def top(cls, domain: Iterable[Var]) -> "SharingFreeness":
        return cls(SharingSet.top(domain), frozenset())

    @property
    def domain(self) -> tuple[Var, ...]:
        return self.sh.domain

    def _lift(self) -> CliqueSharingFreeness:
        empty_cl = SharingSet.empty(self.sh.domain)
        return CliqueSharingFreeness(CliquePair(empty_cl, self.sh), self.free)

    @staticmethod
    def _drop(state: CliqueSharingFreeness) -> "SharingFreeness":
        assert not state.pair.cl.groups, "embedding produced cliques"
        return SharingFreeness(state.pair.sh, state.free)

    def amgu(self, x: Var, t: Term) -> "SharingFreeness":
        """The cl = empty instantiation of the clique-sharing amgu."""
        return self._drop(self._lift().amgu(x, t))

    def project(self, g: Term) -> "SharingFreeness":
        return SharingFreeness(self.sh.project(g), self.free & var_set(g))

    def augment(self, g: Term) -> "SharingFreeness":
        return SharingFreeness(self.sh.augment(g), self.free | var_set(g))

    def extend(self, g: Term, prime: "SharingFreeness") -> "SharingFreeness":
        new_sh = self.sh.extend(g, prime.sh)
        gvars = var_set(g)
        kept = set(prime.free)
        for v in self.free - gvars:
            vmask = new_sh.mask_of([v])
            touched = 0
            for m in new_sh.relevant(vmask):
                touched |= m
            reached = frozenset(new_sh.group_vars(touched)) & gvars
            if reached <= prime.free:
                kept.add(v)
        return SharingFreeness(new_sh, frozenset(kept))

    def lub(self, other: "SharingFreeness") -> "SharingFreeness":
        return SharingFreeness(self.sh.lub(other.sh), self.free & other.free)

    def leq(self, other: "SharingFreeness") -> bool:
        return self.sh.leq(other.sh) and self.free >= other.free

    def drop_unsupported_free(self) -> "SharingFreeness":
        return SharingFreeness(self.sh, self.free & self.sh.occurring_vars())

    def render(self) -> str:
        free = "{" + ", ".join(sorted(v.name for v in self.free)) + "}"
        return f"({self.sh.render()}, free: {free})"

    def __str__(self) -> str:
        return self.render()
