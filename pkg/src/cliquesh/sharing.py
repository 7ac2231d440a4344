"""Set-sharing abstract substitutions.

A sharing group is a nonempty set of program variables that may be bound
to terms sharing a common run-time variable.  An abstract substitution is
a set of such groups over a fixed variable domain.  Groups are stored as
bitmasks over the (sorted) domain tuple, which keeps the closure and
pairwise-union loops cheap.

The empty set of groups is meaningful: it says every domain variable is
ground.  The unreachable-state bottom element lives in the engine layer,
not here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable

from .terms import ContractError, Term, Var, var_set

# Materializing all nonempty subsets of a domain is deliberate (worst-case
# sharing); cap it so a typo cannot ask for 2**40 groups.
MAX_TOP_VARS = 20


def binary_union(left: frozenset[int], right: frozenset[int]) -> frozenset[int]:
    """Pairwise unions of the two group sets (empty if either side is)."""
    return frozenset(a | b for a in left for b in right)


def union_closure(masks: Iterable[int]) -> frozenset[int]:
    """Smallest superset of masks closed under pairwise union."""
    closed = set(masks)
    frontier = list(closed)
    while frontier:
        fresh: set[int] = set()
        for g in frontier:
            for h in closed:
                u = g | h
                if u not in closed and u not in fresh:
                    fresh.add(u)
        closed |= fresh
        frontier = list(fresh)
    return frozenset(closed)


def _sorted_domain(vs: Iterable[Var]) -> tuple[Var, ...]:
    return tuple(sorted(set(vs), key=lambda v: v.id))


@dataclass(frozen=True)
class SharingSet:
    domain: tuple[Var, ...]
    groups: frozenset[int]

    # ---- construction ----

    @classmethod
    def empty(cls, domain: Iterable[Var]) -> "SharingSet":
        return cls(_sorted_domain(domain), frozenset())

    @classmethod
    def top(cls, domain: Iterable[Var]) -> "SharingSet":
        """Worst-case sharing: every nonempty subset of the domain."""
        dom = _sorted_domain(domain)
        if len(dom) > MAX_TOP_VARS:
            raise ContractError(
                f"refusing to materialize worst-case sharing over {len(dom)} variables"
            )
        return cls(dom, frozenset(range(1, 1 << len(dom))))

    @classmethod
    def of(cls, domain: Iterable[Var], groups: Iterable[Iterable[Var]]) -> "SharingSet":
        out = cls.empty(domain)
        masks = set()
        for group in groups:
            mask = out.mask_of(group)
            if mask == 0:
                raise ContractError("sharing groups must be nonempty")
            masks.add(mask)
        return replace(out, groups=frozenset(masks))

    def __post_init__(self) -> None:
        if 0 in self.groups:
            raise ContractError("sharing groups must be nonempty")

    # ---- bitmask plumbing ----

    @cached_property
    def _index(self) -> dict[Var, int]:
        return {v: i for i, v in enumerate(self.domain)}

    def mask_of(self, vs: Iterable[Var], *, strict: bool = True) -> int:
        mask = 0
        idx = self._index
        for v in vs:
            bit = idx.get(v)
            if bit is None:
                if strict:
                    raise ContractError(f"variable {v.name} not in domain")
                continue
            mask |= 1 << bit
        return mask

    def term_mask(self, t: Term, *, strict: bool = True) -> int:
        return self.mask_of(var_set(t), strict=strict)

    def group_vars(self, mask: int) -> tuple[Var, ...]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.domain[low.bit_length() - 1])
            mask ^= low
        return tuple(out)

    def with_groups(self, groups: Iterable[int]) -> "SharingSet":
        return replace(self, groups=frozenset(groups))

    def translate(self, mask: int, other: "SharingSet") -> int:
        """Re-express a group of self's domain in other's bit positions."""
        out = 0
        idx = other._index
        for v in self.group_vars(mask):
            bit = idx.get(v)
            if bit is None:
                raise ContractError(f"variable {v.name} not in target domain")
            out |= 1 << bit
        return out

    # ---- the domain operations ----

    def relevant(self, t: Term | int) -> frozenset[int]:
        mask = t if isinstance(t, int) else self.term_mask(t, strict=False)
        return frozenset(s for s in self.groups if s & mask)

    def irrelevant(self, t: Term | int) -> frozenset[int]:
        mask = t if isinstance(t, int) else self.term_mask(t, strict=False)
        return frozenset(s for s in self.groups if not s & mask)

    def amgu(self, x: Var, t: Term) -> "SharingSet":
        """Abstract unification of the binding x = t against this substitution."""
        xmask = self.mask_of([x])
        tmask = self.term_mask(t)
        mixed = binary_union(
            union_closure(self.relevant(xmask)), union_closure(self.relevant(tmask))
        )
        return self.with_groups(self.irrelevant(xmask | tmask) | mixed)

    def project(self, g: Term) -> "SharingSet":
        """Restrict every group to the variables of g; domain becomes vars(g)."""
        target = SharingSet.empty(var_set(g))
        gmask = self.term_mask(g, strict=False)
        masks = set()
        for s in self.groups:
            cut = s & gmask
            if cut:
                masks.add(self.translate(cut, target))
        return replace(target, groups=frozenset(masks))

    def augment(self, g: Term) -> "SharingSet":
        """Add the (fresh) variables of g to the domain, each in its own group."""
        new_vars = var_set(g)
        overlap = new_vars & set(self.domain)
        if overlap:
            names = ", ".join(sorted(v.name for v in overlap))
            raise ContractError(f"augment requires fresh variables, got {names}")
        target = SharingSet.empty(tuple(self.domain) + tuple(new_vars))
        masks = {self.translate(s, target) for s in self.groups}
        masks |= {target.mask_of([v]) for v in new_vars}
        return replace(target, groups=frozenset(masks))

    def extend(self, g: Term, prime: "SharingSet") -> "SharingSet":
        """Propagate the success description prime (over vars(g)) back into
        this call description: keep the irrelevant part, close the relevant
        part under union, and keep exactly the closed groups whose projection
        on g is a group of prime."""
        gvars = var_set(g)
        if set(prime.domain) != gvars:
            raise ContractError("prime must be expressed over the goal's variables")
        gmask = self.term_mask(g, strict=False)
        keep = set(self.irrelevant(gmask))
        for s in union_closure(self.relevant(gmask)):
            if self.translate(s & gmask, prime) in prime.groups:
                keep.add(s)
        return self.with_groups(keep)

    def lub(self, other: "SharingSet") -> "SharingSet":
        if self.domain != other.domain:
            raise ContractError("lub requires equal domains")
        return self.with_groups(self.groups | other.groups)

    def leq(self, other: "SharingSet") -> bool:
        if self.domain != other.domain:
            raise ContractError("leq requires equal domains")
        return self.groups <= other.groups

    # ---- inspection ----

    def ground_vars(self) -> frozenset[Var]:
        occur = 0
        for s in self.groups:
            occur |= s
        return frozenset(v for v in self.domain if not occur & (1 << self._index[v]))

    def occurring_vars(self) -> frozenset[Var]:
        occur = 0
        for s in self.groups:
            occur |= s
        return frozenset(self.group_vars(occur))

    def groups_as_varsets(self) -> frozenset[frozenset[Var]]:
        return frozenset(frozenset(self.group_vars(s)) for s in self.groups)

    def group_text(self, mask: int) -> str:
        return "".join(sorted(v.name for v in self.group_vars(mask)))

    def render(self) -> str:
        return "{" + ", ".join(sorted(self.group_text(s) for s in self.groups)) + "}"

    def __str__(self) -> str:
        return self.render()
