"""Clique detection and the normalization pipeline.

A clique pair (cl, sh) is redundant when sh still contains groups that a
clique already covers, and weak when sh contains a whole powerset that
could be folded into one clique.  Normalization removes both kinds of
slack:

  minimize    drop from sh every group included in some clique
  detect      fold complete powersets of sh into cliques (see below)
  regularize  drop cliques included in other cliques

Detection scans candidate groups S of sh by decreasing size.  S becomes a
clique exactly when all 2^|S|-1 of its nonempty subsets are accounted for,
either present in sh (the SS count) or already covered by existing cliques
(the [S] count, computed by inclusion-exclusion over the intersections of
S with each clique).  Candidates are always drawn from sh itself, so the
largest size worth scanning is the largest group size in sh; cliques
contribute only through [S].  Widening reuses the same scan but accepts a
candidate once a fraction of its subsets is present, trading precision
for a smaller representation.

All functions here work on the bitmask level and rebuild pairs through
dataclasses.replace, so this module stays import-light.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from typing import TYPE_CHECKING, Iterable

from .terms import ContractError

if TYPE_CHECKING:  # pragma: no cover
    from .cliques import CliquePair


def maximal_masks(masks: Iterable[int]) -> frozenset[int]:
    """Drop every mask strictly contained in another (regular clique sets)."""
    unique = set(masks)
    return frozenset(
        m for m in unique if not any(m != o and m & ~o == 0 for o in unique)
    )


def covered_subset_count(candidate: int, cliques: Iterable[int]) -> int:
    """How many nonempty subsets of candidate are covered by the cliques.

    Inclusion-exclusion over the distinct intersections of the candidate
    with each clique: subsets of an intersection are covered, and overlaps
    between intersections are counted once.
    """
    parts = sorted({candidate & c for c in cliques} - {0})
    total = 0
    sign = 1
    for k in range(1, len(parts) + 1):
        for chosen in combinations(parts, k):
            common = chosen[0]
            for m in chosen[1:]:
                common &= m
            total += sign * ((1 << common.bit_count()) - 1)
        sign = -sign
    return total


def _is_minimal(cl: frozenset[int], sh: frozenset[int]) -> bool:
    return all(not (s & ~c == 0) for s in sh for c in cl)


def _detect(
    cl: frozenset[int], sh: frozenset[int], threshold: float
) -> tuple[frozenset[int], frozenset[int]]:
    """One full candidate scan; returns the updated (cl, sh) masks."""
    cl_cur = set(cl)
    sh_cur = set(sh)
    if not sh_cur or (len(sh_cur) < 3 and not cl_cur):
        return frozenset(cl_cur), frozenset(sh_cur)
    max_size = max(m.bit_count() for m in sh_cur)
    for size in range(max_size, 1, -1):
        for cand in sorted(s for s in sh_cur if s.bit_count() == size):
            if cand not in sh_cur:
                continue
            subsets_present = [s for s in sh_cur if s & ~cand == 0]
            needed = (1 << size) - 1 - covered_subset_count(cand, cl_cur)
            if len(subsets_present) >= threshold * needed:
                cl_cur = set(maximal_masks(cl_cur | {cand}))
                sh_cur.difference_update(subsets_present)
    return frozenset(cl_cur), frozenset(sh_cur)


def regularize(pair: "CliquePair") -> "CliquePair":
    return replace(pair, cl=pair.cl.with_groups(maximal_masks(pair.cl.groups)))


def minimize(pair: "CliquePair") -> "CliquePair":
    cliques = pair.cl.groups
    kept = frozenset(
        s for s in pair.sh.groups if not any(s & ~c == 0 for c in cliques)
    )
    return replace(pair, sh=pair.sh.with_groups(kept))


def detect_cliques(pair: "CliquePair") -> "CliquePair":
    """Fold complete subset families of sh into cliques.  Input must be
    minimal; the output is minimal and its clique component regular."""
    if not _is_minimal(pair.cl.groups, pair.sh.groups):
        raise ContractError("detect_cliques requires a minimal pair")
    cl, sh = _detect(pair.cl.groups, pair.sh.groups, 1.0)
    return replace(pair, cl=pair.cl.with_groups(cl), sh=pair.sh.with_groups(sh))


def normalize(pair: "CliquePair") -> "CliquePair":
    return detect_cliques(minimize(regularize(pair)))


def widen(pair: "CliquePair", threshold: float) -> "CliquePair":
    """Like normalize, but a candidate is accepted once the given fraction
    of its missing subsets is present.  threshold 1.0 is plain detection."""
    if not 0.0 < threshold <= 1.0:
        raise ContractError(f"widening threshold must be in (0, 1], got {threshold}")
    trimmed = minimize(regularize(pair))
    cl, sh = _detect(trimmed.cl.groups, trimmed.sh.groups, threshold)
    return replace(trimmed, cl=trimmed.cl.with_groups(cl), sh=trimmed.sh.with_groups(sh))


NORMALIZE_SITES = ("extend", "compare", "call2entry", "lub")
_REQUIRED_SITES = frozenset({"extend", "compare"})
DEFAULT_SITES = frozenset({"extend", "compare", "call2entry"})


@dataclass(frozen=True)
class NormalizePolicy:
    """Where normalization runs during analysis, and how aggressively.

    extend and compare are correctness sites and cannot be disabled;
    call2entry and lub are precision/size tradeoffs.  When a widening
    threshold is set, every policy-driven normalization widens instead.
    """

    sites: frozenset[str] = DEFAULT_SITES
    widening_threshold: float | None = None
    clsh_limit: int = 24

    def __post_init__(self) -> None:
        unknown = set(self.sites) - set(NORMALIZE_SITES)
        if unknown:
            raise ContractError(f"unknown normalize sites: {sorted(unknown)}")
        object.__setattr__(self, "sites", frozenset(self.sites) | _REQUIRED_SITES)
        if self.widening_threshold is not None and not 0.0 < self.widening_threshold <= 1.0:
            raise ContractError("widening threshold must be in (0, 1]")
        if self.clsh_limit < 1:
            raise ContractError("clsh limit must be positive")

    @classmethod
    def from_flags(
        cls,
        normalize_at: Iterable[str] | None = None,
        widening_threshold: float | None = None,
        clsh_limit: int = 24,
    ) -> "NormalizePolicy":
        sites = DEFAULT_SITES if not normalize_at else frozenset(normalize_at)
        return cls(sites, widening_threshold, clsh_limit)

    def wants(self, site: str) -> bool:
        return site in self.sites

    def apply(self, pair: "CliquePair") -> "CliquePair":
        if self.widening_threshold is not None:
            return widen(pair, self.widening_threshold)
        return normalize(pair)
