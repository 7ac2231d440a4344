"""Compact builders for abstract values used across the test suite.

Variables are named by single letters with ids fixed by alphabet
position, so `sharing("xyz", "x xy")` is the set {x, xy} over domain
{x, y, z} and renders deterministically.
"""

from __future__ import annotations

import random

from cliquesh.cliques import CliquePair
from cliquesh.freeness import CliqueSharingFreeness, SharingFreeness
from cliquesh.sharing import SharingSet
from cliquesh.terms import Struct, Term, Var


def mkvars(letters: str) -> dict[str, Var]:
    return {ch: Var(ord(ch) - ord("a") + 1, ch) for ch in letters}


def _varsets(vs: dict[str, Var], words: str) -> list[list[Var]]:
    return [[vs[ch] for ch in word] for word in words.split()]


def sharing(domain: str, groups: str = "") -> SharingSet:
    vs = mkvars(domain)
    return SharingSet.of(vs.values(), _varsets(vs, groups))


def cpair(domain: str, cliques: str = "", groups: str = "") -> CliquePair:
    vs = mkvars(domain)
    return CliquePair.of(vs.values(), _varsets(vs, cliques), _varsets(vs, groups))


def sfree(domain: str, groups: str = "", free: str = "") -> SharingFreeness:
    vs = mkvars(domain)
    return SharingFreeness(sharing(domain, groups), frozenset(vs[ch] for ch in free))


def cfree(
    domain: str, cliques: str = "", groups: str = "", free: str = ""
) -> CliqueSharingFreeness:
    vs = mkvars(domain)
    return CliqueSharingFreeness(
        cpair(domain, cliques, groups), frozenset(vs[ch] for ch in free)
    )


def atom(functor: str, domain: str, args: str) -> Struct:
    """A flat atom over single-letter variables, e.g. atom("p", "xyz", "xz")."""
    vs = mkvars(domain)
    return Struct(functor, tuple(vs[ch] for ch in args))


def names(s: SharingSet) -> set[str]:
    return {"".join(sorted(v.name for v in g)) for g in s.groups_as_varsets()}


def varset_names(groups) -> set[str]:
    return {"".join(sorted(v.name for v in g)) for g in groups}


def pair_names(p: CliquePair) -> tuple[set[str], set[str]]:
    return names(p.cl), names(p.sh)


def free_names(free: frozenset[Var]) -> set[str]:
    return {v.name for v in free}


# ---- randomized instances (used by property tests and acceptance) ----


def random_sharing(rng: random.Random, letters: str, max_groups: int = 8) -> SharingSet:
    base = sharing(letters)
    n = len(base.domain)
    count = rng.randint(0, max_groups)
    masks = {rng.randint(1, (1 << n) - 1) for _ in range(count)}
    return base.with_groups(masks)


def random_cpair(
    rng: random.Random, letters: str, max_cliques: int = 3, max_groups: int = 8
) -> CliquePair:
    base = cpair(letters)
    n = len(base.domain)
    cl = {rng.randint(1, (1 << n) - 1) for _ in range(rng.randint(0, max_cliques))}
    sh = {rng.randint(1, (1 << n) - 1) for _ in range(rng.randint(0, max_groups))}
    return base.with_parts(cl, sh)


def random_term(rng: random.Random, vs: list[Var], depth: int = 2) -> Term:
    roll = rng.random()
    if depth == 0 or roll < 0.4:
        return rng.choice(vs) if vs and roll < 0.85 else Struct("a")
    arity = rng.randint(0, 3)
    return Struct(
        rng.choice("fgh"),
        tuple(random_term(rng, vs, depth - 1) for _ in range(arity)),
    )
