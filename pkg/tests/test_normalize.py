"""Clique detection, minimization, regularization, widening, and the policy."""

import random

import pytest

from cliquesh.normalize import (
    DEFAULT_SITES,
    NORMALIZE_SITES,
    NormalizePolicy,
    covered_subset_count,
    detect_cliques,
    maximal_masks,
    minimize,
    normalize,
    regularize,
    widen,
)
from cliquesh.oracle import expand, ref_count_covered
from cliquesh.terms import ContractError
from helpers import cpair, mkvars, pair_names, random_cpair


V = mkvars("abcdefghijklmnopqrstuvwxyz")


def test_minimize_drops_covered_groups():
    p = cpair("xyz", cliques="xy", groups="x xy z")
    assert pair_names(minimize(p)) == ({"xy"}, {"z"})


def test_minimize_multi_var_clique():
    p = cpair("uxyz", cliques="xyz", groups="xy z u")
    assert pair_names(minimize(p)) == ({"xyz"}, {"u"})


def test_minimize_no_cliques_is_identity():
    p = cpair("xy", groups="x xy")
    assert minimize(p) == p


def test_covered_count_no_cliques():
    p = cpair("xyz")
    cand = p.sh.mask_of([V["x"], V["y"], V["z"]])
    assert covered_subset_count(cand, frozenset()) == 0


def test_covered_count_single_clique():
    p = cpair("xyz", cliques="xy")
    cand = p.sh.mask_of([V["x"], V["y"], V["z"]])
    assert covered_subset_count(cand, p.cl.groups) == 3


def test_covered_count_overlapping_cliques():
    p = cpair("xyz", cliques="xy yz")
    cand = p.sh.mask_of([V["x"], V["y"], V["z"]])
    assert covered_subset_count(cand, p.cl.groups) == 5


def test_covered_count_matches_reference():
    rng = random.Random(21)
    letters = "vwxyz"
    vs = [V[ch] for ch in letters]
    for _ in range(300):
        p = random_cpair(rng, letters)
        cand_vars = frozenset(v for v in vs if rng.random() < 0.6)
        if not cand_vars:
            continue
        cand = p.cl.mask_of(cand_vars)
        clique_sets = [
            frozenset(v for v in vs if m & p.cl.mask_of([v])) for m in p.cl.groups
        ]
        assert covered_subset_count(cand, p.cl.groups) == ref_count_covered(
            cand_vars, clique_sets
        )


def test_detect_full_powerset():
    p = cpair("xy", groups="x y xy")
    assert pair_names(detect_cliques(p)) == ({"xy"}, set())


def test_detect_with_existing_clique_coverage():
    p = cpair("xyz", cliques="xy", groups="xyz xz yz z")
    assert pair_names(detect_cliques(p)) == ({"xyz"}, set())


def test_detect_nothing_to_fold():
    p = cpair("xy", groups="x y")
    assert detect_cliques(p) == p


def test_detect_requires_minimal_input():
    p = cpair("xy", cliques="xy", groups="x")
    with pytest.raises(ContractError):
        detect_cliques(p)


def test_regularize_drops_subsumed_cliques():
    assert pair_names(regularize(cpair("xyz", cliques="xy xyz"))) == ({"xyz"}, set())
    p = cpair("uxyz", cliques="xy zu")
    assert regularize(p) == p
    assert pair_names(regularize(cpair("xyz", cliques="x xy yz"))) == (
        {"xy", "yz"},
        set(),
    )


def test_maximal_masks():
    assert maximal_masks([0b1, 0b11, 0b100]) == frozenset({0b11, 0b100})


def test_normalize_folds_powerset_over_clique():
    p = cpair("uvxyz", cliques="xyz xyzu xyzv xyzuv", groups="u v uv")
    assert pair_names(normalize(p)) == ({"uvxyz"}, set())


def test_normalize_empty():
    p = cpair("xy")
    assert normalize(p) == p


def test_normalize_pure_powerset():
    p = cpair("xyz", groups="x y z xy xz yz xyz")
    assert pair_names(normalize(p)) == ({"xyz"}, set())


def test_normalize_idempotent():
    rng = random.Random(23)
    for _ in range(300):
        p = random_cpair(rng, "vwxyz")
        once = normalize(p)
        assert normalize(once) == once


def test_normalize_never_loses_concrete_groups():
    rng = random.Random(27)
    for _ in range(300):
        p = random_cpair(rng, "wxyz")
        assert expand(normalize(p)).groups >= expand(p).groups


def test_detect_preserves_expansion_exactly():
    rng = random.Random(29)
    for _ in range(300):
        p = minimize(regularize(random_cpair(rng, "wxyz")))
        assert expand(detect_cliques(p)) == expand(p)


def test_widen_accepts_partial_powerset():
    p = cpair("xyz", groups="x y xy xz yz xyz")
    assert pair_names(widen(p, 6 / 7)) == ({"xyz"}, set())


def test_widen_below_threshold_is_identity():
    p = cpair("xy", groups="x y")
    assert widen(p, 0.5) == p


def test_widen_at_one_is_normalize():
    rng = random.Random(31)
    for _ in range(200):
        p = random_cpair(rng, "vwxyz")
        assert widen(p, 1.0) == normalize(p)
        trimmed = minimize(regularize(p))
        assert widen(trimmed, 1.0) == detect_cliques(trimmed)


def test_widen_is_extensive():
    rng = random.Random(33)
    for threshold in (0.5, 0.75, 1.0):
        for _ in range(100):
            p = random_cpair(rng, "wxyz")
            assert expand(widen(p, threshold)).groups >= expand(p).groups


def test_widen_threshold_validation():
    p = cpair("xy", groups="x")
    for bad in (0.0, -0.2, 1.5):
        with pytest.raises(ContractError):
            widen(p, bad)


def test_policy_defaults():
    policy = NormalizePolicy()
    assert policy.sites == DEFAULT_SITES
    assert policy.widening_threshold is None
    assert policy.clsh_limit == 24


def test_policy_forces_required_sites():
    policy = NormalizePolicy(sites=frozenset({"lub"}))
    assert policy.wants("extend")
    assert policy.wants("compare")
    assert policy.wants("lub")
    assert not policy.wants("call2entry")


def test_policy_rejects_unknown_site():
    with pytest.raises(ContractError):
        NormalizePolicy(sites=frozenset({"entry2exit"}))


def test_policy_validates_threshold_and_limit():
    with pytest.raises(ContractError):
        NormalizePolicy(widening_threshold=0.0)
    with pytest.raises(ContractError):
        NormalizePolicy(clsh_limit=0)


def test_policy_from_flags():
    policy = NormalizePolicy.from_flags(None)
    assert policy.sites == DEFAULT_SITES
    policy = NormalizePolicy.from_flags(["extend", "compare", "lub"], 0.75, 16)
    assert policy.sites == frozenset({"extend", "compare", "lub"})
    assert policy.widening_threshold == 0.75
    assert policy.clsh_limit == 16


def test_policy_apply_normalizes_or_widens():
    p = cpair("xyz", groups="x y xy xz yz xyz")
    assert NormalizePolicy().apply(p) == normalize(p)
    widening = NormalizePolicy(widening_threshold=6 / 7)
    assert widening.apply(p) == widen(p, 6 / 7)


def test_sites_tuple_is_stable():
    assert NORMALIZE_SITES == ("extend", "compare", "call2entry", "lub")
