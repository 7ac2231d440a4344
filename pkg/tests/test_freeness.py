"""Freeness-augmented sharing: the amgu case split, f updates, and extends."""

import random

import pytest

from cliquesh.freeness import (
    CliqueSharingFreeness,
    SharingFreeness,
    singleton_union,
    state_linear,
)
from cliquesh.normalize import normalize
from cliquesh.oracle import expand, groups_of
from cliquesh.sharing import SharingSet
from cliquesh.terms import ContractError, Struct, Var
from helpers import (
    atom,
    cfree,
    cpair,
    free_names,
    mkvars,
    names,
    pair_names,
    random_cpair,
    random_term,
    sfree,
)


V = mkvars("abcdefghijklmnopqrstuvwxyz")


def t2(f, a, b):
    return Struct(f, (V[a], V[b]))


def occurring_free(rng, pair_or_sh, chance=0.5):
    occ = pair_or_sh.occurring_vars()
    return frozenset(v for v in occ if rng.random() < chance)


def test_state_linear_plain_groups():
    assert state_linear(t2("f", "y", "z"), cpair("yz", groups="y z"))


def test_state_linear_rejects_nonlinear_term():
    assert not state_linear(t2("f", "y", "y"), cpair("yz"))


def test_state_linear_rejects_shared_clique():
    assert not state_linear(t2("f", "y", "z"), cpair("yz", cliques="yz"))


def test_state_linear_rejects_shared_group():
    assert not state_linear(t2("f", "y", "z"), cpair("yz", groups="yz"))


def test_singleton_union():
    assert singleton_union(frozenset()) == frozenset()
    assert singleton_union({0b01, 0b10}) == frozenset({0b11})


def test_amgu_both_free_keeps_freeness():
    s = cfree("xyz", groups="x y z", free="xy")
    out = s.amgu(V["x"], V["y"])
    assert pair_names(out.pair) == (set(), {"xy", "z"})
    assert free_names(out.free) == {"x", "y"}


def test_amgu_free_against_ground():
    s = cfree("ux", groups="x u", free="x")
    out = s.amgu(V["x"], Struct("f", (Struct("a"),)))
    assert pair_names(out.pair) == (set(), {"u"})
    assert out.free == frozenset()


def test_amgu_falls_through_to_general_case():
    s = cfree("xyz", cliques="yz", groups="x")
    t = t2("f", "y", "z")
    out = s.amgu(V["x"], t)
    assert out.pair == s.pair.amgu(V["x"], t)
    assert pair_names(out.pair) == ({"xyz"}, set())
    assert out.free == frozenset()


def test_amgu_only_t_free_subtracts_t_side():
    # y and its alias w get bound to the non-free x; bystander z keeps f
    s = cfree("wxyz", groups="x wy z", free="wyz")
    out = s.amgu(V["x"], V["y"])
    assert pair_names(out.pair) == (set(), {"wxy", "z"})
    assert free_names(out.free) == {"z"}


def test_amgu_linear_case_stars_only_the_t_side():
    # x = f(y, z) with y, z each in two groups but never together: the
    # closure lands on the t side, the x side joins once
    s = cfree("wxyz", groups="x y z wy", free="")
    out = s.amgu(V["x"], t2("f", "y", "z"))
    assert out.pair == s._amgu_linear(V["x"], t2("f", "y", "z"))
    assert state_linear(t2("f", "y", "z"), s.pair)


def test_plain_amgu_matches_embedding():
    rng = random.Random(71)
    vs = [V[c] for c in "wxyz"]
    for _ in range(300):
        base = random_cpair(rng, "wxyz", max_cliques=0, max_groups=6)
        f = occurring_free(rng, base)
        shf = SharingFreeness(base.sh, f)
        csf = CliqueSharingFreeness(base, f)
        x = rng.choice(vs)
        t = random_term(rng, vs)
        out_plain = shf.amgu(x, t)
        out_clique = csf.amgu(x, t)
        assert not out_clique.pair.cl.groups
        assert out_plain.sh == out_clique.pair.sh
        assert out_plain.free == out_clique.free


def test_plain_amgu_examples():
    out = sfree("xyz", groups="x y z", free="xy").amgu(V["x"], V["y"])
    assert names(out.sh) == {"xy", "z"}
    assert free_names(out.free) == {"x", "y"}

    out = sfree("ux", groups="x u", free="x").amgu(V["x"], Struct("f", (Struct("a"),)))
    assert names(out.sh) == {"u"}
    assert out.free == frozenset()

    s = sfree("xy", groups="x y")
    t = t2("f", "y", "y")
    assert s.amgu(V["x"], t).sh == s.sh.amgu(V["x"], t)


def test_project_keeps_goal_freeness():
    s = cfree("xy", cliques="xy", free="xy")
    out = s.project(atom("p", "xy", "x"))
    assert pair_names(out.pair) == ({"x"}, set())
    assert free_names(out.free) == {"x"}


def test_project_drops_cliques_outside_goal():
    s = cfree("xyz", cliques="xy", groups="z", free="z")
    out = s.project(atom("p", "xyz", "z"))
    assert pair_names(out.pair) == (set(), {"z"})
    assert free_names(out.free) == {"z"}


def test_augment_new_vars_are_free():
    out = cfree("").augment(atom("p", "u", "u"))
    assert pair_names(out.pair) == (set(), {"u"})
    assert free_names(out.free) == {"u"}
    with pytest.raises(ContractError):
        cfree("xy", groups="x").augment(atom("p", "xy", "x"))


def test_extend_plain_keeps_free_var_reaching_only_free_goal_vars():
    call = sfree("xy", groups="xy", free="xy")
    prime = sfree("x", groups="x", free="x")
    out = call.extend(atom("p", "xy", "x"), prime)
    assert names(out.sh) == {"xy"}
    assert free_names(out.free) == {"x", "y"}


def test_extend_plain_drops_free_var_reaching_bound_goal_vars():
    call = sfree("xy", groups="xy", free="y")
    prime = sfree("x", groups="x", free="")
    out = call.extend(atom("p", "xy", "x"), prime)
    assert names(out.sh) == {"xy"}
    assert out.free == frozenset()


def test_extend_plain_unshared_var_stays_free():
    call = sfree("xy", groups="x y", free="y")
    prime = sfree("x", groups="", free="")
    out = call.extend(atom("p", "xy", "x"), prime)
    assert names(out.sh) == {"y"}
    assert free_names(out.free) == {"y"}


def test_extend_clique_worked_instance_with_empty_freeness():
    call = cfree("uvxyz", cliques="xyz", groups="u v")
    prime = cfree("uvx", cliques="x", groups="uv")
    out = call.extend(atom("p", "uvxyz", "xuv"), prime)
    assert pair_names(out.pair) == ({"xyz"}, {"uv", "uvy", "uvyz", "uvz"})
    assert out.free == frozenset()


def test_extend_clique_mirrors_plain_through_embedding():
    call = cfree("xy", groups="xy", free="xy")
    prime = cfree("x", groups="x", free="x")
    out = call.extend(atom("p", "xy", "x"), prime)
    assert pair_names(out.pair) == (set(), {"xy"})
    assert free_names(out.free) == {"x", "y"}


def test_extend_clique_branch_blocks_freeness():
    call = cfree("xy", cliques="xy", free="y")
    prime = cfree("x", cliques="x", free="")
    out = call.extend(atom("p", "xy", "x"), prime)
    assert pair_names(out.pair) == ({"xy"}, set())
    assert out.free == frozenset()


def test_extend_clique_branch_admits_freeness():
    call = cfree("xy", cliques="xy", free="y")
    prime = cfree("x", cliques="x", free="x")
    out = call.extend(atom("p", "xy", "x"), prime)
    assert free_names(out.free) == {"x", "y"}


def test_extend_freeness_never_exceeds_inputs():
    rng = random.Random(73)
    g = atom("p", "vwxyz", "xy")
    for _ in range(200):
        callp = random_cpair(rng, "vwxyz", max_cliques=2, max_groups=5)
        primep = normalize(random_cpair(rng, "xy", max_cliques=1, max_groups=3))
        call = CliqueSharingFreeness(callp, occurring_free(rng, callp))
        prime = CliqueSharingFreeness(primep, occurring_free(rng, primep))
        out = call.extend(g, prime)
        assert out.free <= call.free | prime.free


def test_extend_clique_sound_vs_plain_on_expansions():
    rng = random.Random(79)
    g = atom("p", "vwxyz", "xy")
    for _ in range(300):
        callp = random_cpair(rng, "vwxyz", max_cliques=2, max_groups=5)
        primep = normalize(random_cpair(rng, "xy", max_cliques=1, max_groups=3))
        f1 = occurring_free(rng, callp)
        f2 = occurring_free(rng, primep)
        out = CliqueSharingFreeness(callp, f1).extend(g, CliqueSharingFreeness(primep, f2))
        ref = SharingFreeness(expand(callp), f1).extend(g, SharingFreeness(expand(primep), f2))
        assert groups_of(expand(out.pair)) >= groups_of(ref.sh)
        assert out.free <= ref.free


def test_amgu_free_and_linear_cases_only_prune():
    rng = random.Random(83)
    vs = [V[c] for c in "vwxyz"]
    for _ in range(400):
        p = random_cpair(rng, "vwxyz", max_cliques=2, max_groups=5)
        s = CliqueSharingFreeness(p, occurring_free(rng, p, 0.4))
        x = rng.choice(vs)
        t = random_term(rng, vs)
        out = s.amgu(x, t)
        general = p.amgu(x, t)
        x_free = x in s.free
        t_free = isinstance(t, Var) and t in s.free
        if x_free or t_free or state_linear(t, p):
            assert groups_of(expand(out.pair)) <= groups_of(expand(general))
        else:
            assert out.pair == general


def test_amgu_preserves_hygiene():
    rng = random.Random(89)
    vs = [V[c] for c in "wxyz"]
    for _ in range(300):
        p = random_cpair(rng, "wxyz", max_cliques=2, max_groups=5)
        s = CliqueSharingFreeness(p, occurring_free(rng, p))
        out = s.amgu(rng.choice(vs), random_term(rng, vs))
        assert out.free <= out.pair.occurring_vars()


def test_project_and_augment_preserve_hygiene():
    rng = random.Random(97)
    g = atom("p", "wxyz", "xy")
    fresh = atom("p", "uwxyz", "u")
    for _ in range(200):
        p = random_cpair(rng, "wxyz", max_cliques=2, max_groups=5)
        s = CliqueSharingFreeness(p, occurring_free(rng, p))
        assert s.project(g).free <= s.project(g).pair.occurring_vars()
        augmented = s.augment(fresh)
        assert augmented.free <= augmented.pair.occurring_vars()


def test_lub_intersects_freeness():
    a = cfree("xy", groups="x", free="xy")
    b = cfree("xy", groups="y", free="y")
    out = a.lub(b)
    assert pair_names(out.pair) == (set(), {"x", "y"})
    assert free_names(out.free) == {"y"}


def test_leq_orders_freeness_reversed():
    small = cfree("xy", groups="x", free="xy")
    big = cfree("xy", groups="x y", free="y")
    assert small.leq(big)
    assert not big.leq(small)


def test_plain_lub_and_leq():
    a = sfree("xy", groups="x", free="xy")
    b = sfree("xy", groups="y", free="y")
    assert free_names(a.lub(b).free) == {"y"}
    assert sfree("xy", free="x").leq(sfree("xy"))


def test_drop_unsupported_free():
    s = cfree("xy", groups="x", free="xy")
    assert free_names(s.drop_unsupported_free().free) == {"x"}
    plain = sfree("xy", groups="y", free="xy")
    assert free_names(plain.drop_unsupported_free().free) == {"y"}


def test_free_vars_must_be_in_domain():
    with pytest.raises(ContractError):
        CliqueSharingFreeness(cpair("x"), frozenset({V["z"]}))
    with pytest.raises(ContractError):
        SharingFreeness(SharingSet.empty([V["x"]]), frozenset({V["z"]}))


def test_render():
    assert cfree("xyz", cliques="xy", groups="z", free="x").render() == (
        "(({xy}, {z}), free: {x})"
    )
    assert sfree("xy", groups="xy", free="x").render() == "({xy}, free: {x})"


def test_tops_have_no_freeness():
    vs = [V["x"], V["y"]]
    assert CliqueSharingFreeness.top(vs).free == frozenset()
    assert SharingFreeness.top(vs).free == frozenset()
