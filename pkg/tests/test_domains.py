"""The dispatch layer the engine drives: tops, unify, builtins, accessors."""

import pytest

from cliquesh.domains import (
    BOTTOM,
    DOMAIN_NAMES,
    AbstractDomain,
    Bottom,
    get_domain,
    is_bottom,
    rename_sharing,
)
from cliquesh.normalize import NormalizePolicy
from cliquesh.oracle import OracleSharingSet
from cliquesh.sharing import MAX_TOP_VARS, SharingSet
from cliquesh.terms import ContractError, Struct, Var
from helpers import (
    atom,
    cfree,
    cpair,
    free_names,
    mkvars,
    names,
    pair_names,
    sfree,
    sharing,
    varset_names,
)


V = mkvars("abcdefghijklmnopqrstuvwxyz")


def test_public_domain_names():
    assert DOMAIN_NAMES == (
        "sharing",
        "sharing-freeness",
        "clique-sharing",
        "clique-sharing-freeness",
    )
    for name in DOMAIN_NAMES:
        assert get_domain(name).name == name


def test_get_domain_rejects_unknown():
    with pytest.raises(ContractError):
        get_domain("pair-sharing")


def test_oracle_domain_is_registered_but_not_public():
    dom = get_domain("sharing-oracle")
    assert dom.carrier is OracleSharingSet
    assert "sharing-oracle" not in DOMAIN_NAMES


def test_domain_flags():
    assert not get_domain("sharing").has_freeness
    assert not get_domain("sharing").has_cliques
    assert get_domain("sharing-freeness").has_freeness
    assert get_domain("clique-sharing").has_cliques
    assert get_domain("clique-sharing-freeness").has_freeness
    assert get_domain("clique-sharing-freeness").has_cliques


def test_bottom():
    assert is_bottom(BOTTOM)
    assert not is_bottom(sharing("x"))
    assert Bottom().render() == "bottom"


def test_sharing_top_with_ground():
    dom = get_domain("sharing")
    top = dom.top([V["x"], V["y"], V["z"]], ground=[V["z"]])
    assert names(top) == {"x", "y", "xy"}


def test_sharing_top_guard():
    dom = get_domain("sharing")
    vs = [Var(i, f"v{i}") for i in range(MAX_TOP_VARS + 1)]
    with pytest.raises(ContractError):
        dom.top(vs)


def test_clique_top_is_one_clique():
    top = get_domain("clique-sharing").top([V["x"], V["y"], V["z"]], ground=[V["z"]])
    assert pair_names(top) == ({"xy"}, set())


def test_freeness_tops_carry_free():
    top = get_domain("sharing-freeness").top([V["x"], V["y"]], free=[V["y"]])
    assert free_names(top.free) == {"y"}
    ctop = get_domain("clique-sharing-freeness").top(
        [V["x"], V["y"]], ground=[V["x"]], free=[V["y"]]
    )
    assert pair_names(ctop.pair) == ({"y"}, set())
    assert free_names(ctop.free) == {"y"}


def test_unify_renames_across_terms():
    dom = get_domain("sharing")
    state = sharing("ab", "a b ab")
    t1 = atom("p", "xy", "xy")
    t2 = atom("p", "ab", "ab")
    out = dom.unify(state, t1, t2)
    assert names(out) == {"x", "y", "xy"}
    assert out.domain == (V["x"], V["y"])


def test_unify_failure_is_bottom():
    dom = get_domain("sharing")
    out = dom.unify(sharing(""), Struct("p", (Struct("a"),)), Struct("p", (Struct("b"),)))
    assert is_bottom(out)


def test_unify_occurs_check_is_bottom():
    dom = get_domain("sharing")
    t1 = Struct("p", (V["x"], V["x"]))
    t2 = Struct("p", (V["a"], Struct("f", (V["a"],))))
    assert is_bottom(dom.unify(sharing("a", "a"), t1, t2))


def test_eq_transfer():
    dom = get_domain("sharing")
    out = dom.eq_transfer(sharing("xyz", "x y z"), V["x"], Struct("f", (V["y"],)))
    assert names(out) == {"xy", "z"}
    assert is_bottom(dom.eq_transfer(sharing(""), Struct("a"), Struct("b")))


def test_eq_transfer_aliasing_pattern():
    dom = get_domain("sharing")
    out = dom.eq_transfer(
        sharing("xyz", "x y z"), V["x"], Struct("f", (V["y"], V["z"]))
    )
    assert names(out) == {"xy", "xz", "xyz"}


def test_ground_transfer():
    dom = get_domain("sharing")
    out = dom.ground_transfer(
        sharing("xyz", "x xy y z"), Struct("f", (V["x"], V["z"]))
    )
    assert names(out) == {"y"}
    gone = dom.ground_transfer(sharing("xyz", "x xy z"), Struct("f", (V["x"], V["z"])))
    assert names(gone) == set()


def test_ground_transfer_on_freeness():
    dom = get_domain("sharing-freeness")
    out = dom.ground_transfer(sfree("xy", groups="x y", free="xy"), V["x"])
    assert names(out.sh) == {"y"}
    assert free_names(dom.sweep(out).free) == {"y"}


def test_rename_sharing_preserves_class_and_groups():
    mapping = {V["x"]: V["a"], V["y"]: V["b"]}
    out = rename_sharing(sharing("xy", "x xy"), mapping)
    assert names(out) == {"a", "ab"}
    lifted = OracleSharingSet.lift(sharing("xy", "xy"))
    assert isinstance(rename_sharing(lifted, mapping), OracleSharingSet)


def test_rename_full_states():
    mapping = {V["x"]: V["a"], V["y"]: V["b"]}
    dom = get_domain("clique-sharing-freeness")
    out = dom.rename(cfree("xy", cliques="xy", free="x"), mapping)
    assert pair_names(out.pair) == ({"ab"}, set())
    assert free_names(out.free) == {"a"}


def test_apply_policy_only_on_clique_domains():
    policy = NormalizePolicy()
    raw = cpair("xy", groups="x y xy")
    dom = get_domain("clique-sharing")
    assert pair_names(dom.apply_policy(raw, "extend", policy)) == ({"xy"}, set())
    assert dom.apply_policy(raw, "lub", policy) == raw
    plain = get_domain("sharing")
    s = sharing("xy", "x y xy")
    assert plain.apply_policy(s, "extend", policy) == s


def test_apply_policy_on_freeness_wrapper():
    dom = get_domain("clique-sharing-freeness")
    state = cfree("xy", groups="x y xy", free="x")
    out = dom.apply_policy(state, "compare", NormalizePolicy())
    assert pair_names(out.pair) == ({"xy"}, set())
    assert free_names(out.free) == {"x"}


def test_sweep_is_identity_without_freeness():
    dom = get_domain("sharing")
    s = sharing("xy", "x")
    assert dom.sweep(s) == s


def test_unify_free_heads_prunes_closure():
    dom = get_domain("clique-sharing")
    state = cpair("ab", groups="a b ab")
    t1 = atom("p", "xy", "xy")
    t2 = atom("p", "ab", "ab")
    out = dom.unify_free_heads(state, t1, t2)
    assert out.leq(dom.unify(state, t1, t2))


def test_unify_free_heads_failure():
    dom = get_domain("clique-sharing")
    out = dom.unify_free_heads(
        cpair(""), Struct("p", (Struct("a"),)), Struct("p", (Struct("b"),))
    )
    assert is_bottom(out)


def test_accessors():
    dom = get_domain("clique-sharing-freeness")
    state = cfree("xyz", cliques="xy", groups="z", free="z")
    assert varset_names(dom.sharing_sets(state)) == {"z"}
    assert varset_names(dom.clique_sets(state)) == {"xy"}
    assert free_names(dom.free_vars(state)) == {"z"}
    assert dom.var_domain(state) == (V["x"], V["y"], V["z"])
    assert dom.group_count(state) == 1
    assert dom.clique_count(state) == 1
    assert dom.size(state) == 2

    plain = get_domain("sharing")
    s = sharing("xy", "x xy")
    assert plain.free_vars(s) is None
    assert plain.clique_sets(s) == frozenset()
    assert plain.size(s) == 2


def test_render_dispatch():
    assert get_domain("sharing").render(sharing("xy", "x")) == "{x}"
    assert get_domain("clique-sharing").render(cpair("xy", cliques="xy")) == (
        "({xy}, {})"
    )


def test_base_class_stubs():
    dom = AbstractDomain()
    with pytest.raises(NotImplementedError):
        dom.top([V["x"]])
    with pytest.raises(NotImplementedError):
        dom.rename(sharing("x"), {})
    with pytest.raises(NotImplementedError):
        dom.sharing_sets(sharing("x"))
