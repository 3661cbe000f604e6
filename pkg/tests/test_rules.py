import pytest
from hypothesis import given, strategies as st

from sptree.calculus import BASE_KINDS
from sptree.embed import to_formula
from sptree.prover import models
from sptree.rules import (
    FOUR, J, KIND_CLASS, KINDS, M, PI_MINUS, PI_PLUS, RHO_MINUS, RHO_PLUS, SIGMA, NotApplicable, Rule,
    applicable, apply, enumerate_applicable, four, format_rule, j_rule, lift, m_rule, parse_rule,
    pi_minus, pi_plus, rho_minus, rho_plus, rule_from_json, rule_to_json, sigma, why_not,
)
from sptree.tree import LEAF, height, node_count, positions, replace, subtree, tree, width

from strategies import tree_and_rule, trees

A = tree(["a"], [(0, LEAF)])
B = tree(["b"])
S = tree(["s"], [(1, LEAF)])


def test_kind_classes():
    assert KIND_CLASS[RHO_PLUS] == KIND_CLASS[RHO_MINUS] == "atomic"
    assert KIND_CLASS[SIGMA] == "structural"
    assert KIND_CLASS[PI_PLUS] == "replicative"
    assert KIND_CLASS[PI_MINUS] == KIND_CLASS[FOUR] == "decreasing"
    assert KIND_CLASS[M] == KIND_CLASS[J] == "modal"


@pytest.mark.parametrize("bad", [
    lambda: sigma((), 1, 1),
    lambda: j_rule((), 2, 2),
    lambda: rho_plus((), 0),
    lambda: Rule("tau", (), (1,)),
    lambda: m_rule((), 1, -1),
    lambda: Rule(SIGMA, (), (1,)),
])
def test_invalid_instances(bad):
    with pytest.raises(ValueError):
        bad()


def test_applicable_examples():
    assert applicable(tree([], [(2, tree([], [(2, LEAF)]))]), four((), 1))
    assert not applicable(tree([], [(2, tree(["p"], [(2, LEAF)]))]), four((), 1))
    t = tree([], [(0, A), (1, B)])
    assert not applicable(t, j_rule((), 1, 2))
    assert applicable(t, j_rule((), 2, 1))


@pytest.mark.parametrize("t, r, fragment", [
    (tree([], [(2, tree(["p"], [(2, LEAF)]))]), four((), 1), "4-shape"),
    (tree([], [(2, tree([], [(1, LEAF)]))]), four((), 1), "4-shape"),
    (tree([], [(0, A), (1, B)]), j_rule((), 1, 2), "label ordering"),
    (tree([], [(0, A)]), m_rule((), 1, 0), "label ordering"),
    (tree(["p"]), rho_minus((), 2), "out of range"),
    (tree([], [(0, A)]), pi_plus((3,), 1), "not in the tree"),
])
def test_failures_name_the_condition(t, r, fragment):
    assert fragment in why_not(t, r)
    with pytest.raises(NotApplicable, match=fragment):
        apply(t, r)


def test_apply_examples():
    assert apply(tree([], [(3, tree([], [(3, S)]))]), four((), 1)) == tree([], [(3, S)])
    inner = tree(["d"], [(0, LEAF)])
    assert apply(tree([], [(2, inner), (1, S)]), j_rule((), 1, 2)) == tree([], [(2, tree(["d"], [(0, LEAF), (1, S)]))])
    assert apply(tree(["p"]), rho_plus((), 1)) == tree(["p", "p"])


def test_j_indices_read_against_the_original_list():
    # the moved child may sit before or after the receiving one
    t = tree([], [(0, B), (2, A), (1, S)])
    assert apply(t, j_rule((), 2, 1)) == tree([], [(2, tree(["a"], [(0, LEAF), (0, B)])), (1, S)])
    assert apply(t, j_rule((), 2, 3)) == tree([], [(0, B), (2, tree(["a"], [(0, LEAF), (1, S)]))])


def test_pi_plus_prepends():
    t = tree([], [(0, A), (1, B)])
    assert apply(t, pi_plus((), 2)) == tree([], [(1, B), (0, A), (1, B)])


def test_lift():
    assert lift(four((2,), 2), (3, 1)) == Rule(FOUR, (3, 1, 2), (2,))
    assert lift(sigma((), 1, 2), (2,)) == sigma((2,), 1, 2)


def test_enumerate_examples():
    assert enumerate_applicable(LEAF) == []
    assert enumerate_applicable(tree(["p"])) == [rho_plus((), 1), rho_minus((), 1)]
    t = tree([], [(1, LEAF), (0, LEAF)])
    assert enumerate_applicable(t, {M, J}) == [m_rule((), 1, 0), j_rule((), 1, 2)]


def test_text_format():
    r = j_rule((1, 2), 1, 3)
    assert format_rule(r) == "J@1.2(i=1,j=3)"
    assert str(m_rule((), 2, 0)) == "m@e(i=2,b=0)"
    assert parse_rule("J@1.2(i=1,j=3)") == r
    assert parse_rule("4@e(i=1)") == four((), 1)
    assert parse_rule("m@e(i=2,beta=0)") == m_rule((), 2, 0)
    assert rule_to_json(m_rule((), 2, 0)) == {"kind": "m", "pos": "", "i": 2, "beta": 0}
    with pytest.raises(ValueError):
        parse_rule("sigma@e(i=1)")


@given(tree_and_rule())
def test_text_and_json_roundtrip(tr):
    _, r = tr
    assert parse_rule(format_rule(r)) == r
    assert rule_from_json(rule_to_json(r)) == r


@given(tree_and_rule())
def test_enumerated_rules_apply(tr):
    t, r = tr
    assert applicable(t, r)
    assert apply(t, r) == apply(t, r)


@given(trees(), st.data())
def test_deep_rewriting(t, data):
    k = data.draw(st.sampled_from(positions(t)))
    s = subtree(t, k)
    options = enumerate_applicable(s)
    if options:
        r = data.draw(st.sampled_from(options))
        assert apply(t, lift(r, k)) == replace(t, k, apply(s, r))


@given(tree_and_rule({M, PI_MINUS, FOUR, RHO_PLUS, RHO_MINUS, SIGMA}))
def test_non_increasing_rules(tr):
    t, r = tr
    s = apply(t, r)
    assert width(s) <= width(t) and height(s) <= height(t) and node_count(s) <= node_count(t)


@given(tree_and_rule({PI_PLUS}))
def test_copy_step_metrics(tr):
    t, r = tr
    s = apply(t, r)
    assert node_count(s) <= 2 * node_count(t) - 1
    assert height(s) == height(t)
    assert width(s) <= width(t) + 1


@given(tree_and_rule({J}))
def test_j_step_metrics(tr):
    t, r = tr
    s = apply(t, r)
    assert node_count(s) == node_count(t)
    assert height(s) <= height(t) + 1
    assert width(s) <= width(t) + 1


@given(tree_and_rule({SIGMA}))
def test_sigma_is_an_involution(tr):
    t, r = tr
    assert apply(apply(t, r), r) == t


@given(tree_and_rule(BASE_KINDS))
def test_base_steps_are_sound_in_the_tree_model(tr):
    t, r = tr
    assert models(t, to_formula(apply(t, r)))


def test_all_kinds_listed():
    assert set(KINDS) == set(KIND_CLASS)
