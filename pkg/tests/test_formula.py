import pytest
from hypothesis import given

from sptree.formula import (
    TOP, And, Dia, FormulaSyntaxError, Var, big_and, from_json, modal_depth, parse, to_json, to_text,
    variables,
)

from strategies import formulas

p, q = Var("p"), Var("q")


@pytest.mark.parametrize("text, expected", [
    ("<0> p & q", And(Dia(0, p), q)),
    ("T", TOP),
    ("<1>(p & <0> q)", Dia(1, And(p, Dia(0, q)))),
    ("p & q & r", And(And(p, q), Var("r"))),
    ("<2><0>T", Dia(2, Dia(0, TOP))),
    ("  p_1  ", Var("p_1")),
])
def test_parse(text, expected):
    assert parse(text) == expected


@pytest.mark.parametrize("f, text", [
    (And(Dia(0, p), q), "<0> p & q"),
    (TOP, "T"),
    (Dia(2, TOP), "<2> T"),
    (Dia(1, And(p, Dia(0, q))), "<1>(p & <0> q)"),
    (And(p, And(q, TOP)), "p & (q & T)"),
])
def test_print(f, text):
    assert to_text(f) == text


@pytest.mark.parametrize("f, depth", [
    (TOP, 0),
    (Dia(1, Dia(0, p)), 2),
    (And(Dia(0, p), q), 1),
])
def test_modal_depth(f, depth):
    assert modal_depth(f) == depth


def test_big_and():
    assert big_and([]) == TOP
    assert big_and([p]) == And(p, TOP)
    assert big_and([p, q]) == And(p, And(q, TOP))


@pytest.mark.parametrize("text, offset", [
    ("p &", 3),
    ("<a> p", 0),
    ("(p", 2),
    ("p q", 2),
    ("", 0),
])
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert info.value.pos == offset


def test_variables():
    assert variables(parse("<0>(p & q) & p & T")) == {"p", "q"}


@given(formulas())
def test_print_parse_roundtrip(f):
    assert parse(to_text(f)) == f


@given(formulas())
def test_json_roundtrip(f):
    assert from_json(to_json(f)) == f


@given(formulas(), formulas(), formulas())
def test_modal_depth_of_big_and_is_max(a, b, c):
    assert modal_depth(big_and([a, b, c])) == max(map(modal_depth, (a, b, c)))
