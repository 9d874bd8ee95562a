from fractions import Fraction

import pytest

from twisted_strata import A0, AmbientSpace, Decoration, TwistedGraph, fundamental_class, kappa_class, \
    make_class, psi_class
from twisted_strata.expr import ExprError, parse, parse_class_expr

from conftest import loop


def test_precedence():
    assert parse("1+2*3") == ("add", ("num", 1), ("mul", ("num", 2), ("num", 3)))
    assert parse("-psi(1)^2") == ("neg", ("pow", ("psi", "1"), 2))
    assert parse("1-2-3") == ("sub", ("sub", ("num", 1), ("num", 2)), ("num", 3))


def test_values(m11):
    assert not parse_class_expr("psi(1)-psi(1)", m11)
    assert parse_class_expr("2*psi(1)^2 / 4", m11) == psi_class(m11, "1", 2) / 2
    assert parse_class_expr("3", m11) == fundamental_class(m11) * 3
    assert parse_class_expr("(psi(1)+kappa(1))*1", m11) == psi_class(m11, "1") + kappa_class(m11, 1)


@pytest.mark.parametrize("text,pos", [("psi(1) $ 2", 7), ("psi(1", 5), ("kappa(x)", 6), ("psi(1)^x", 7)])
def test_error_positions(m11, text, pos):
    with pytest.raises(ExprError) as info:
        parse_class_expr(text, m11)
    assert info.value.pos == pos
    assert "^" in str(info.value)


def test_semantic_errors(m11):
    for text in ("psi(7)", "B", "psi(1)/psi(1)", "1/0"):
        with pytest.raises(ExprError):
            parse_class_expr(text, m11)


def test_bound_graph_is_a_class(m11):
    B = loop(2)
    L = make_class(B, Decoration(), m11)
    assert parse_class_expr("B*B", m11, {"B": B}) == L * L


def test_pushglue_and_pushforget(m11):
    amb = AmbientSpace(0, (("1", 1), ("2", 1)), A0.one)
    sk = TwistedGraph.build([(0, A0.one), (0, A0.one)], {"1": 0, "2": 1}, [(0, 1, 2)])
    assert parse_class_expr("pushglue(S, 1, 1)", amb, {"S": sk}) == make_class(sk, Decoration(), amb, Fraction(1, 2))
    with pytest.raises(ExprError):
        parse_class_expr("pushglue(S, 1)", amb, {"S": sk})
    assert parse_class_expr("pushforget(psi(p)^2, p)", m11) == kappa_class(m11, 1)
