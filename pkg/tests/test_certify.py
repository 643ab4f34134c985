from fractions import Fraction as F

import pytest

from hankelcert.certify import (
    NonnegLeaf,
    NonnegProd,
    NonnegSum,
    Policy,
    ReplayError,
    certify_max,
    certify_nonneg,
    verify_max,
    verify_nonneg,
    vertex_domination,
)
from hankelcert.exactalg import Box, MultiPoly, parse_poly

XY = ("x", "y")
UNIT = Box.unit(XY)


def test_constant_polynomial_single_leaf():
    cert = certify_max(MultiPoly.const(1, XY), UNIT, 2)
    assert cert.kind == "enclosed" and cert.bound == 1 and cert.is_valid()


def test_threshold_below_value_fails():
    p = parse_poly("x + y", XY)
    cert = certify_max(p, UNIT, F(19, 10), Policy(max_depth=3))
    assert not cert.is_valid()
    assert any(leaf.box.hi() == (1, 1) for leaf in cert.failures())


def test_split_needed_then_closes():
    p = parse_poly("x*(1-x)", ("x",))
    box = Box.unit(("x",))
    assert not certify_max(p, box, F(3, 10), Policy(max_depth=0)).is_valid()
    cert = certify_max(p, box, F(3, 10), Policy(max_depth=2))
    assert cert.is_valid() and cert.kind == "split"
    assert verify_max(cert, p, F(3, 10)) <= F(3, 10)


def test_domination_simple_quadratic():
    p = parse_poly("1 - x^2 - y^2 + x*y/2 + x^3", XY)
    cert = vertex_domination(p, Box.parse(XY, "0:1/4,0:1/4"), (0, 0), 1)
    assert cert.kind == "vertex_dominated"
    rec = cert.detail["record"]
    assert rec["absorbed"][0]["target"] == "p2"


def test_domination_rejects_positive_linear_term():
    p = parse_poly("x - y^2", XY)
    cert = vertex_domination(p, UNIT, (0, 0), 0)
    assert cert.kind == "failed" and "linear" in cert.detail["reason"]


def test_domination_at_upper_corner_by_reflection():
    p = parse_poly("2 - (1-x)^2 - (1-y)^2", XY)
    cert = vertex_domination(p, Box.parse(XY, "1/2:1,1/2:1"), (1, 1), 2)
    assert cert.kind == "vertex_dominated"


def test_domination_requires_two_variables_and_corner():
    with pytest.raises(ValueError):
        vertex_domination(parse_poly("x", ("x",)), Box.unit(("x",)), (0,), 1)
    with pytest.raises(ValueError):
        vertex_domination(parse_poly("x", XY), UNIT, (F(1, 2), 0), 1)


def test_nonneg_tree_and_replay():
    a = NonnegLeaf(parse_poly("x*(1-x)", XY))
    b = NonnegLeaf(parse_poly("(1-2*y)^2", XY))
    tree = NonnegProd((a, NonnegSum((b, NonnegLeaf(parse_poly("y", XY))))))
    cert = certify_nonneg(tree, UNIT)
    assert cert.is_valid() and cert.kind == "factor_nonneg"
    verify_nonneg(cert, tree)


def test_nonneg_leaf_fails_on_negative_polynomial():
    cert = certify_nonneg(NonnegLeaf(parse_poly("x - 1/2", XY)), UNIT, Policy(max_depth=2))
    assert not cert.is_valid()


def test_nonneg_uses_subdivision_fallback():
    # Bernstein coefficients of (x - 1/2)^2 on [0,1] include a negative one
    p = parse_poly("x^2 - x + 1/4 + 1/100", ("x",))
    cert = certify_nonneg(NonnegLeaf(p), Box.unit(("x",)))
    assert cert.is_valid() and cert.kind == "split"


def test_replay_catches_tampering():
    p = parse_poly("x*y", XY)
    cert = certify_max(p, UNIT, 1)
    verify_max(cert, p, 1)
    with pytest.raises(ReplayError):
        verify_max(cert, p + parse_poly("x", XY), 1)


def test_workers_do_not_change_output():
    p = parse_poly("4*x*(1-x)*y*(1-y) + x^3", XY)
    one = certify_max(p, UNIT, F(6, 5), Policy(max_depth=4, workers=1))
    two = certify_max(p, UNIT, F(6, 5), Policy(max_depth=4, workers=2))
    assert one.to_json() == two.to_json()
