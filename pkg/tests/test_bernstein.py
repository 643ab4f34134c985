from fractions import Fraction as F

import pytest

from hankelcert.bernstein import (
    BernsteinTensor,
    catalog_ids,
    degree_elevate,
    diff_matrix,
    enclosure,
    golden_matrix,
    subdivide,
    subdivide_axes,
    to_bernstein,
)
from hankelcert.exactalg import Box, MultiPoly, parse_poly

XY = ("x", "y")


def test_univariate_examples():
    b = to_bernstein(parse_poly("x^2", ("x",)), (2,), Box.unit(("x",)))
    assert b.coeffs == (0, 0, 1)
    b = to_bernstein(parse_poly("1 - x", ("x",)), (1,), Box.unit(("x",)))
    assert b.coeffs == (1, 0)


def test_corner_interpolation_and_roundtrip():
    p = parse_poly("3*x^2*y - x*y^2 + 2*y - 1", XY)
    box = Box.parse(XY, "-1:2,0:1/3")
    b = to_bernstein(p, (2, 2), box)
    for corner, value in b.corner_values().items():
        assert value == p.eval(corner)
    assert b.to_poly() == p
    assert b.evaluate((F(1, 2), F(1, 7))) == p(F(1, 2), F(1, 7))


def test_subdivision_equals_direct_conversion():
    p = parse_poly("x^3 - 2*x*y + y^2*x", XY)
    b = to_bernstein(p, (3, 2), Box.unit(XY))
    for child in subdivide_axes(b):
        assert child == to_bernstein(p, (3, 2), child.box)
    left, right = subdivide(b, 1)
    assert left.box.hi()[1] == F(1, 2) and right.box.lo()[1] == F(1, 2)


def test_elevation_keeps_polynomial_and_tightens():
    p = parse_poly("x - x^2", ("x",))
    b = to_bernstein(p, (2,), Box.unit(("x",)))
    e = degree_elevate(b, 0)
    assert e.degrees == (3,) and e.to_poly() == p
    assert enclosure(e)[1] <= enclosure(b)[1]


def test_degree_too_low_is_rejected():
    with pytest.raises(ValueError):
        to_bernstein(parse_poly("x^3", ("x",)), (2,), Box.unit(("x",)))


def test_json_roundtrip():
    b = to_bernstein(parse_poly("x*y + 1/3", XY), (1, 1), Box.unit(XY))
    assert BernsteinTensor.from_json(b.to_json(), XY) == b


def test_catalog_has_all_golden_ids():
    ids = catalog_ids()
    assert len(ids) == 38 and ids[:2] == ["b0", "bhalf"]
    for i in ids:
        assert golden_matrix(i)


def test_diff_matrix_reports_entries():
    g = golden_matrix("b0")
    bad = [row[:] for row in g]
    bad[1][1] += 1
    diff = diff_matrix(bad, g)
    assert diff == [{"index": [1, 1], "computed": "125/2", "golden": "123/2"}]
