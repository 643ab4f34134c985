"""Randomized invariants; no published number is involved here."""

from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from hankelcert.bernstein import enclosure, subdivide_axes, to_bernstein
from hankelcert.certify import Policy, certify_max, verify_max
from hankelcert.exactalg import Box, MultiPoly, bareiss_det
from hankelcert.maminda import boundary_min, check_phi
from hankelcert.series import TruncatedSeries

XY = ("x", "y")
small = st.fractions(min_value=-3, max_value=3, max_denominator=7)


@st.composite
def polys(draw, max_deg=4):
    deg = draw(st.integers(2, max_deg))
    terms = {}
    for _ in range(draw(st.integers(1, 8))):
        a = draw(st.integers(0, deg))
        b = draw(st.integers(0, deg - a))
        terms[(a, b)] = draw(small)
    return MultiPoly(XY, terms)


@st.composite
def boxes(draw):
    ivs = []
    for _ in range(2):
        lo = draw(st.fractions(min_value=-2, max_value=2, max_denominator=4))
        w = draw(st.fractions(min_value=F(1, 8), max_value=2, max_denominator=8))
        ivs.append((lo, lo + w))
    return Box(XY, tuple(ivs))


@given(polys(), polys(), polys(), st.tuples(small, small))
def test_ring_laws_and_eval_homomorphism(p, q, r, pt):
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert (p - p).is_constant() and not (p - p)
    assert (p * q).eval(pt) == p.eval(pt) * q.eval(pt)
    assert MultiPoly.from_json(p.to_json()) == p


@settings(max_examples=200, deadline=None)
@given(polys(), boxes(), st.tuples(st.fractions(0, 1, max_denominator=9), st.fractions(0, 1, max_denominator=9)))
def test_bernstein_invariants(p, box, s):
    degs = tuple(max(d, 1) for d in p.degrees())
    b = to_bernstein(p, degs, box)
    lo, hi = enclosure(b)
    point = tuple(l + u * w for l, u, w in zip(box.lo(), s, box.widths()))
    assert lo <= p.eval(point) <= hi
    for corner, value in b.corner_values().items():
        assert value == p.eval(corner)
    for child in subdivide_axes(b):
        clo, chi = enclosure(child)
        assert lo <= clo and chi <= hi
        assert child == to_bernstein(p, degs, child.box)


@settings(max_examples=30, deadline=None)
@given(polys(max_deg=3))
def test_certified_bounds_replay(p):
    box = Box.unit(XY)
    hi = enclosure(to_bernstein(p, p.degrees(), box))[1]
    cert = certify_max(p, box, hi, Policy(max_depth=1))
    assert cert.is_valid()
    assert verify_max(cert, p, hi) <= hi


@given(st.lists(small, min_size=1, max_size=6))
def test_exp_derivative_identity(cs):
    s = TruncatedSeries([0] + cs)
    e = s.exp()
    # (exp S)' = S' exp S
    assert e.derivative() == (s.derivative() * e.truncate(s.order - 1))


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_bareiss_matches_cofactor_expansion(m):
    (a, b, c), (d, e, f), (g, h, i) = m
    assert bareiss_det(m) == a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=F(1, 50), max_value=2, max_denominator=50))
def test_boundary_min_vs_trig_net(a):
    import math

    net = min(1 + math.cos(k * math.pi / 720) + float(a) * math.cos(2 * k * math.pi / 720) for k in range(721))
    exact = boundary_min(a)
    # sampling modulus: the integrand has derivative at most 1 + 2a
    assert float(exact) <= net + 1e-12
    assert net - float(exact) <= (1 + 2 * float(a)) * math.pi / 720
    m, n = a.numerator, a.denominator
    assert (exact > 0) == check_phi(m, n).re_positive


def test_flags_antitone_in_a():
    seen_false = False
    for m in range(1, 40):
        r = check_phi(m, 20)
        if not r.univalent:
            seen_false = True
        assert not (seen_false and (r.univalent or r.starlike))
