from fractions import Fraction as F

import pytest

from hankelcert.exactalg import MultiPoly, parse_poly
from hankelcert.series import (
    SchwarzSpec,
    TruncatedSeries,
    expand_subordinate,
    extremal_expand,
    hankel_from_taylor,
    schwarz_series,
    series_ops,
)


def test_exp_of_z_is_exponential():
    e = TruncatedSeries([0, 1, 0, 0, 0, 0]).exp()
    assert list(e.coeffs) == [1, 1, F(1, 2), F(1, 6), F(1, 24), F(1, 120)]


def test_exp_requires_zero_constant():
    with pytest.raises(ValueError):
        TruncatedSeries([1, 1]).exp()


def test_ops_and_order_mismatch():
    a = TruncatedSeries([1, 2, 3])
    assert series_ops(a, a, "mul").coeffs == (1, 4, 10)
    assert series_ops(a, None, "integrate").order == 4
    with pytest.raises(ValueError):
        a + TruncatedSeries([1, 2])
    assert (a * TruncatedSeries([1, 2, 3]).reciprocal()).coeffs == (1, 0, 0)


def test_monomial_z2_coefficients():
    a = expand_subordinate(schwarz_series(SchwarzSpec.monomial(2), 7), F(1, 2), 7)
    assert a[:5] == [1, 0, F(1, 6), 0, F(1, 20)]
    assert a[6] == F(1, 84)
    h2, _ = hankel_from_taylor(a[1:])
    assert h2 == -F(1, 36)


def test_monomial_z3_gives_h3_extremal():
    a = expand_subordinate(schwarz_series(SchwarzSpec.monomial(3), 6), F(1, 3), 6)
    assert a[1:5] == [0, 0, F(1, 12), 0]
    _, h3 = hankel_from_taylor(a[1:])
    assert h3 == -F(1, 144)


@pytest.mark.parametrize("t", [F(0), F(1, 5), F(1, 2)])
def test_integral_form_matches_recurrence(t):
    for kind, k, n in (("h2_monomial", 2, 12), ("h3_monomial", 3, 14)):
        closed = extremal_expand(kind, t, n)
        rec = expand_subordinate(schwarz_series(SchwarzSpec.monomial(k), n - 1), t, n - 1)
        assert list(closed.coeffs[1:]) == rec


def test_extremal_expand_values():
    assert extremal_expand("h3_monomial", F(1, 3), 11)[7] == F(1, 63)
    assert extremal_expand("h3_monomial", F(1, 3), 11)[10] == F(1, 405)
    with pytest.raises(ValueError):
        extremal_expand("h3_monomial", 0, 10)


def test_blaschke_symbolic_coefficients():
    x, t = MultiPoly.gens(("x", "t"))
    a = expand_subordinate(schwarz_series(SchwarzSpec.blaschke(x), 5), t, 5)
    assert a[1] == x / 2
    assert a[2] == parse_poly("((1+t)*x^2 + x^2 - 1)/6", ("x", "t"))


def test_schwarz_errors():
    with pytest.raises(ValueError):
        schwarz_series(SchwarzSpec.blaschke(F(3, 2)), 5)
    with pytest.raises(ValueError):
        expand_subordinate(schwarz_series(SchwarzSpec.monomial(2), 4), 0, 5)
    with pytest.raises(ValueError):
        expand_subordinate(TruncatedSeries([1, 1, 0, 0, 0]), 0, 5)
