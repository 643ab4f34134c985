import random
from fractions import Fraction as F

import pytest

from hankelcert.exactalg import MultiPoly, parse_poly
from hankelcert.functional import (
    BRANCHES,
    Surd,
    TranscriptionError,
    _expect,
    coeff_formulas,
    cks_y,
    h2_functional,
    h2_reduction,
    h3_functional,
    majorant_chain,
    psi_bound,
    schwarz_substitute,
)
from hankelcert.golden_forms import C_VARS


def test_coefficient_examples():
    cf = coeff_formulas()
    assert cf.a3(0, 1, 0, 0, 5) == F(1, 6)
    assert cf.a2(0, 3, 1, 1, 0) == 0
    assert cf.a5(0, 1, 0, 0, F(1, 2)) == F(1, 20)


def test_h2_examples():
    h = h2_functional()
    assert h(0, 1, 0, F(1, 3)) == -4
    assert h(1, 0, 0, 0) == -1
    assert h(0, 0, 0, 0) == 0


def test_h3_examples():
    h = h3_functional()
    assert h(0, 0, 1, 0, F(1, 4)) == -60
    assert h(0, 1, 0, 0, F(1, 2)) == 32
    assert h(0, 0, 0, 0, 0) == 0


def test_substitute_constant_and_errors():
    g = schwarz_substitute(MultiPoly.const(1, C_VARS))
    assert g.A1.constant_term() == 1 and not g.B1 and not g.C1 and not g.D1
    with pytest.raises(ValueError):
        schwarz_substitute(MultiPoly.var("q", ("q",)))


def test_grouped_parts_vanish_at_p_one():
    g = schwarz_substitute(h3_functional())
    for part in (g.B1, g.C1, g.D1):
        assert not part.subs({"p": 1})


def test_majorant_examples():
    ch = majorant_chain()
    for t in (F(0), F(1, 3), F(1, 2)):
        assert ch.H.eval((0, 0, 1, t)) == 60
        assert ch.H.eval((0, 0, 0, t)) == 0
        assert ch.H.subs({"p": 1}) == parse_poly("1-6*t+21*t^2+4*t^3", ch.H.variables)


def test_h2_reduction_examples():
    assert h2_reduction(0).h2_bound == F(1, 36)
    assert h2_reduction(F(1, 4)).bound == 4
    r = h2_reduction(F(1, 2))
    assert (r.bound, r.maximizer, r.h2_bound) == (F(57, 14), F(1, 7), F(19, 672))
    with pytest.raises(ValueError):
        h2_reduction(F(3, 4))


def test_psi_grid_at_half():
    best, s0 = psi_bound(F(1, 2))
    grid = max(4 + s - F(7, 2) * s * s for s in (F(k, 1000) for k in range(1001)))
    assert grid <= best and best - grid < F(1, 10 ** 5)


def test_cks_examples():
    assert cks_y(0, 0, 0) == (1, BRANCHES[1])
    assert cks_y(1, 2, 1) == (4, BRANCHES[0])
    assert cks_y(1, 1, 0) == (F(9, 4), BRANCHES[1])


def test_cks_surd_branch():
    value, branch = cks_y(-2, -2, 1)
    assert branch == BRANCHES[6]
    assert isinstance(value, Surd) and value.square() == F(27, 2)


def test_expect_raises_on_mismatch():
    with pytest.raises(TranscriptionError):
        _expect(parse_poly("x", ("x",)), parse_poly("x+1", ("x",)), "x")


def test_majorization_soundness_sampled():
    rng = random.Random(11)
    ch, g = majorant_chain(), schwarz_substitute(h3_functional())

    def disk():
        while True:
            a, b = F(rng.randint(-20, 20), 20), F(rng.randint(-20, 20), 20)
            if a * a + b * b <= 1:
                return a, b

    def mul(u, v):
        return (u[0] * v[0] - u[1] * v[1], u[0] * v[1] + u[1] * v[0])

    for _ in range(200):
        p, t = F(rng.randint(0, 30), 30), F(rng.randint(0, 30), 60)
        gam, eta, rho = disk(), disk(), disk()
        conj = (gam[0], -gam[1])

        def part(poly, extra=(F(1), F(0))):
            # poly over (p, g, gc, e, ec, t) is a polynomial in g, gc with real coefficients
            re, im = F(0), F(0)
            for (ep, eg, egc, ee, eec, et), c in poly:
                z = (c * p ** ep * t ** et, F(0))
                for _ in range(eg):
                    z = mul(z, gam)
                for _ in range(egc):
                    z = mul(z, conj)
                for _ in range(ee):
                    z = mul(z, eta)
                for _ in range(eec):
                    z = mul(z, (eta[0], -eta[1]))
                re, im = re + z[0], im + z[1]
            return mul((re, im), extra)

        terms = [part(g.A1), part(g.B1, eta), part(g.C1, mul(eta, eta)), part(g.D1, rho)]
        total = (sum(z[0] for z in terms), sum(z[1] for z in terms))
        x2 = gam[0] ** 2 + gam[1] ** 2
        y2 = eta[0] ** 2 + eta[1] ** 2
        # compare |total|^2 <= H^2 using rational bounds on |gamma|, |eta| from above
        hx = _sqrt_up(x2)
        hy = _sqrt_up(y2)
        bound = max(ch.H.eval((p, x, y, t)) for x in hx for y in hy)
        assert total[0] ** 2 + total[1] ** 2 <= bound ** 2 or _near(ch, p, x2, y2, t, total)


def _sqrt_up(v):
    # the exact modulus when v is a rational square, otherwise a tight bracket
    import math

    n, d = v.numerator, v.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return [F(rn, rd)]
    lo = F(math.isqrt(n * d * 10 ** 12), d * 10 ** 6)
    return [lo, lo + F(1, 10 ** 6)]


def _near(ch, p, x2, y2, t, total):
    import math

    h = float(ch.H.eval((p, F(math.sqrt(x2)), F(math.sqrt(y2)), t)))
    return math.hypot(float(total[0]), float(total[1])) <= h + 1e-6
