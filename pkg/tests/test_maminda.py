import math
from fractions import Fraction as F

import pytest

from hankelcert.maminda import QComplex, boundary_min, check_phi, phi, re_positive


def test_truth_table_examples():
    r = check_phi(1, 2)
    assert r.univalent and r.starlike and r.re_positive and r.maminda_admissible
    r = check_phi(1, 1)
    assert not r.univalent and r.witness is not None
    z1, z2 = r.witness
    assert z1 + z2 == QComplex(F(-1)) and phi(r.a, z1) == phi(r.a, z2)
    r = check_phi(4, 5)
    assert not r.univalent and r.re_positive and not r.maminda_admissible


def test_errors():
    with pytest.raises(ValueError):
        check_phi(0, 1)
    with pytest.raises(ValueError):
        boundary_min(0)


def test_boundary_min_examples():
    assert boundary_min(F(1, 5)) == F(1, 5)
    assert boundary_min(F(1, 2)) == F(1, 4)
    assert boundary_min(F(85, 100)) > 0 > boundary_min(F(86, 100))


def test_re_positive_threshold():
    assert re_positive(F(85, 100)) and not re_positive(F(86, 100))
    assert re_positive(F(1, 2))


def test_starlike_sampled_on_boundary():
    # Re((1+2az)/(1+az)) on |z| = 1 stays positive for a <= 1/2
    for a in (F(1, 3), F(1, 2)):
        for k in range(721):
            th = math.pi * k / 720
            z = complex(math.cos(th), math.sin(th))
            assert ((1 + 2 * float(a) * z) / (1 + float(a) * z)).real > -1e-12
