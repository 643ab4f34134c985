"""Class conditions for phi(z) = 1 + z + a z^2 with a = m/n.

Everything is decided exactly.  The positivity threshold (2 + sqrt 2)/4 is
irrational, so it is compared through squaring instead of a decimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactalg import as_rational


@dataclass(frozen=True)
class QComplex:
    """A complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __add__(self, other: QComplex) -> QComplex:
        return QComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: QComplex) -> QComplex:
        return QComplex(self.re - other.re, self.im - other.im)

    def __mul__(self, other: QComplex) -> QComplex:
        return QComplex(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __str__(self) -> str:
        return str(self.re) if self.im == 0 else f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


def phi(a: Fraction, z: QComplex) -> QComplex:
    return QComplex(Fraction(1)) + z + QComplex(a) * z * z


@dataclass(frozen=True)
class PhiReport:
    a: Fraction
    univalent: bool
    starlike: bool
    re_positive: bool
    witness: tuple[QComplex, QComplex] | None
    boundary_min: Fraction

    @property
    def maminda_admissible(self) -> bool:
        return self.univalent and self.starlike and self.re_positive


def re_positive(a: object) -> bool:
    """a <= (2 + sqrt 2)/4, decided as 4a <= 2 or (4a - 2)^2 <= 2."""
    a = as_rational(a)
    return 4 * a <= 2 or (4 * a - 2) ** 2 <= 2


def boundary_min(a: object) -> Fraction:
    """min over |z| = 1 of Re phi: a if a <= 1/4, else 1 - a - 1/(8a)."""
    a = as_rational(a)
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if a <= Fraction(1, 4):
        return a
    return 1 - a - 1 / (8 * a)


def univalence_witness(a: Fraction) -> tuple[QComplex, QComplex]:
    """Two distinct disk points with equal phi; needs a > 1/2.

    phi(z1) = phi(z2) iff z1 = z2 or 1 + a(z1 + z2) = 0, so take z1, z2
    symmetric about c = -1/(2a), which lies inside the disk.
    """
    c = -1 / (2 * a)
    if abs(c) >= 1:
        raise ValueError(f"phi is univalent for a = {a}")
    eps = (1 - abs(c)) / 2
    return QComplex(c + eps), QComplex(c - eps)


def check_phi(m: int, n: int) -> PhiReport:
    if isinstance(m, bool) or isinstance(n, bool) or not isinstance(m, int) or not isinstance(n, int):
        raise TypeError("m and n must be integers")
    if m <= 0 or n <= 0:
        raise ValueError(f"m and n must be positive, got ({m}, {n})")
    a = Fraction(m, n)
    univalent = 2 * m <= n
    witness = None if univalent else univalence_witness(a)
    if witness is not None:
        z1, z2 = witness
        assert z1 != z2 and z1.abs2() < 1 and z2.abs2() < 1
        assert phi(a, z1) == phi(a, z2)
    # Re((1 + 2az)/(1 + az)) > 0 on the disk holds exactly when a <= 1/2
    starlike = univalent
    return PhiReport(a, univalent, starlike, re_positive(a), witness, boundary_min(a))
