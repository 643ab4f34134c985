"""Truncated power series for the subordination ODE and the extremal integrals.

Coefficients may be Fractions or :class:`~hankelcert.exactalg.MultiPoly`
values; the same recurrences then give numbers or symbolic coefficient
formulas.  Every operation states its truncation order explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence, Union

from .exactalg import MultiPoly, as_rational

Coeff = Union[Fraction, MultiPoly]


def _ring_template(values: Sequence[object]) -> MultiPoly | None:
    for v in values:
        if isinstance(v, MultiPoly):
            return v
    return None


def _lift(value: object, template: MultiPoly | None) -> Coeff:
    if isinstance(value, MultiPoly):
        if template is not None and value.variables != template.variables:
            raise ValueError(f"mixed variable lists {value.variables} and {template.variables}")
        return value
    q = as_rational(value)
    return MultiPoly.const(q, template.variables) if template is not None else q


class TruncatedSeries:
    """Power series c_0 + c_1 z + ... + c_{N-1} z^{N-1} modulo z^N."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[object], order: int | None = None):
        order = len(coeffs) if order is None else order
        if order < 0:
            raise ValueError("order must be non-negative")
        vals = list(coeffs[:order]) + [0] * max(0, order - len(coeffs))
        template = _ring_template(vals)
        self.coeffs: tuple[Coeff, ...] = tuple(_lift(v, template) for v in vals)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Coeff:
        return self.coeffs[k]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self) -> str:
        return f"TruncatedSeries({list(self.coeffs)!r})"

    def _zero(self) -> Coeff:
        return _lift(0, _ring_template(self.coeffs))

    def _pair(self, other: TruncatedSeries) -> tuple[list[Coeff], list[Coeff], int]:
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")
        template = _ring_template(self.coeffs + other.coeffs)
        a = [_lift(c, template) for c in self.coeffs]
        b = [_lift(c, template) for c in other.coeffs]
        return a, b, self.order

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        a, b, n = self._pair(other)
        return TruncatedSeries([x + y for x, y in zip(a, b)], n)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        a, b, n = self._pair(other)
        return TruncatedSeries([x - y for x, y in zip(a, b)], n)

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def __mul__(self, other: object) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([c * other for c in self.coeffs], self.order)
        a, b, n = self._pair(other)
        out = []
        for k in range(n):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return TruncatedSeries(out, n)

    __rmul__ = __mul__

    def truncate(self, order: int) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs, order)

    def shift_down(self) -> TruncatedSeries:
        """Divide by z; requires a zero constant term.  Order drops by one."""
        if self.coeffs and self.coeffs[0] != 0:
            raise ValueError("series has a nonzero constant term and is not divisible by z")
        return TruncatedSeries(self.coeffs[1:], self.order - 1)

    def integrate(self) -> TruncatedSeries:
        """Antiderivative with zero constant term; order grows by one."""
        return TruncatedSeries([self._zero()] + [c / (k + 1) for k, c in enumerate(self.coeffs)], self.order + 1)

    def derivative(self) -> TruncatedSeries:
        return TruncatedSeries([c * k for k, c in enumerate(self.coeffs)][1:], self.order - 1)

    def exp(self) -> TruncatedSeries:
        """exp(S) for S(0) = 0 via n E_n = sum_k k S_k E_{n-k}."""
        if self.order == 0:
            return self
        if self.coeffs[0] != 0:
            raise ValueError("exp requires a zero constant term")
        s = self.coeffs
        e: list[Coeff] = [_lift(1, _ring_template(s))]
        for n in range(1, self.order):
            acc = self._zero()
            for k in range(1, n + 1):
                if s[k] != 0:
                    acc = acc + s[k] * e[n - k] * k
            e.append(acc / n)
        return TruncatedSeries(e, self.order)

    def reciprocal(self) -> TruncatedSeries:
        """1/S for a series with constant term 1."""
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("reciprocal implemented for constant term 1 only")
        inv: list[Coeff] = [self.coeffs[0]]
        for n in range(1, self.order):
            acc = self._zero()
            for k in range(1, n + 1):
                acc = acc - self.coeffs[k] * inv[n - k]
            inv.append(acc)
        return TruncatedSeries(inv, self.order)


def series_ops(a: TruncatedSeries, b: TruncatedSeries | None, op: str) -> TruncatedSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "integrate":
        return a.integrate()
    if op == "exp":
        return a.exp()
    raise ValueError(f"unknown series operation {op!r}")


# -- Schwarz functions -------------------------------------------------------------


@dataclass(frozen=True)
class SchwarzSpec:
    """monomial(k): w = z^k; blaschke(x): w = z (x - z)/(1 - x z); explicit: w = sum c_k z^k."""

    kind: str
    k: int = 0
    x: object = None
    coeffs: tuple = ()

    @classmethod
    def monomial(cls, k: int) -> SchwarzSpec:
        return cls("monomial", k=k)

    @classmethod
    def blaschke(cls, x: object) -> SchwarzSpec:
        return cls("blaschke", x=x)

    @classmethod
    def explicit(cls, coeffs: Sequence[object]) -> SchwarzSpec:
        return cls("explicit", coeffs=tuple(coeffs))


def schwarz_series(spec: SchwarzSpec, N: int) -> TruncatedSeries:
    if N < 2:
        raise ValueError("N must be >= 2")
    if spec.kind == "monomial":
        if spec.k < 1:
            raise ValueError("monomial Schwarz function needs k >= 1")
        return TruncatedSeries([1 if i == spec.k else 0 for i in range(N)], N)
    if spec.kind == "blaschke":
        x = spec.x
        if not isinstance(x, MultiPoly):
            x = as_rational(x)
            if not 0 <= x <= 1:
                raise ValueError(f"blaschke parameter must lie in [0, 1], got {x}")
        powers = [x ** 0 if not isinstance(x, MultiPoly) else MultiPoly.const(1, x.variables)]
        for _ in range(N):
            powers.append(powers[-1] * x)
        coeffs: list[object] = [0, x]
        coeffs += [powers[k] - powers[k - 2] for k in range(2, N)]
        return TruncatedSeries(coeffs, N)
    if spec.kind == "explicit":
        cs = list(spec.coeffs)
        if len(cs) > N - 1:
            raise ValueError(f"{len(cs)} coefficients do not fit in order {N}")
        return TruncatedSeries([0] + cs, N)
    raise ValueError(f"unknown Schwarz kind {spec.kind!r}")


def expand_subordinate(w: TruncatedSeries, t: object, N: int) -> list[Coeff]:
    """a_1..a_N of the normalized f with 1 + z f''/f' = 1 + w + t w^2.

    ``w`` must have order >= N; coefficients beyond z^{N-1} cannot affect a_N.
    """
    if N < 5:
        raise ValueError("N must be >= 5")
    if w.order < N:
        raise ValueError(f"Schwarz series has order {w.order}, need at least {N}")
    if w[0] != 0:
        raise ValueError("Schwarz function must vanish at 0")
    w = w.truncate(N)
    rhs = (w + w * w * t).shift_down()  # f''/f', order N-1
    f_prime = rhs.integrate().exp()  # order N
    f = f_prime.integrate()  # order N+1: z^0..z^N
    return list(f.coeffs[1:])


def hankel_from_taylor(a: Sequence[object]) -> tuple[Coeff, Coeff]:
    """(H_2(2), H_3(1)) from a = (a_2, a_3, a_4, a_5, ...) with a_1 = 1."""
    if len(a) < 4:
        raise ValueError("need a_2..a_5")
    template = _ring_template(a[:4])
    a2, a3, a4, a5 = (_lift(v, template) for v in a[:4])
    h2 = a2 * a4 - a3 * a3
    h3 = a3 * h2 - a4 * (a4 - a2 * a3) + a5 * (a3 - a2 * a2)
    return h2, h3


_EXTREMAL_POWER = {"h2_monomial": 2, "h3_monomial": 3}
_EXTREMAL_MIN_ORDER = {"h2_monomial": 8, "h3_monomial": 11}


def extremal_expand(kind: str, t: object, N: int) -> TruncatedSeries:
    """Expansion of f = int_0^z exp(xi^m/m + t xi^{2m}/(2m)) d xi with m = 2 or 3.

    Uses the double sum over exp(A) exp(B), independent of the ODE route.
    """
    if kind not in _EXTREMAL_POWER:
        raise ValueError(f"unknown extremal kind {kind!r}")
    if N < _EXTREMAL_MIN_ORDER[kind]:
        raise ValueError(f"{kind} needs N >= {_EXTREMAL_MIN_ORDER[kind]}")
    m = _EXTREMAL_POWER[kind]
    template = t if isinstance(t, MultiPoly) else None
    tt = _lift(t, template)
    coeffs: list[Coeff] = [_lift(0, template) for _ in range(N)]
    t_pow = _lift(1, template)
    j = 0
    while 2 * m * j + 1 < N:
        k = 0
        while m * k + 2 * m * j + 1 < N:
            deg = m * k + 2 * m * j
            weight = Fraction(1, m ** k * factorial(k) * (2 * m) ** j * factorial(j) * (deg + 1))
            coeffs[deg + 1] = coeffs[deg + 1] + t_pow * weight
            k += 1
        t_pow = t_pow * tt
        j += 1
    return TruncatedSeries(coeffs, N)
