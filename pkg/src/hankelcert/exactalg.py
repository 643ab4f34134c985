"""Exact rationals, sparse multivariate polynomials, boxes and Hankel determinants.

Everything here is exact: scalars are :class:`fractions.Fraction` and a
:class:`MultiPoly` never rounds.  Polynomials carry an explicit ordered list of
variable names; binary operations require identical lists, and callers line
them up with :meth:`MultiPoly.align` first.
"""

from __future__ import annotations

import ast
import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction
Scalar = Union[int, Fraction]
Exponent = tuple[int, ...]


class VariableMismatch(ValueError):
    pass


def as_rational(value: Scalar | str) -> Fraction:
    """Coerce ints, Fractions and "n/d" strings to a Fraction; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class MultiPoly:
    """Sparse polynomial over Q in an ordered list of named variables.

    Terms map exponent tuples to nonzero Fractions and are kept in
    lexicographic exponent order, so ``==`` is structural.  Instances are
    immutable.
    """

    __slots__ = ("_vars", "_terms", "_hash")

    def __init__(self, variables: Iterable[str], terms: Mapping[Exponent, Scalar] | None = None):
        vs = tuple(variables)
        if len(set(vs)) != len(vs):
            raise ValueError(f"repeated variable names in {vs}")
        clean: dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(vs):
                raise ValueError(f"exponent {exp} does not match variables {vs}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = as_rational(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        self._vars = vs
        self._terms = {e: clean[e] for e in sorted(clean) if clean[e]}
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables: Iterable[str]) -> MultiPoly:
        return cls(variables)

    @classmethod
    def const(cls, value: Scalar, variables: Iterable[str]) -> MultiPoly:
        vs = tuple(variables)
        return cls(vs, {(0,) * len(vs): value})

    @classmethod
    def var(cls, name: str, variables: Iterable[str]) -> MultiPoly:
        vs = tuple(variables)
        if name not in vs:
            raise VariableMismatch(f"unknown variable {name!r}; have {vs}")
        return cls(vs, {tuple(int(v == name) for v in vs): 1})

    @classmethod
    def gens(cls, variables: Iterable[str]) -> tuple[MultiPoly, ...]:
        vs = tuple(variables)
        return tuple(cls.var(v, vs) for v in vs)

    # -- basic protocol -----------------------------------------------------

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self._vars == other._vars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._vars, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"MultiPoly({list(self._vars)}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp in sorted(self._terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self._terms[exp]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self._vars, exp) if e
            )
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append(("-" if c < 0 else "+", body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: object) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other._vars != self._vars:
                raise VariableMismatch(f"variable lists differ: {self._vars} vs {other._vars}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly.const(other, self._vars)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other: object) -> MultiPoly:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(self._vars, out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self._vars, {e: -c for e, c in self._terms.items()})

    def __pos__(self) -> MultiPoly:
        return self

    def __sub__(self, other: object) -> MultiPoly:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> MultiPoly:
        return (-self) + other

    def __mul__(self, other: object) -> MultiPoly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly(self._vars, {e: c * other for e, c in self._terms.items()})
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self._vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> MultiPoly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            d = Fraction(other)
            if not d:
                raise ZeroDivisionError("polynomial division by zero")
            return MultiPoly(self._vars, {e: c / d for e, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, n: int) -> MultiPoly:
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.const(1, self._vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- queries ------------------------------------------------------------

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self._vars), Fraction(0))

    def index(self, name: str) -> int:
        try:
            return self._vars.index(name)
        except ValueError:
            raise VariableMismatch(f"unknown variable {name!r}; have {self._vars}") from None

    def degree(self, name: str) -> int:
        i = self.index(name)
        return max((e[i] for e in self._terms), default=0)

    def degrees(self) -> tuple[int, ...]:
        return tuple(self.degree(v) for v in self._vars)

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def coeff(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def active_variables(self) -> tuple[str, ...]:
        return tuple(v for v in self._vars if self.degree(v) > 0)

    # -- evaluation & substitution -------------------------------------------

    def eval(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != len(self._vars):
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {len(self._vars)} variables")
        pt = [as_rational(v) for v in point]
        powers = [_power_table(v, self.degree(n)) for v, n in zip(pt, self._vars)]
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for i, e in enumerate(exp):
                if e:
                    term *= powers[i][e]
            total += term
        return total

    def __call__(self, *point: Scalar) -> Fraction:
        return self.eval(point)

    def subs(self, values: Mapping[str, Scalar]) -> MultiPoly:
        """Fix some variables at rational values; the variable list is unchanged."""
        idx = {self.index(n): as_rational(v) for n, v in values.items()}
        out: dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            e = list(exp)
            for i, v in idx.items():
                c *= v ** e[i]
                e[i] = 0
            key = tuple(e)
            out[key] = out.get(key, Fraction(0)) + c
        return MultiPoly(self._vars, out)

    def subst_affine(self, name: str, scale: Scalar, shift: Scalar) -> MultiPoly:
        """Return r with r(..., u, ...) = self(..., scale*u + shift, ...)."""
        i = self.index(name)
        a, b = as_rational(scale), as_rational(shift)
        n = self.degree(name)
        # (a u + b)^k expanded once per k
        expansions = [[Fraction(1)]]
        for _ in range(n):
            prev = expansions[-1]
            nxt = [Fraction(0)] * (len(prev) + 1)
            for j, c in enumerate(prev):
                nxt[j] += c * b
                nxt[j + 1] += c * a
            expansions.append(nxt)
        out: dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            for j, w in enumerate(expansions[exp[i]]):
                if w:
                    key = exp[:i] + (j,) + exp[i + 1:]
                    out[key] = out.get(key, Fraction(0)) + c * w
        return MultiPoly(self._vars, out)

    def partial(self, name: str, order: int = 1) -> MultiPoly:
        if order < 1:
            raise ValueError("derivative order must be >= 1")
        i = self.index(name)
        out: dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            k = exp[i]
            if k < order:
                continue
            f = 1
            for j in range(order):
                f *= k - j
            out[exp[:i] + (k - order,) + exp[i + 1:]] = c * f
        return MultiPoly(self._vars, out)

    def compose(self, images: Mapping[str, MultiPoly], variables: Iterable[str]) -> MultiPoly:
        """Substitute polynomials for variables; the result lives in ``variables``.

        Variables of ``self`` without an image must also appear in the new
        variable list and are carried across by name.
        """
        vs = tuple(variables)
        gens = []
        for name in self._vars:
            if name in images:
                img = images[name]
                if img.variables != vs:
                    raise VariableMismatch(f"image of {name!r} is over {img.variables}, expected {vs}")
                gens.append(img)
            else:
                gens.append(MultiPoly.var(name, vs))
        cache: list[dict[int, MultiPoly]] = [{0: MultiPoly.const(1, vs), 1: g} for g in gens]

        def power(i: int, k: int) -> MultiPoly:
            table = cache[i]
            if k not in table:
                table[k] = power(i, k - 1) * gens[i]
            return table[k]

        total = MultiPoly.zero(vs)
        for exp, c in self._terms.items():
            term = MultiPoly.const(c, vs)
            for i, k in enumerate(exp):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    def align(self, variables: Iterable[str]) -> MultiPoly:
        """Re-express over another variable list that contains every active variable."""
        vs = tuple(variables)
        missing = [v for v in self.active_variables() if v not in vs]
        if missing:
            raise VariableMismatch(f"variables {missing} are used but absent from {vs}")
        pos = [self._vars.index(v) if v in self._vars else None for v in vs]
        out = {
            tuple(exp[j] if j is not None else 0 for j in pos): c for exp, c in self._terms.items()
        }
        return MultiPoly(vs, out)

    def rename(self, mapping: Mapping[str, str]) -> MultiPoly:
        return MultiPoly(tuple(mapping.get(v, v) for v in self._vars), self._terms)

    def coefficients_in(self, name: str) -> dict[int, MultiPoly]:
        """Split into {k: coefficient of name**k}, coefficients keeping the full variable list."""
        i = self.index(name)
        out: dict[int, dict[Exponent, Fraction]] = {}
        for exp, c in self._terms.items():
            out.setdefault(exp[i], {})[exp[:i] + (0,) + exp[i + 1:]] = c
        return {k: MultiPoly(self._vars, t) for k, t in sorted(out.items())}

    # -- interchange ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vars": list(self._vars),
            "terms": [
                {"e": list(e), "n": str(c.numerator), "d": str(c.denominator)}
                for e, c in self._terms.items()
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> MultiPoly:
        vs = tuple(doc["vars"])
        terms: dict[Exponent, Fraction] = {}
        for t in doc["terms"]:
            e = tuple(t["e"])
            terms[e] = terms.get(e, Fraction(0)) + Fraction(int(t["n"]), int(t.get("d", "1")))
        return cls(vs, terms)

    def canonical_dump(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_dump().encode()).hexdigest()


def _power_table(v: Fraction, n: int) -> list[Fraction]:
    table = [Fraction(1)]
    for _ in range(n):
        table.append(table[-1] * v)
    return table


def poly_arith(lhs: MultiPoly, rhs: MultiPoly, op: str) -> MultiPoly:
    if lhs.variables != rhs.variables:
        raise VariableMismatch(f"variable lists differ: {lhs.variables} vs {rhs.variables}")
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown operation {op!r}")


# -- expression parsing ----------------------------------------------------------

_BINOPS = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul"}


def parse_poly(text: str, variables: Iterable[str]) -> MultiPoly:
    """Parse an arithmetic expression such as ``"3*p^2*(1-x) + 15/4*p^6"``.

    Accepts ``+ - * / ^ **``, integer literals, parentheses, and the given
    variable names.  Division is only allowed by constants.
    """
    vs = tuple(variables)
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def walk(node: ast.AST) -> MultiPoly:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return MultiPoly.const(node.value, vs)
        if isinstance(node, ast.Name):
            return MultiPoly.var(node.id, vs)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = walk(node.operand)
            return -inner if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if type(node.op) in _BINOPS:
                return poly_arith(left, right, _BINOPS[type(node.op)])
            if isinstance(node.op, ast.Div):
                if not right.is_constant() or not right:
                    raise ValueError("division only by nonzero constants")
                return left / right.constant_term()
            if isinstance(node.op, ast.Pow):
                if not right.is_constant() or right.constant_term().denominator != 1:
                    raise ValueError("exponents must be integer constants")
                return left ** int(right.constant_term())
        raise ValueError(f"unsupported syntax in polynomial: {ast.dump(node)}")

    return walk(tree)


# -- boxes -----------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with rational endpoints, one closed interval per named variable."""

    names: tuple[str, ...]
    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        ivs = tuple((as_rational(lo), as_rational(hi)) for lo, hi in self.intervals)
        if len(ivs) != len(self.names):
            raise ValueError("one interval per variable is required")
        for name, (lo, hi) in zip(self.names, ivs):
            if lo > hi:
                raise ValueError(f"empty interval for {name}: [{lo}, {hi}]")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def of(cls, **bounds: tuple[Scalar | str, Scalar | str]) -> Box:
        return cls(tuple(bounds), tuple((as_rational(lo), as_rational(hi)) for lo, hi in bounds.values()))

    @classmethod
    def unit(cls, names: Iterable[str]) -> Box:
        ns = tuple(names)
        return cls(ns, tuple((Fraction(0), Fraction(1)) for _ in ns))

    @classmethod
    def parse(cls, names: Iterable[str], spec: str) -> Box:
        """Parse ``"0:1,0:1/2"`` (one ``lo:hi`` per variable, comma separated)."""
        ns = tuple(names)
        parts = [s for s in spec.split(",") if s.strip()]
        if len(parts) != len(ns):
            raise ValueError(f"box spec {spec!r} needs {len(ns)} intervals")
        ivs = []
        for part in parts:
            lo, _, hi = part.partition(":")
            ivs.append((as_rational(lo), as_rational(hi)))
        return cls(ns, tuple(ivs))

    @property
    def dim(self) -> int:
        return len(self.names)

    def lo(self) -> tuple[Fraction, ...]:
        return tuple(lo for lo, _ in self.intervals)

    def hi(self) -> tuple[Fraction, ...]:
        return tuple(hi for _, hi in self.intervals)

    def widths(self) -> tuple[Fraction, ...]:
        return tuple(hi - lo for lo, hi in self.intervals)

    def is_degenerate(self) -> bool:
        return any(lo == hi for lo, hi in self.intervals)

    def contains(self, point: Sequence[Scalar]) -> bool:
        return all(lo <= as_rational(v) <= hi for v, (lo, hi) in zip(point, self.intervals))

    def vertices(self) -> list[tuple[Fraction, ...]]:
        return [tuple(v) for v in product(*self.intervals)]

    def is_vertex(self, point: Sequence[Scalar]) -> bool:
        return len(point) == self.dim and all(
            as_rational(v) in iv for v, iv in zip(point, self.intervals)
        )

    def split(self, axes: Iterable[int] | None = None) -> list[Box]:
        """Midpoint split along the given axes (all by default), children sorted by lower corner."""
        axes = tuple(range(self.dim)) if axes is None else tuple(sorted(set(axes)))
        choices = []
        for i, (lo, hi) in enumerate(self.intervals):
            if i in axes:
                mid = (lo + hi) / 2
                choices.append(((lo, mid), (mid, hi)))
            else:
                choices.append(((lo, hi),))
        children = [Box(self.names, ivs) for ivs in product(*choices)]
        return sorted(children, key=lambda b: b.lo())

    def to_json(self) -> list[list[str]]:
        return [[format_rational(lo), format_rational(hi)] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, names: Iterable[str], doc: Sequence[Sequence[str]]) -> Box:
        return cls(tuple(names), tuple((as_rational(lo), as_rational(hi)) for lo, hi in doc))

    def __str__(self) -> str:
        return " x ".join(f"[{lo}, {hi}]" for lo, hi in self.intervals)


# -- Hankel determinants ---------------------------------------------------------


def bareiss_det(matrix: Sequence[Sequence[Scalar]]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination with row pivoting."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if n == 0:
        return Fraction(1)
    m = [[as_rational(v) for v in row] for row in matrix]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def hankel_matrix(taylor: Sequence[Scalar], q: int, n: int) -> list[list[Fraction]]:
    """(a_{n+i+j}) for 0 <= i, j < q, where ``taylor[k-1]`` is a_k."""
    if q < 1 or n < 1:
        raise ValueError("q and n must be >= 1")
    need = n + 2 * q - 2
    if len(taylor) < need:
        raise ValueError(f"H_{q}({n}) needs a_1..a_{need}, got {len(taylor)} coefficients")
    a = [as_rational(v) for v in taylor]
    return [[a[n + i + j - 1] for j in range(q)] for i in range(q)]


def hankel_det(taylor: Sequence[Scalar], q: int, n: int) -> Fraction:
    return bareiss_det(hankel_matrix(taylor, q, n))
