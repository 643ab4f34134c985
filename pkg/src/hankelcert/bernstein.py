"""Exact tensor-product Bernstein forms on rational boxes.

A :class:`BernsteinTensor` stores the coefficients b_I of a polynomial in the
basis prod_k C(n_k, i_k) s_k^i_k (1 - s_k)^(n_k - i_k), where s is the
box-normalized coordinate.  The min and max coefficient enclose the range of
the polynomial on the box, and de Casteljau midpoint splits refine them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable, Iterator, Sequence

from .exactalg import Box, MultiPoly, as_rational, format_rational

Index = tuple[int, ...]


def _strides(shape: Sequence[int]) -> tuple[int, ...]:
    out = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        out[i] = out[i + 1] * shape[i + 1]
    return tuple(out)


def _map_fibers(
    flat: Sequence[Fraction],
    shape: Sequence[int],
    axis: int,
    fn: Callable[[list[Fraction]], list[Fraction]],
    new_len: int | None = None,
) -> list[Fraction]:
    """Apply ``fn`` to every 1-D fiber along ``axis`` of a row-major tensor."""
    new_len = shape[axis] if new_len is None else new_len
    new_shape = list(shape)
    new_shape[axis] = new_len
    src_strides = _strides(shape)
    dst_strides = _strides(new_shape)
    out = [Fraction(0)] * (len(flat) // shape[axis] * new_len)
    others = [range(n) if i != axis else range(1) for i, n in enumerate(shape)]
    for idx in product(*others):
        src_base = sum(i * s for i, s in zip(idx, src_strides))
        dst_base = sum(i * s for i, s in zip(idx, dst_strides))
        fiber = [flat[src_base + k * src_strides[axis]] for k in range(shape[axis])]
        for k, v in enumerate(fn(fiber)):
            out[dst_base + k * dst_strides[axis]] = v
    return out


def _power_to_bernstein(a: list[Fraction]) -> list[Fraction]:
    n = len(a) - 1
    return [
        sum((a[k] * Fraction(comb(i, k), comb(n, k)) for k in range(i + 1)), Fraction(0))
        for i in range(n + 1)
    ]


def _bernstein_to_power(b: list[Fraction]) -> list[Fraction]:
    n = len(b) - 1
    return [
        sum(
            (b[i] * comb(n, i) * comb(n - i, k - i) * (-1) ** (k - i) for i in range(k + 1)),
            Fraction(0),
        )
        for k in range(n + 1)
    ]


def _casteljau_split(b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    left, right = [b[0]], [b[-1]]
    row = list(b)
    while len(row) > 1:
        row = [(u + v) / 2 for u, v in zip(row, row[1:])]
        left.append(row[0])
        right.append(row[-1])
    return left, right[::-1]


def _casteljau_eval(b: list[Fraction], s: Fraction) -> Fraction:
    row = list(b)
    while len(row) > 1:
        row = [(1 - s) * u + s * v for u, v in zip(row, row[1:])]
    return row[0]


def _elevate(b: list[Fraction]) -> list[Fraction]:
    n = len(b) - 1
    out = [b[0]]
    for i in range(1, n + 1):
        w = Fraction(i, n + 1)
        out.append(w * b[i - 1] + (1 - w) * b[i])
    out.append(b[n])
    return out


@dataclass(frozen=True)
class BernsteinTensor:
    degrees: tuple[int, ...]
    box: Box
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.degrees) != self.box.dim:
            raise ValueError("one degree per box axis is required")
        expected = 1
        for n in self.degrees:
            expected *= n + 1
        if len(self.coeffs) != expected:
            raise ValueError(f"expected {expected} coefficients, got {len(self.coeffs)}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.degrees)

    def indices(self) -> Iterator[Index]:
        return product(*(range(n + 1) for n in self.degrees))

    def __getitem__(self, index: Sequence[int]) -> Fraction:
        strides = _strides(self.shape)
        return self.coeffs[sum(i * s for i, s in zip(index, strides))]

    def items(self) -> Iterator[tuple[Index, Fraction]]:
        return zip(self.indices(), self.coeffs)

    def max(self) -> tuple[Fraction, Index]:
        """Largest coefficient and the first multi-index (row-major) attaining it."""
        best = max(self.coeffs)
        return best, next(i for i, c in self.items() if c == best)

    def min(self) -> tuple[Fraction, Index]:
        worst = min(self.coeffs)
        return worst, next(i for i, c in self.items() if c == worst)

    def slice(self, axis: int, k: int) -> list[list[Fraction]] | list[Fraction]:
        """Fix one index; for a 3-D tensor this returns the 2-D matrix B^(k)."""
        picked = [(idx, c) for idx, c in self.items() if idx[axis] == k]
        rest = [n + 1 for i, n in enumerate(self.degrees) if i != axis]
        vals = [c for _, c in picked]
        if len(rest) == 1:
            return vals
        if len(rest) == 2:
            return [vals[r * rest[1]:(r + 1) * rest[1]] for r in range(rest[0])]
        raise ValueError("slice supports tensors of dimension 2 or 3")

    def matrix(self) -> list[list[Fraction]]:
        if len(self.degrees) != 2:
            raise ValueError("matrix() needs a 2-D tensor")
        cols = self.degrees[1] + 1
        return [list(self.coeffs[r * cols:(r + 1) * cols]) for r in range(self.degrees[0] + 1)]

    def corner_values(self) -> dict[tuple[Fraction, ...], Fraction]:
        out = {}
        for corner in product(*((0, n) for n in self.degrees)):
            point = tuple(lo if c == 0 else hi for c, (lo, hi) in zip(corner, self.box.intervals))
            out[point] = self[corner]
        return out

    def evaluate(self, point: Sequence[object]) -> Fraction:
        """Value at a point of the box, by repeated de Casteljau."""
        flat = list(self.coeffs)
        shape = list(self.shape)
        for axis in range(len(shape) - 1, -1, -1):
            lo, hi = self.box.intervals[axis]
            v = as_rational(point[axis])
            s = Fraction(0) if hi == lo else (v - lo) / (hi - lo)
            flat = _map_fibers(flat, shape, axis, lambda f: [_casteljau_eval(f, s)], 1)
            shape[axis] = 1
        return flat[0]

    def to_poly(self) -> MultiPoly:
        """Basis expansion back to a polynomial in the box variables."""
        flat = list(self.coeffs)
        for axis in range(len(self.degrees)):
            flat = _map_fibers(flat, self.shape, axis, _bernstein_to_power)
        poly = MultiPoly(self.box.names, dict(zip(self.indices(), flat)))
        for name, (lo, hi) in zip(self.box.names, self.box.intervals):
            if hi != lo:
                poly = poly.subst_affine(name, 1 / (hi - lo), -lo / (hi - lo))
        return poly

    def to_json(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "box": self.box.to_json(),
            "coeffs": [[str(c.numerator), str(c.denominator)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, doc: dict, names: Sequence[str]) -> BernsteinTensor:
        return cls(
            tuple(doc["degrees"]),
            Box.from_json(names, doc["box"]),
            tuple(Fraction(int(n), int(d)) for n, d in doc["coeffs"]),
        )


def to_bernstein(p: MultiPoly, degrees: Sequence[int], box: Box) -> BernsteinTensor:
    if p.variables != box.names:
        raise ValueError(f"polynomial variables {p.variables} differ from box variables {box.names}")
    degrees = tuple(degrees)
    for name, n in zip(box.names, degrees):
        if p.degree(name) > n:
            raise ValueError(f"degree of {name} is {p.degree(name)} > requested {n}")
    q = p
    for name, (lo, hi) in zip(box.names, box.intervals):
        q = q.subst_affine(name, hi - lo, lo)
    shape = tuple(n + 1 for n in degrees)
    strides = _strides(shape)
    flat = [Fraction(0)] * (strides[0] * shape[0] if shape else 1)
    for exp, c in q:
        flat[sum(e * s for e, s in zip(exp, strides))] += c
    for axis in range(len(degrees)):
        flat = _map_fibers(flat, shape, axis, _power_to_bernstein)
    return BernsteinTensor(degrees, box, tuple(flat))


def enclosure(b: BernsteinTensor) -> tuple[Fraction, Fraction]:
    return min(b.coeffs), max(b.coeffs)


def subdivide(b: BernsteinTensor, axis: int) -> tuple[BernsteinTensor, BernsteinTensor]:
    """de Casteljau split at the midpoint of one axis."""
    lefts = _map_fibers(b.coeffs, b.shape, axis, lambda f: _casteljau_split(f)[0])
    rights = _map_fibers(b.coeffs, b.shape, axis, lambda f: _casteljau_split(f)[1])
    lo, hi = b.box.intervals[axis]
    mid = (lo + hi) / 2
    ivs_l = list(b.box.intervals)
    ivs_r = list(b.box.intervals)
    ivs_l[axis] = (lo, mid)
    ivs_r[axis] = (mid, hi)
    return (
        BernsteinTensor(b.degrees, Box(b.box.names, tuple(ivs_l)), tuple(lefts)),
        BernsteinTensor(b.degrees, Box(b.box.names, tuple(ivs_r)), tuple(rights)),
    )


def subdivide_axes(b: BernsteinTensor, axes: Sequence[int] | None = None) -> list[BernsteinTensor]:
    """Split along several axes at once; children sorted by lower box corner."""
    axes = range(len(b.degrees)) if axes is None else axes
    pieces = [b]
    for axis in axes:
        pieces = [child for piece in pieces for child in subdivide(piece, axis)]
    return sorted(pieces, key=lambda t: t.box.lo())


def degree_elevate(b: BernsteinTensor, axis: int) -> BernsteinTensor:
    degrees = list(b.degrees)
    flat = _map_fibers(b.coeffs, b.shape, axis, _elevate, b.shape[axis] + 1)
    degrees[axis] += 1
    return BernsteinTensor(tuple(degrees), b.box, tuple(flat))


# -- catalog of the published matrices --------------------------------------------------

_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)
QUADRANTS = {
    "q1": ((0, _HALF), (0, _HALF)),
    "q2": ((0, _HALF), (_HALF, 1)),
    "q3": ((_HALF, 1), (0, _HALF)),
    "q4": ((_HALF, 1), (_HALF, 1)),
}
SUBQUADRANTS = {
    "q11": ((0, _QUARTER), (0, _QUARTER)),
    "q12": ((0, _QUARTER), (_QUARTER, _HALF)),
    "q13": ((_QUARTER, _HALF), (0, _QUARTER)),
    "q14": ((_QUARTER, _HALF), (_QUARTER, _HALF)),
}


@dataclass(frozen=True)
class CatalogEntry:
    """One published coefficient matrix: the tensor it comes from and, for 3-D tensors, the u-slice."""

    id: str
    tensor: BernsteinTensor
    slice_k: int | None = None

    def matrix(self) -> list[list[Fraction]]:
        if self.slice_k is None:
            return self.tensor.matrix()
        return self.tensor.slice(2, self.slice_k)


def catalog_ids() -> list[str]:
    ids = ["b0", "bhalf"]
    for group in (QUADRANTS, SUBQUADRANTS):
        for q in group:
            ids += [f"{q}-g0", f"{q}-ghalf"]
    ids += [f"g2k{k}" for k in range(4)]
    ids += [f"g2{q}-k{k}" for q in QUADRANTS for k in range(4)]
    return ids


def g2_in_u(G2: MultiPoly) -> MultiPoly:
    """G2(p, x, u/2) over variables (p, x, u)."""
    return G2.subst_affine("t", _HALF, 0).rename({"t": "u"})


def tensor_matrices(chain) -> dict[str, CatalogEntry]:
    """Compute every published matrix from a majorant chain.

    2-D tensors use degrees (6, 4); the G2 tensors use (6, 4, 3) over the unit
    cube after u = 2t.  Quadrant tensors come from de Casteljau splits of the
    parent tensor, so the catalog exercises the subdivision route.
    """
    out: dict[str, CatalogEntry] = {}
    unit2 = Box.unit(("p", "x"))
    for tag, poly in (("g0", chain.G0), ("ghalf", chain.Ghalf)):
        root = to_bernstein(poly, (6, 4), unit2)
        out["b0" if tag == "g0" else "bhalf"] = CatalogEntry("b0" if tag == "g0" else "bhalf", root)
        quads = dict(zip(QUADRANTS, subdivide_axes(root)))
        for q, t in quads.items():
            out[f"{q}-{tag}"] = CatalogEntry(f"{q}-{tag}", t)
        for q, t in zip(SUBQUADRANTS, subdivide_axes(quads["q1"])):
            out[f"{q}-{tag}"] = CatalogEntry(f"{q}-{tag}", t)
    cube = to_bernstein(g2_in_u(chain.G2), (6, 4, 3), Box.unit(("p", "x", "u")))
    for k in range(4):
        out[f"g2k{k}"] = CatalogEntry(f"g2k{k}", cube, k)
    for q, t in zip(QUADRANTS, subdivide_axes(cube, (0, 1))):
        for k in range(4):
            out[f"g2{q}-k{k}"] = CatalogEntry(f"g2{q}-k{k}", t, k)
    return {i: out[i] for i in catalog_ids()}


def golden_matrix(entry_id: str) -> list[list[Fraction]]:
    from .golden_matrices import GOLDEN_MATRICES

    return [[Fraction(c) for c in row] for row in GOLDEN_MATRICES[entry_id]]


def diff_matrix(computed: Sequence[Sequence[Fraction]], golden: Sequence[Sequence[Fraction]]) -> list[dict]:
    """Entries where the two matrices differ, with index and both values."""
    mismatches = []
    if len(computed) != len(golden) or any(len(a) != len(b) for a, b in zip(computed, golden)):
        return [{"index": None, "computed": "shape", "golden": "shape"}]
    for i, (row_c, row_g) in enumerate(zip(computed, golden)):
        for j, (c, g) in enumerate(zip(row_c, row_g)):
            if c != g:
                mismatches.append({"index": [i, j], "computed": format_rational(c), "golden": format_rational(g)})
    return mismatches
