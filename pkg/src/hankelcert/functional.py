"""Symbolic Hankel functionals and their reduction to real polynomials on boxes.

The coefficient formulas come from running the subordination recurrence with
c1..c4 as formal variables.  Schwarz coefficients are then rewritten in the
standard parametrization with gamma, eta, rho and their conjugates as independent
symbols (``g``, ``gc``, ``e``, ``ec``, ``r``).  Majorization works on a small
expression language that keeps sign-definite factors intact; each such factor
gets a Bernstein nonnegativity certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

from .certify import (
    Certificate,
    NonnegExpr,
    NonnegLeaf,
    NonnegProd,
    NonnegSum,
    certify_nonneg,
    expr_poly,
)
from .exactalg import Box, MultiPoly, as_rational, parse_poly
from .golden_forms import (
    C_VARS,
    COEFF_FORMULAS,
    D2G1_BRACKET_PARTS,
    D2G1_DT2,
    F1,
    F1_PRIME,
    F1_VARS,
    G0_EXTENDED,
    G_VARS,
    GHALF_EXTENDED,
    GROUP_VARS,
    GROUPED,
    H1_LIFTED,
    H2_TIMES_144,
    H3_TIMES_8640,
    H_MAJORANT,
    LINEAR_Y_TERM,
    MAJ_VARS,
    PSI,
    PSI_VARS,
    PX_VARS,
    golden_poly,
)
from .series import TruncatedSeries, expand_subordinate, hankel_from_taylor

SUB_VARS = ("p", "g", "gc", "e", "ec", "r", "t")
PT_VARS = ("p", "t")
# p = c1 in [0, 1], t in [0, 1/2]
PT_BOX = Box.of(p=(0, 1), t=(0, Fraction(1, 2)))


class TranscriptionError(AssertionError):
    """A computed functional disagrees with its reference closed form."""


def _expect(computed: MultiPoly, golden: MultiPoly, what: str) -> None:
    if computed != golden:
        raise TranscriptionError(f"{what}: computed form differs from the reference one by {computed - golden}")


# -- coefficient functionals ---------------------------------------------------------


@dataclass(frozen=True)
class CoeffFunctionals:
    a2: MultiPoly
    a3: MultiPoly
    a4: MultiPoly
    a5: MultiPoly

    def taylor(self) -> tuple[MultiPoly, ...]:
        return (self.a2, self.a3, self.a4, self.a5)


@lru_cache(maxsize=None)
def coeff_formulas() -> CoeffFunctionals:
    c1, c2, c3, c4, t = MultiPoly.gens(C_VARS)
    w = TruncatedSeries([0, c1, c2, c3, c4], 5)
    a = expand_subordinate(w, t, 5)
    out = CoeffFunctionals(*a[1:5])
    for name in ("a2", "a3", "a4", "a5"):
        _expect(getattr(out, name), golden_poly(COEFF_FORMULAS[name], C_VARS), name)
    return out


@lru_cache(maxsize=None)
def _hankels() -> tuple[MultiPoly, MultiPoly]:
    return hankel_from_taylor(coeff_formulas().taylor())


@lru_cache(maxsize=None)
def h2_functional() -> MultiPoly:
    """144 H_2(2) over (c1, c2, c3, t)."""
    h2 = (_hankels()[0] * 144).align(("c1", "c2", "c3", "t"))
    _expect(h2, golden_poly(H2_TIMES_144, ("c1", "c2", "c3", "t")), "144*H2")
    return h2


@lru_cache(maxsize=None)
def h3_functional() -> MultiPoly:
    """8640 H_3(1) over (c1, c2, c3, c4, t)."""
    h3 = _hankels()[1] * 8640
    _expect(h3, golden_poly(H3_TIMES_8640, C_VARS), "8640*H3")
    return h3


# -- Schwarz coefficient parametrization---------------------------------------------------------


@dataclass(frozen=True)
class GroupedExpr:
    """A1 + B1*eta + C1*eta^2 + D1*rho over (p, g, gc, e, ec, t)."""

    A1: MultiPoly
    B1: MultiPoly
    C1: MultiPoly
    D1: MultiPoly

    def parts(self) -> dict[str, MultiPoly]:
        return {"A1": self.A1, "B1": self.B1, "C1": self.C1, "D1": self.D1}

    def total(self) -> MultiPoly:
        """Recombine over (p, g, gc, e, ec, r, t)."""
        e, r = MultiPoly.var("e", SUB_VARS), MultiPoly.var("r", SUB_VARS)
        A, B, C, D = (x.align(SUB_VARS) for x in (self.A1, self.B1, self.C1, self.D1))
        return A + B * e + C * e * e + D * r


def schwarz_images() -> dict[str, MultiPoly]:
    p, g, gc, e, ec, r, t = MultiPoly.gens(SUB_VARS)
    one_p = 1 - p * p
    one_g = 1 - g * gc
    one_e = 1 - e * ec
    return {
        "c1": p,
        "c2": one_p * g,
        "c3": one_p * (e * one_g - p * g * g),
        "c4": one_p * (p * p * g ** 3 - one_g * (2 * p * g * e + gc * e * e) + one_g * one_e * r),
        "t": t,
    }


def schwarz_substitute(target: MultiPoly) -> GroupedExpr:
    extra = set(target.active_variables()) - set(C_VARS)
    if extra:
        raise ValueError(f"target uses variables outside c1..c4, t: {sorted(extra)}")
    images = schwarz_images()
    full = target.align(C_VARS).compose(images, SUB_VARS)
    by_r = full.coefficients_in("r")
    if set(by_r) - {0, 1}:
        raise ValueError("substituted polynomial is not affine in rho")
    zero = MultiPoly.zero(GROUP_VARS)
    rest = by_r.get(0, MultiPoly.zero(SUB_VARS))
    by_e = rest.coefficients_in("e")
    if set(by_e) - {0, 1, 2}:
        raise ValueError("substituted polynomial has eta powers above 2")
    parts = []
    for k in range(3):
        part = by_e.get(k, MultiPoly.zero(SUB_VARS))
        if part.degree("ec"):
            raise ValueError("conjugate eta appears outside the rho term")
        parts.append(part.align(GROUP_VARS) if part else zero)
    D1 = by_r[1].align(GROUP_VARS) if 1 in by_r else zero
    return GroupedExpr(parts[0], parts[1], parts[2], D1)


def golden_grouping() -> GroupedExpr:
    return GroupedExpr(*(golden_poly(GROUPED[k], GROUP_VARS) for k in ("A1", "B1", "C1", "D1")))


# -- grouped-factor majorization ------------------------------------------------------------
#
# A structured expression is built from real factors (polynomials in p, t whose
# sign on the domain is certified), unimodular-bounded symbols (|gamma|, |eta|,
# |rho| <= 1) and deficits 1 - |z|^2.  Majorizing replaces every factor by its
# absolute value bound, term by term inside sums.


@dataclass(frozen=True)
class Real:
    poly: MultiPoly  # over (p, t)


@dataclass(frozen=True)
class Sym:
    name: str  # g, gc, e, ec, r


@dataclass(frozen=True)
class Deficit:
    name: str  # g or e: 1 - z * conj(z)


@dataclass(frozen=True)
class Plus:
    terms: tuple


@dataclass(frozen=True)
class Times:
    factors: tuple


Node = Union[Real, Sym, Deficit, Plus, Times]


def R(text: str) -> Real:
    return Real(parse_poly(text, PT_VARS))


def P(*terms: Node) -> Plus:
    return Plus(tuple(terms))


def T(*factors: Node) -> Times:
    return Times(tuple(factors))


G, GC, E, RHO = Sym("g"), Sym("gc"), Sym("e"), Sym("r")
DEF_G, DEF_E = Deficit("g"), Deficit("e")


def expand(node: Node) -> MultiPoly:
    """The polynomial a structured expression denotes, over (p, g, gc, e, ec, r, t)."""
    if isinstance(node, Real):
        return node.poly.align(SUB_VARS)
    if isinstance(node, Sym):
        return MultiPoly.var(node.name, SUB_VARS)
    if isinstance(node, Deficit):
        z = MultiPoly.var(node.name, SUB_VARS)
        zc = MultiPoly.var(node.name + "c", SUB_VARS)
        return 1 - z * zc
    parts = [expand(x) for x in (node.terms if isinstance(node, Plus) else node.factors)]
    acc = parts[0]
    for x in parts[1:]:
        acc = acc + x if isinstance(node, Plus) else acc * x
    return acc


@dataclass(frozen=True)
class GroupCertificate:
    """Sign of a real factor on p in [0,1], t in [0,1/2], with its proof."""

    poly: MultiPoly
    sign: int
    expr: NonnegExpr
    cert: Certificate

    @property
    def label(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}({self.poly})"


class SignUndetermined(ValueError):
    pass


@lru_cache(maxsize=None)
def real_sign(poly: MultiPoly) -> GroupCertificate:
    """Certify that poly or -poly is nonnegative on the (p, t) domain."""
    for sign in (1, -1):
        leaf = NonnegLeaf(poly * sign, str(poly))
        cert = certify_nonneg(leaf, PT_BOX)
        if cert.is_valid():
            return GroupCertificate(poly, sign, leaf, cert)
    raise SignUndetermined(f"factor {poly} has no certified sign on p in [0,1], t in [0,1/2]")


@dataclass
class Majorizer:
    """Maps a structured expression to its modulus bound.

    ``moduli`` sends each symbol (g, gc, e, ec, r) to a target variable name or
    to 1; ``rename`` renames p/t; deficits use the same modulus.
    """

    variables: tuple[str, ...]
    moduli: Mapping[str, object]
    rename: Mapping[str, str]

    def __post_init__(self) -> None:
        self.obligations: dict[MultiPoly, GroupCertificate] = {}

    def _modulus(self, name: str) -> MultiPoly:
        target = self.moduli[name]
        if isinstance(target, str):
            return MultiPoly.var(target, self.variables)
        return MultiPoly.const(target, self.variables)

    def __call__(self, node: Node) -> tuple[MultiPoly, NonnegExpr]:
        if isinstance(node, Real):
            poly = node.poly
            if poly.is_constant():
                value = abs(poly.constant_term())
                bound = MultiPoly.const(value, self.variables)
            else:
                group = real_sign(poly)
                self.obligations.setdefault(poly, group)
                bound = (poly * group.sign).rename(dict(self.rename)).align(self.variables)
            return bound, NonnegLeaf(bound)
        if isinstance(node, Sym):
            bound = self._modulus(node.name)
            return bound, NonnegLeaf(bound)
        if isinstance(node, Deficit):
            m = self._modulus(node.name)
            bound = 1 - m * m
            return bound, NonnegLeaf(bound)
        items = node.terms if isinstance(node, Plus) else node.factors
        pairs = [self(x) for x in items]
        acc = pairs[0][0]
        for b, _ in pairs[1:]:
            acc = acc + b if isinstance(node, Plus) else acc * b
        cls = NonnegSum if isinstance(node, Plus) else NonnegProd
        return acc, cls(tuple(e for _, e in pairs))


def h3_structure() -> dict[str, Node]:
    """The reference factored forms of A1..D1 as structured expressions."""
    neg_one_p = R("-1+p^2")
    inner = P(R("(1-2*t)*p^2"), T(R("2"), G, neg_one_p))
    A1 = P(
        T(R("-(1-6*t+21*t^2+4*t^3)"), R("p^6")),
        T(R("-6"), R("1-3*t+10*t^2"), G, R("p^4"), neg_one_p),
        T(R("12"), G, G, G, G, R("p^2"), R("(-1+p^2)^2")),
        T(R("-3"), G, G, R("p^2"), neg_one_p, R("-7+3*p^2+8*t^2*(-7+p^2)+4*t*(2+p^2)")),
        T(R("-4"), G, G, G, neg_one_p, P(R("-1-7*p^2-p^4"), T(R("6*t"), R("3-2*p^2+2*p^4")))),
    )
    B1 = T(
        R("12"), R("-1"), DEF_G, R("p"), neg_one_p,
        P(
            R("(1-3*t+12*t^2)*p^2"),
            T(R("2"), G, G, neg_one_p),
            T(R("3"), G, R("1+p^2")),
            T(R("-4*t"), G, R("2+p^2")),
        ),
    )
    C1 = T(
        R("-12"), R("-1"), DEF_G, neg_one_p,
        P(T(R("5"), R("1-p^2"), DEF_G), T(R("-3"), inner, GC)),
    )
    D1 = T(R("36"), R("-1"), DEF_G, R("-1"), DEF_E, neg_one_p, inner)
    return {"A1": A1, "B1": B1, "C1": C1, "D1": D1}


def h2_structure() -> Node:
    """144 H_2 after substitution: A + B*eta with the reference grouping."""
    one_p = R("1-p^2")
    return P(
        T(R("-(4*t^2-t+1)"), R("p^4")),
        T(R("4*t+1"), R("p^2"), one_p, G),
        T(R("-2"), one_p, R("2+p^2"), G, G),
        T(R("6"), R("p"), one_p, DEF_G, E),
    )


def check_structure(node: Node, target: MultiPoly, what: str) -> None:
    _expect(expand(node), target.align(SUB_VARS), what)


# -- the H3 majorant chain --------------------------------------------------------------------


@dataclass(frozen=True)
class MajorantChain:
    grouped: GroupedExpr
    H: MultiPoly
    H1: MultiPoly
    Lterm: MultiPoly
    G1: MultiPoly
    G2: MultiPoly
    G0: MultiPoly
    Ghalf: MultiPoly
    group_certificates: tuple[GroupCertificate, ...]
    lterm_expr: NonnegExpr
    lterm_cert: Certificate


MAJ_DOMAIN = Box.of(p=(0, 1), x=(0, 1), y=(0, 1), t=(0, Fraction(1, 2)))


@lru_cache(maxsize=None)
def majorant_chain() -> MajorantChain:
    grouped = schwarz_substitute(h3_functional())
    for name, golden in golden_grouping().parts().items():
        _expect(grouped.parts()[name], golden, name)
    structure = h3_structure()
    for name, node in structure.items():
        check_structure(node, grouped.parts()[name], f"structured {name}")

    maj = Majorizer(MAJ_VARS, {"g": "x", "gc": "x", "e": "y", "ec": "y", "r": 1}, {})
    whole = P(structure["A1"], T(structure["B1"], E), T(structure["C1"], E, E), T(structure["D1"], RHO))
    H, _ = maj(whole)
    _expect(H, golden_poly(H_MAJORANT, MAJ_VARS), "H")

    lterm, lterm_expr = maj(structure["B1"])
    _expect(lterm, H.coefficients_in("y").get(1, MultiPoly.zero(MAJ_VARS)).align(MAJ_VARS), "linear y coefficient")
    _expect(lterm, golden_poly(LINEAR_Y_TERM, MAJ_VARS), "Lterm")
    lterm_cert = certify_nonneg(lterm_expr, MAJ_DOMAIN)
    if not lterm_cert.is_valid():
        raise TranscriptionError("the linear y coefficient is not certified nonnegative")

    y = MultiPoly.var("y", MAJ_VARS)
    H1 = H + lterm * (1 - y)
    _expect(H1, golden_poly(H1_LIFTED, MAJ_VARS), "H1")
    G1 = H1.subs({"y": 1}).align(G_VARS)
    G2 = H1.subs({"y": 0}).align(G_VARS)
    G0 = G1.subs({"t": 0}).align(PX_VARS)
    Ghalf = G1.subs({"t": Fraction(1, 2)}).align(PX_VARS)
    _expect(G0, golden_poly(G0_EXTENDED, PX_VARS), "G0")
    _expect(Ghalf, golden_poly(GHALF_EXTENDED, PX_VARS), "G1/2")

    groups = tuple(maj.obligations[k] for k in sorted(maj.obligations, key=str))
    for group in groups:
        if not group.cert.is_valid():
            raise TranscriptionError(f"group {group.label} failed its nonnegativity certificate")
    return MajorantChain(grouped, H, H1, lterm.align(G_VARS), G1, G2, G0, Ghalf, groups, lterm_expr, lterm_cert)


def convexity_tree() -> NonnegExpr:
    """d^2 G1 / dt^2 = 6 p^2 (sum of three parts), each part nonnegative on the domain."""
    chain = majorant_chain()
    d2 = chain.G1.partial("t", 2)
    _expect(d2, golden_poly(D2G1_DT2, G_VARS), "d2G1/dt2")
    tree = NonnegProd(
        (
            NonnegLeaf(golden_poly("6*p^2", G_VARS)),
            NonnegSum(tuple(NonnegLeaf(golden_poly(part, G_VARS)) for part in D2G1_BRACKET_PARTS)),
        ),
        "d2G1/dt2",
    )
    _expect(expr_poly(tree), d2, "split of d2G1/dt2")
    return tree


# -- H2 reduction ------------------------------------------------------------------------


@dataclass(frozen=True)
class H2Reduction:
    t: Fraction
    bound: Fraction  # max of 144 |H2|
    maximizer: Fraction  # s = c1^2 at the maximum
    F1: MultiPoly  # over (x, y, t)
    derivative_cert: Certificate

    @property
    def h2_bound(self) -> Fraction:
        return self.bound / 144


@lru_cache(maxsize=None)
def _f1_symbolic() -> MultiPoly:
    check_structure(h2_structure(), schwarz_substitute(h2_functional().align(C_VARS)).total(), "structured 144*H2")
    maj = Majorizer(F1_VARS, {"g": "y", "gc": "y", "e": 1, "ec": 1}, {"p": "x"})
    f1, _ = maj(h2_structure())
    _expect(f1, golden_poly(F1, F1_VARS), "F1")
    _expect(f1.partial("y"), golden_poly(F1_PRIME, F1_VARS), "dF1/dy")
    return f1


def psi_bound(t: object) -> tuple[Fraction, Fraction]:
    """Exact max of psi_t(s) = 4 + (4t-1)s + (4t^2-5t-2)s^2 over s in [0, 1]."""
    t = as_rational(t)
    b, a = 4 * t - 1, 4 * t * t - 5 * t - 2
    if a >= 0:
        raise ValueError(f"psi_t is not concave at t = {t}")
    psi = lambda s: 4 + b * s + a * s * s  # noqa: E731
    s0 = -b / (2 * a)
    candidates = [Fraction(0), Fraction(1)] + ([s0] if 0 < s0 < 1 else [])
    best = max(candidates, key=lambda s: (psi(s), -s))
    return psi(best), best


def h2_reduction(t: object) -> H2Reduction:
    t = as_rational(t)
    if not 0 <= t <= Fraction(1, 2):
        raise ValueError(f"t must lie in [0, 1/2], got {t}")
    f1 = _f1_symbolic()
    xy = ("x", "y")
    deriv = f1.partial("y").subs({"t": t}).align(xy)
    # (1-x^2)(4+2x^2-6x) = 2(1-x)^2(1+x)(2-x)
    tree = NonnegSum(
        (
            NonnegLeaf((4 * t + 1) * parse_poly("x^2*(1-x^2)", xy)),
            NonnegProd((NonnegLeaf(parse_poly("4*(1-x)^2*(1+x)*(2-x)", xy)), NonnegLeaf(parse_poly("y", xy)))),
        )
    )
    _expect(expr_poly(tree), deriv, "dF1/dy split")
    cert = certify_nonneg(tree, Box.unit(xy))
    if not cert.is_valid():
        raise TranscriptionError("dF1/dy is not certified nonnegative")
    # F1(x, 1) = psi_t(x^2)
    at_one = f1.subs({"y": 1})
    s2 = {"s": MultiPoly.var("x", F1_VARS) ** 2, "t": MultiPoly.var("t", F1_VARS)}
    _expect(at_one, golden_poly(PSI, PSI_VARS).compose(s2, F1_VARS), "F1(x, 1)")
    bound, s = psi_bound(t)
    closed = 4 if t <= Fraction(1, 4) else 4 + (4 * t - 1) ** 2 / (8 + 20 * t - 16 * t * t)
    assert bound == closed, (bound, closed)
    return H2Reduction(t, bound, s, f1, cert)


def h2_bound(t: object) -> Fraction:
    """The sharp bound on |H_2(2)|: 1/36 for t <= 1/4, (4 + (4t-1)^2/(8+20t-16t^2))/144 beyond."""
    return h2_reduction(t).h2_bound


def h3_bound() -> Fraction:
    return Fraction(1, 144)


# -- disk maximum ------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Surd:
    """The exact real number q * sqrt(r) with r > 0 not a rational square."""

    q: Fraction
    r: Fraction

    def __float__(self) -> float:
        return float(self.q) * math.sqrt(self.r)

    def __str__(self) -> str:
        return f"{self.q}*sqrt({self.r})"

    def square(self) -> Fraction:
        return self.q * self.q * self.r


def _rational_sqrt(r: Fraction) -> Fraction | None:
    n, d = math.isqrt(r.numerator), math.isqrt(r.denominator)
    if n * n == r.numerator and d * d == r.denominator:
        return Fraction(n, d)
    return None


def surd(q: Fraction, r: Fraction) -> Fraction | Surd:
    if r < 0:
        raise ValueError("negative radicand")
    root = _rational_sqrt(r)
    if root is not None or q == 0:
        return q * (root if root is not None else 0)
    return Surd(q, r)


BRANCHES = (
    "|A|+|B|+|C|",
    "1+|A|+B^2/(4(1-|C|))",
    "1-|A|+B^2/(4(1-|C|))",
    "1+|A|+B^2/(4(1+|C|))",
    "R: |A|+|B|-|C|",
    "R: -|A|+|B|+|C|",
    "R: (|A|+|C|)sqrt(1-B^2/(4AC))",
)


def cks_y(A: object, B: object, C: object) -> tuple[Fraction | Surd, str]:
    """max over the closed disk of |A + Bz + Cz^2| + 1 - |z|^2 for real A, B, C.

    Returns the value and the case used.  The value is irrational only in the
    last case of R, where it is returned as a :class:`Surd`.
    """
    A, B, C = as_rational(A), as_rational(B), as_rational(C)
    a, b, c = abs(A), abs(B), abs(C)
    if A * C >= 0:
        if b >= 2 * (1 - c):
            return a + b + c, BRANCHES[0]
        return 1 + a + B * B / (4 * (1 - c)), BRANCHES[1]
    # A*C < 0, so C != 0
    k = -4 * A * C * (1 / (C * C) - 1)
    if k <= B * B and b < 2 * (1 - c):
        return 1 - a + B * B / (4 * (1 - c)), BRANCHES[2]
    if B * B < min(4 * (1 + c) ** 2, k):
        return 1 + a + B * B / (4 * (1 + c)), BRANCHES[3]
    if c * (b + 4 * a) <= a * b:
        return a + b - c, BRANCHES[4]
    if a * b <= c * (b - 4 * a):
        return -a + b + c, BRANCHES[5]
    return surd(a + c, 1 - B * B / (4 * A * C)), BRANCHES[6]
