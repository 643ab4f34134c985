"""Certified upper bounds and nonnegativity for polynomials on boxes.

Three kinds of leaf evidence are produced:

* ``enclosed``: the Bernstein coefficients of the polynomial on the box lie
  below the threshold (or above zero, for nonnegativity claims);
* ``vertex_dominated``: near a box corner where the bound is attained, the
  polynomial minus the threshold is dominated by a negative semidefinite
  quadratic form after discarding negative terms and absorbing higher-order
  ones with the box widths;
* ``factor_nonneg``: a sum or product of certified nonnegative parts.

Every certificate can be replayed by :func:`verify_max` / :func:`verify_nonneg`,
which recompute each leaf from the polynomial and the box alone.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence, Union

from .bernstein import BernsteinTensor, subdivide_axes, to_bernstein
from .exactalg import Box, MultiPoly, as_rational, format_rational

log = logging.getLogger(__name__)

VALID_LEAVES = ("enclosed", "vertex_dominated", "factor_nonneg")


def _q(value: Fraction | None) -> list[str] | None:
    return None if value is None else [str(value.numerator), str(value.denominator)]


def _unq(doc: Sequence[str] | None) -> Fraction | None:
    return None if doc is None else Fraction(int(doc[0]), int(doc[1]))


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return _q(value)
    if isinstance(value, MultiPoly):
        return value.to_json()
    if isinstance(value, Box):
        return value.to_json()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class Certificate:
    kind: str
    box: Box
    bound: Fraction | None = None
    children: tuple[Certificate, ...] = ()
    detail: dict = field(default_factory=dict, compare=False)

    def is_valid(self) -> bool:
        if self.kind == "failed":
            return False
        if self.kind in ("enclosed", "vertex_dominated"):
            return True
        return bool(self.children) and all(c.is_valid() for c in self.children)

    def leaves(self) -> list[Certificate]:
        if not self.children:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def failures(self) -> list[Certificate]:
        return [leaf for leaf in self.leaves() if leaf.kind == "failed"]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "box": self.box.to_json(),
            "bound": _q(self.bound),
            "children": [c.to_json() for c in self.children],
            "detail": _jsonable(self.detail),
        }

    @classmethod
    def from_json(cls, doc: dict, names: Sequence[str]) -> Certificate:
        return cls(
            doc["kind"],
            Box.from_json(names, doc["box"]),
            _unq(doc["bound"]),
            tuple(cls.from_json(c, names) for c in doc["children"]),
            doc.get("detail", {}),
        )


@dataclass(frozen=True)
class Policy:
    max_depth: int = 6
    vertex: tuple[Fraction, ...] | None = None
    split_axes: tuple[int, ...] | None = None
    workers: int = 1


def certificate_document(cert: Certificate, poly: MultiPoly, threshold: Fraction) -> dict:
    return {
        "poly_sha": poly.sha256(),
        "threshold": _q(as_rational(threshold)),
        "root": cert.to_json(),
    }


# -- vertex domination --------------------------------------------------------------


@dataclass(frozen=True)
class DominationRecord:
    vertex: tuple[Fraction, ...]
    threshold: Fraction
    widths: tuple[Fraction, ...]
    residual: tuple[Fraction, Fraction, Fraction]
    lam: Fraction | None
    final: tuple[Fraction, Fraction]
    absorbed: tuple[tuple[tuple[int, int], str, Fraction, Fraction], ...]
    discarded: tuple[tuple[tuple[int, int], Fraction], ...]
    constant: Fraction

    def to_json(self) -> dict:
        return {
            "vertex": [_q(v) for v in self.vertex],
            "threshold": _q(self.threshold),
            "widths": [_q(w) for w in self.widths],
            "residual": {"alpha": _q(self.residual[0]), "beta": _q(self.residual[1]), "delta": _q(self.residual[2])},
            "lambda": _q(self.lam),
            "final": [_q(v) for v in self.final],
            "absorbed": [
                {"monomial": list(m), "target": tgt, "coeff": _q(c), "bound": _q(b)}
                for m, tgt, c, b in self.absorbed
            ],
            "discarded": [{"monomial": list(m), "coeff": _q(c)} for m, c in self.discarded],
            "constant": _q(self.constant),
        }


_TARGET_EXP = {"p2": (2, 0), "x2": (0, 2), "px": (1, 1)}


def _translated(p: MultiPoly, box: Box, vertex: Sequence[Fraction]) -> MultiPoly:
    """p in coordinates s_i = |v_i - vertex_i|, so the box maps to [0, w_1] x [0, w_2]."""
    q = p
    for name, v, (lo, hi) in zip(box.names, vertex, box.intervals):
        q = q.subst_affine(name, 1 if v == lo else -1, v)
    return q


def _absorb_target(a: int, b: int) -> str:
    if a >= 2:
        return "p2"
    if b >= 2:
        return "x2"
    return "px"


def _residual_ok(alpha: Fraction, beta: Fraction, delta: Fraction) -> tuple[bool, Fraction | None, str]:
    if delta <= 0:
        if alpha <= 0 and beta <= 0:
            return True, None, "ok"
        return False, None, "residual has a positive square coefficient"
    if alpha >= 0 or beta >= 0:
        return False, None, "residual square coefficients must be negative when the cross term is positive"
    if delta * delta > 4 * alpha * beta:
        return False, None, "residual quadratic form is indefinite"
    lam = (delta / (-4 * beta) + (-alpha / delta)) / 2
    return True, lam, "ok"


def vertex_domination(p: MultiPoly, box: Box, vertex: Sequence[object], threshold: object) -> Certificate:
    """Certify p <= threshold on a 2-D box from the corner ``vertex``."""
    vertex = tuple(as_rational(v) for v in vertex)
    threshold = as_rational(threshold)
    if p.variables != box.names:
        raise ValueError(f"polynomial variables {p.variables} differ from box variables {box.names}")
    if box.dim != 2:
        raise ValueError("vertex domination works on exactly two variables")
    if not box.is_vertex(vertex):
        raise ValueError(f"{vertex} is not a corner of {box}")
    widths = box.widths()
    q = _translated(p, box, vertex) - threshold
    constant = q.constant_term()

    def failed(reason: str) -> Certificate:
        return Certificate("failed", box, None, (), {"reason": reason, "method": "vertex_domination"})

    if constant > 0:
        return failed("polynomial exceeds the threshold at the vertex")
    quad = {"p2": Fraction(0), "x2": Fraction(0), "px": Fraction(0)}
    absorbed, discarded = [], []
    for (a, b), c in q:
        deg = a + b
        if deg == 0:
            continue
        if deg == 2:
            quad[_absorb_target(a, b) if (a, b) != (1, 1) else "px"] += c
            continue
        if c < 0:
            discarded.append(((a, b), c))
            continue
        if deg == 1:
            return failed(f"positive linear term {c} at exponent {(a, b)}")
        target = _absorb_target(a, b)
        ta, tb = _TARGET_EXP[target]
        bound = c * widths[0] ** (a - ta) * widths[1] ** (b - tb)
        quad[target] += bound
        absorbed.append(((a, b), target, c, bound))
    alpha, beta, delta = quad["p2"], quad["x2"], quad["px"]
    ok, lam, reason = _residual_ok(alpha, beta, delta)
    if not ok:
        cert = failed(reason)
        cert.detail["residual"] = [_q(alpha), _q(beta), _q(delta)]
        return cert
    final = (alpha + delta * lam, beta + delta / (4 * lam)) if lam is not None else (alpha, beta)
    record = DominationRecord(
        vertex, threshold, widths, (alpha, beta, delta), lam, final,
        tuple(absorbed), tuple(discarded), constant,
    )
    return Certificate("vertex_dominated", box, threshold, (), {"record": record.to_json()})


# -- branch and bound for upper bounds --------------------------------------------------


def _examine(args: tuple) -> tuple[str, Any]:
    """Decide one box: ('leaf', Certificate) or ('split', children tensors)."""
    poly, tensor, threshold, depth, policy = args
    hi, idx = tensor.max()
    if hi <= threshold:
        return "leaf", Certificate(
            "enclosed", tensor.box, hi, (), {"sense": "upper", "degrees": list(tensor.degrees), "argmax": list(idx)}
        )
    if depth < policy.max_depth:
        return "split", (subdivide_axes(tensor, policy.split_axes), hi, idx)
    witness = {"witness_max": hi, "index": list(idx), "depth": depth}
    if policy.vertex is not None and tensor.box.is_vertex(policy.vertex):
        dom = vertex_domination(poly, tensor.box, policy.vertex, threshold)
        if dom.kind == "vertex_dominated":
            dom.detail.update({"enclosure_max": _q(hi), "index": list(idx)})
            return "leaf", dom
        witness["domination"] = dom.detail
    return "leaf", Certificate("failed", tensor.box, hi, (), witness)


def _run_levels(tasks: list[tuple], worker_fn, workers: int) -> list:
    if workers <= 1 or len(tasks) < 2:
        return [worker_fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker_fn, tasks))


def certify_max(
    p: MultiPoly,
    box: Box,
    threshold: object,
    policy: Policy | None = None,
    degrees: Sequence[int] | None = None,
) -> Certificate:
    """Certify p <= threshold on box, or return a certificate whose failed leaves locate the trouble.

    Boxes are processed level by level; the tree is assembled from results in
    child order, so the output does not depend on ``policy.workers``.
    """
    policy = policy or Policy()
    threshold = as_rational(threshold)
    if policy.vertex is not None:
        policy = Policy(policy.max_depth, tuple(as_rational(v) for v in policy.vertex), policy.split_axes, policy.workers)
    degrees = tuple(degrees) if degrees is not None else p.degrees()
    root = to_bernstein(p, degrees, box)
    results: dict[tuple[int, ...], tuple[str, Any]] = {}
    frontier: list[tuple[tuple[int, ...], BernsteinTensor]] = [((), root)]
    depth = 0
    while frontier:
        outcomes = _run_levels([(p, t, threshold, depth, policy) for _, t in frontier], _examine, policy.workers)
        nxt = []
        for (path, _), outcome in zip(frontier, outcomes):
            results[path] = outcome
            if outcome[0] == "split":
                nxt += [(path + (i,), child) for i, child in enumerate(outcome[1][0])]
        log.debug("depth %d: %d boxes examined, %d to refine", depth, len(frontier), len(nxt))
        frontier = nxt
        depth += 1

    def build(path: tuple[int, ...], tensor_box: Box) -> Certificate:
        kind, payload = results[path]
        if kind == "leaf":
            return payload
        tensors, hi, idx = payload
        children = tuple(build(path + (i,), child.box) for i, child in enumerate(tensors))
        bounds = [c.bound for c in children if c.bound is not None]
        detail = {"axes": _axes_of(tensors, tensor_box), "enclosure_max": hi, "index": list(idx)}
        return Certificate("split", tensor_box, max(bounds) if bounds else None, children, detail)

    return build((), box)


def _axes_of(children: Sequence[BernsteinTensor], parent: Box) -> list[int]:
    return [i for i, iv in enumerate(children[0].box.intervals) if iv != parent.intervals[i]]


def _enclosure_max(node: Certificate) -> Fraction | None:
    if node.kind == "enclosed":
        return node.bound
    for key in ("enclosure_max", "witness_max"):
        value = node.detail.get(key)
        if value is not None:
            return value if isinstance(value, Fraction) else _unq(value)
    return None


def stage_bounds(cert: Certificate) -> list[Fraction]:
    """Bernstein bound after each refinement stage.

    Stage k is the max of the enclosures over the partition reached at depth k,
    where leaves closed earlier keep their own enclosure.
    """
    out = []
    level = [cert]
    while True:
        out.append(max(v for v in map(_enclosure_max, level) if v is not None))
        if not any(n.kind == "split" for n in level):
            return out
        level = [c for n in level for c in (n.children if n.kind == "split" else (n,))]


# -- nonnegativity --------------------------------------------------------------------


@dataclass(frozen=True)
class NonnegLeaf:
    poly: MultiPoly
    label: str = ""


@dataclass(frozen=True)
class NonnegSum:
    parts: tuple
    label: str = ""


@dataclass(frozen=True)
class NonnegProd:
    parts: tuple
    label: str = ""


NonnegExpr = Union[NonnegLeaf, NonnegSum, NonnegProd]


def expr_poly(e: NonnegExpr) -> MultiPoly:
    """The polynomial an expression tree denotes."""
    if isinstance(e, NonnegLeaf):
        return e.poly
    parts = [expr_poly(x) for x in e.parts]
    acc = parts[0]
    for x in parts[1:]:
        acc = acc + x if isinstance(e, NonnegSum) else acc * x
    return acc


def _nonneg_leaf(p: MultiPoly, box: Box, max_depth: int, depth: int = 0, tensor: BernsteinTensor | None = None) -> Certificate:
    tensor = tensor or to_bernstein(p, p.degrees(), box)
    lo, idx = tensor.min()
    if lo >= 0:
        return Certificate("enclosed", tensor.box, lo, (), {"sense": "lower", "degrees": list(tensor.degrees)})
    if depth >= max_depth:
        return Certificate("failed", tensor.box, lo, (), {"witness_min": lo, "index": list(idx), "depth": depth})
    children = tuple(_nonneg_leaf(p, c.box, max_depth, depth + 1, c) for c in subdivide_axes(tensor))
    return Certificate("split", tensor.box, min(c.bound for c in children), children, {"sense": "lower"})


def certify_nonneg(e: NonnegExpr, box: Box, policy: Policy | None = None) -> Certificate:
    """Certify e >= 0 on box by structural recursion over sums and products."""
    policy = policy or Policy()
    if isinstance(e, NonnegLeaf):
        if e.poly.variables != box.names:
            raise ValueError(f"leaf over {e.poly.variables}, box over {box.names}")
        cert = _nonneg_leaf(e.poly, box, policy.max_depth)
        cert.detail["poly"] = e.poly.to_json()
        if e.label:
            cert.detail["label"] = e.label
        return cert
    op = "sum" if isinstance(e, NonnegSum) else "product"
    children = tuple(certify_nonneg(x, box, policy) for x in e.parts)
    detail = {"op": op}
    if e.label:
        detail["label"] = e.label
    return Certificate("factor_nonneg", box, None, children, detail)


def nonneg_leaf(poly: MultiPoly, box: Box, label: str = "") -> NonnegLeaf:
    return NonnegLeaf(poly.align(box.names), label)


# -- replay ---------------------------------------------------------------------------------


class ReplayError(AssertionError):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ReplayError(msg)


def _verify_domination(p: MultiPoly, box: Box, rec: dict) -> None:
    vertex = tuple(_unq(v) for v in rec["vertex"])
    threshold = _unq(rec["threshold"])
    _check(box.is_vertex(vertex), "domination vertex is not a box corner")
    w = box.widths()
    q = p
    for name, v, (lo, hi) in zip(box.names, vertex, box.intervals):
        q = q.subst_affine(name, 1 if v == lo else -1, v)
    q = q - threshold
    _check(q.constant_term() <= 0, "value at the vertex exceeds the threshold")
    ledger = {tuple(a["monomial"]): a for a in rec["absorbed"]}
    alpha = q.coeff((2, 0))
    beta = q.coeff((0, 2))
    delta = q.coeff((1, 1))
    for (a, b), c in q:
        if a + b in (0, 2):
            continue
        if c <= 0:
            continue
        _check(a + b >= 3, f"positive linear term at {(a, b)}")
        _check((a, b) in ledger, f"positive term {(a, b)} is not absorbed")
        entry = ledger[(a, b)]
        ta, tb = _TARGET_EXP[entry["target"]]
        _check(a >= ta and b >= tb, f"absorption of {(a, b)} into {entry['target']} lowers an exponent below zero")
        bound = c * w[0] ** (a - ta) * w[1] ** (b - tb)
        _check(_unq(entry["bound"]) >= bound, f"absorption bound for {(a, b)} too small")
        if entry["target"] == "p2":
            alpha += _unq(entry["bound"])
        elif entry["target"] == "x2":
            beta += _unq(entry["bound"])
        else:
            delta += _unq(entry["bound"])
    res = rec["residual"]
    _check((alpha, beta, delta) == (_unq(res["alpha"]), _unq(res["beta"]), _unq(res["delta"])), "residual mismatch")
    if delta > 0:
        lam = _unq(rec["lambda"])
        _check(lam is not None and lam > 0, "missing AM-GM weight")
        _check(alpha + delta * lam <= 0 and beta + delta / (4 * lam) <= 0, "AM-GM step leaves a positive square")
    else:
        _check(alpha <= 0 and beta <= 0, "residual has a positive square coefficient")


def verify_max(cert: Certificate, p: MultiPoly, threshold: object) -> Fraction:
    """Replay an upper-bound certificate from scratch; returns the certified bound."""
    threshold = as_rational(threshold)
    _check(cert.is_valid(), "certificate has failed leaves")

    def walk(node: Certificate) -> Fraction:
        if node.kind == "enclosed":
            t = to_bernstein(p, node.detail.get("degrees") or p.degrees(), node.box)
            hi = max(t.coeffs)
            _check(hi <= node.bound <= threshold, f"enclosure on {node.box} gives {hi}, claimed {node.bound}")
            return node.bound
        if node.kind == "vertex_dominated":
            _verify_domination(p, node.box, node.detail["record"])
            return threshold
        _check(node.kind == "split", f"unexpected node kind {node.kind}")
        axes = node.detail.get("axes")
        expected = node.box.split(axes)
        _check([c.box for c in node.children] == expected, f"children do not partition {node.box}")
        return max(walk(c) for c in node.children)

    return walk(cert)


def verify_nonneg(cert: Certificate, e: NonnegExpr) -> None:
    """Replay a nonnegativity certificate against its expression tree."""
    _check(cert.is_valid(), "certificate has failed leaves")

    def leaf(node: Certificate, p: MultiPoly) -> None:
        if node.kind == "enclosed":
            t = to_bernstein(p, p.degrees(), node.box)
            _check(min(t.coeffs) >= 0, f"negative Bernstein coefficient on {node.box}")
            return
        _check(node.kind == "split", f"unexpected node kind {node.kind}")
        _check([c.box for c in node.children] == node.box.split(), "children do not partition the box")
        for c in node.children:
            leaf(c, p)

    def walk(node: Certificate, expr: NonnegExpr) -> None:
        if isinstance(expr, NonnegLeaf):
            leaf(node, expr.poly)
            return
        _check(node.kind == "factor_nonneg", "expected a sum/product node")
        op = "sum" if isinstance(expr, NonnegSum) else "product"
        _check(node.detail.get("op") == op and len(node.children) == len(expr.parts), "tree shape mismatch")
        for c, x in zip(node.children, expr.parts):
            walk(c, x)

    walk(cert, e)


# -- the H3 pipeline ------------------------------------------------------------------------


@dataclass
class MasterCertificate:
    bound: Fraction
    parts: dict[str, tuple[Certificate, MultiPoly, Fraction | None]]
    nonneg_parts: dict[str, tuple[Certificate, NonnegExpr]]
    attainment: dict[str, Fraction]
    stages: dict[str, list[Fraction]]

    def is_valid(self) -> bool:
        return all(c.is_valid() for c, _, _ in self.parts.values()) and all(
            c.is_valid() for c, _ in self.nonneg_parts.values()
        )

    def first_failure(self) -> tuple[str, Certificate] | None:
        for name, (c, _, _) in list(self.parts.items()):
            if not c.is_valid():
                return name, c
        for name, (c, _) in self.nonneg_parts.items():
            if not c.is_valid():
                return name, c
        return None

    def replay(self) -> None:
        for name, (c, poly, thr) in self.parts.items():
            verify_max(c, poly, thr)
        for name, (c, expr) in self.nonneg_parts.items():
            verify_nonneg(c, expr)

    def to_json(self) -> dict:
        return {
            "bound": _q(self.bound),
            "valid": self.is_valid(),
            "attainment": {k: _q(v) for k, v in self.attainment.items()},
            "stages": {k: [_q(v) for v in vs] for k, vs in self.stages.items()},
            "max_certificates": {
                name: {"poly": poly.to_json(), **certificate_document(c, poly, thr)}
                for name, (c, poly, thr) in self.parts.items()
            },
            "nonneg_certificates": {
                name: {"poly": expr_poly(expr).to_json(), "root": c.to_json()}
                for name, (c, expr) in self.nonneg_parts.items()
            },
        }


class PipelineFailure(RuntimeError):
    def __init__(self, branch: str, cert: Certificate):
        super().__init__(f"branch {branch!r} failed")
        self.branch = branch
        self.cert = cert


def h3_master(depth: int = 2, workers: int = 1, strict: bool = True) -> tuple[Fraction, MasterCertificate]:
    """Run the whole |H_3(1)| <= 1/144 pipeline and return the bound with its certificate.

    With ``strict`` a failed branch raises :class:`PipelineFailure` carrying the
    failing certificate; otherwise the invalid certificate is returned.
    """
    from .bernstein import g2_in_u
    from .functional import convexity_tree, majorant_chain

    chain = majorant_chain()
    unit_px = Box.unit(("p", "x"))
    domain_pxt = Box.of(p=(0, 1), x=(0, 1), t=(0, Fraction(1, 2)))
    threshold = Fraction(60)

    nonneg_parts: dict[str, tuple[Certificate, NonnegExpr]] = {}
    for i, group in enumerate(chain.group_certificates):
        nonneg_parts[f"group{i}:{group.label}"] = (group.cert, group.expr)
    nonneg_parts["linear_y_term"] = (chain.lterm_cert, chain.lterm_expr)
    conv = convexity_tree()
    nonneg_parts["convexity_in_t"] = (certify_nonneg(conv, domain_pxt), conv)

    vertex = (Fraction(0), Fraction(0))
    parts: dict[str, tuple[Certificate, MultiPoly, Fraction | None]] = {}
    parts["g0"] = (certify_max(chain.G0, unit_px, threshold, Policy(depth, vertex, None, workers), (6, 4)), chain.G0, threshold)
    parts["ghalf"] = (certify_max(chain.Ghalf, unit_px, threshold, Policy(depth, vertex, None, workers), (6, 4)), chain.Ghalf, threshold)
    g2u = g2_in_u(chain.G2)
    parts["g2"] = (
        certify_max(g2u, Box.unit(("p", "x", "u")), threshold, Policy(max(depth, 1), None, (0, 1), workers), (6, 4, 3)),
        g2u,
        threshold,
    )
    attainment = {str(tv): chain.G1.eval((0, 0, tv)) for tv in (Fraction(0), Fraction(1, 4), Fraction(1, 2))}
    stages = {name: stage_bounds(c) for name, (c, _, _) in parts.items()}
    master = MasterCertificate(threshold / 8640, parts, nonneg_parts, attainment, stages)
    failure = master.first_failure()
    if failure and strict:
        raise PipelineFailure(*failure)
    return master.bound, master


def _expr_from_certificate(node: Certificate) -> NonnegExpr:
    if node.kind == "factor_nonneg":
        parts = tuple(_expr_from_certificate(c) for c in node.children)
        return NonnegSum(parts) if node.detail["op"] == "sum" else NonnegProd(parts)
    return NonnegLeaf(MultiPoly.from_json(node.detail["poly"]))


def replay_document(doc: dict) -> Fraction:
    """Re-verify a serialized :class:`MasterCertificate` using only the JSON document."""
    _check(doc.get("valid") is True, "document is marked invalid")
    for name, part in doc["max_certificates"].items():
        poly = MultiPoly.from_json(part["poly"])
        _check(poly.sha256() == part["poly_sha"], f"{name}: polynomial hash mismatch")
        cert = Certificate.from_json(part["root"], poly.variables)
        verify_max(cert, poly, _unq(part["threshold"]))
    for name, part in doc["nonneg_certificates"].items():
        poly = MultiPoly.from_json(part["poly"])
        cert = Certificate.from_json(part["root"], poly.variables)
        expr = _expr_from_certificate(cert)
        _check(expr_poly(expr) == poly, f"{name}: tree does not multiply out to the stated polynomial")
        verify_nonneg(cert, expr)
    return _unq(doc["bound"])
