"""Command line interface.

Every command prints a run report: exact values as "n/d" strings, decimal
approximations only under ``approximate``.  Exit codes: 0 success or match,
1 certified-false or mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .exactalg import Box, MultiPoly, as_rational, format_rational

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rat(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc


class Report:
    def __init__(self, command: Sequence[str], inputs: dict):
        self.doc: dict[str, Any] = {"command": list(command), "inputs": inputs, "outputs": {}, "approximate": {}}
        self.ok = True

    def exact(self, key: str, value: Fraction) -> None:
        self.doc["outputs"][key] = format_rational(value)
        self.doc["approximate"][key] = float(value)

    def put(self, key: str, value: Any) -> None:
        self.doc["outputs"][key] = value

    def emit(self, fmt: str, out=None) -> int:
        out = out or sys.stdout
        self.doc["status"] = "ok" if self.ok else "false"
        if fmt == "json":
            out.write(json.dumps(self.doc, indent=2) + "\n")
        else:
            out.write(f"$ {' '.join(self.doc['command'])}\n")
            for key, value in self.doc["outputs"].items():
                out.write(f"{key}: {value if isinstance(value, str) else json.dumps(value)}\n")
            for key in ("certificate", "golden_diff"):
                if key in self.doc:
                    out.write(f"{key}: {json.dumps(self.doc[key])}\n")
            out.write(f"status: {self.doc['status']}\n")
        return EXIT_OK if self.ok else EXIT_FALSE


def _point(v: Sequence[Fraction]) -> list[str]:
    return [format_rational(x) for x in v]


# -- commands -------------------------------------------------------------------------------


def cmd_phi(args: argparse.Namespace, report: Report) -> None:
    from .maminda import check_phi

    if args.m <= 0 or args.n <= 0:
        raise UsageError("M and N must be positive integers")
    r = check_phi(args.m, args.n)
    report.exact("a", r.a)
    for flag in ("univalent", "starlike", "re_positive", "maminda_admissible"):
        report.put(flag, getattr(r, flag))
    report.exact("boundary_min", r.boundary_min)
    if r.witness:
        report.put("witness", [str(z) for z in r.witness])
    report.ok = r.maminda_admissible


def cmd_h2(args: argparse.Namespace, report: Report) -> None:
    from .functional import h2_reduction

    t = args.t
    if not 0 <= t <= Fraction(1, 2):
        raise UsageError(f"t must lie in [0, 1/2], got {t}")
    r = h2_reduction(t)
    report.exact("bound", r.h2_bound)
    report.exact("bound_times_144", r.bound)
    report.exact("maximizer_s", r.maximizer)
    if r.maximizer == 0:
        report.put("extremal", "w(z) = z^2")
    else:
        report.put("extremal", f"w(z) = z(x - z)/(1 - xz) with x^2 = {format_rational(r.maximizer)}")
    report.put("monotone_in_y_certificate", r.derivative_cert.is_valid())


def _failure_summary(name: str, cert) -> dict:
    leaves = []
    for leaf in cert.failures():
        item = {"box": leaf.box.to_json(), "box_text": str(leaf.box)}
        if "witness_max" in leaf.detail:
            item["witness_max"] = format_rational(leaf.detail["witness_max"])
            item["index"] = leaf.detail["index"]
        if "witness_min" in leaf.detail:
            item["witness_min"] = format_rational(leaf.detail["witness_min"])
        if "domination" in leaf.detail:
            item["domination"] = leaf.detail["domination"].get("reason")
        leaves.append(item)
    return {"branch": name, "failed_boxes": leaves}


def cmd_h3_certify(args: argparse.Namespace, report: Report) -> None:
    from .certify import h3_master

    if args.depth < 0 or args.workers < 1:
        raise UsageError("depth must be >= 0 and workers >= 1")
    bound, master = h3_master(depth=args.depth, workers=args.workers, strict=False)
    failure = master.first_failure()
    doc = master.to_json()
    out = Path(args.out)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    report.doc["certificate"] = str(out)
    report.put("stages", {k: [format_rational(v) for v in vs] for k, vs in master.stages.items()})
    report.put("attainment", {k: format_rational(v) for k, v in master.attainment.items()})
    if failure:
        report.ok = False
        report.put("failure", _failure_summary(*failure))
        return
    report.exact("bound", bound)
    report.put("valid", True)


def cmd_reproduce(args: argparse.Namespace, report: Report) -> None:
    from .bernstein import catalog_ids, diff_matrix, golden_matrix, tensor_matrices
    from .functional import majorant_chain

    ids = catalog_ids()
    if args.id not in ids:
        raise UsageError(f"unknown table id {args.id!r}; valid ids: {', '.join(ids)}")
    entry = tensor_matrices(majorant_chain())[args.id]
    computed = entry.matrix()
    diff = diff_matrix(computed, golden_matrix(args.id))
    flat = [(v, (i, j)) for i, row in enumerate(computed) for j, v in enumerate(row)]
    top = max(v for v, _ in flat)
    where = next(ix for v, ix in flat if v == top)
    index = list(where) + ([entry.slice_k] if entry.slice_k is not None else [])
    report.put("box", entry.tensor.box.to_json())
    report.put("degrees", list(entry.tensor.degrees))
    report.exact("max", top)
    report.put("argmax", index)
    report.put("matrix", [[format_rational(v) for v in row] for row in computed])
    report.doc["golden_diff"] = {"match": not diff, "mismatches": diff}
    report.ok = not diff


def _parse_point(text: str) -> tuple[Fraction, ...]:
    return tuple(as_rational(s.strip()) for s in text.split(","))


def cmd_bound(args: argparse.Namespace, report: Report) -> None:
    from .certify import Policy, certificate_document, certify_max

    try:
        poly = MultiPoly.from_json(json.loads(Path(args.file).read_text()))
        box = Box.parse(poly.variables, args.box)
        vertex = _parse_point(args.vertex) if args.vertex else None
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad input: {exc}") from exc
    cert = certify_max(poly, box, args.max, Policy(args.depth, vertex))
    report.put("valid", cert.is_valid())
    report.put("leaves", len(cert.leaves()))
    if cert.bound is not None:
        report.exact("enclosure_bound", cert.bound)
    if not cert.is_valid():
        report.ok = False
        report.put("failure", _failure_summary("bound", cert))
    if args.out:
        Path(args.out).write_text(json.dumps(certificate_document(cert, poly, args.max), indent=2) + "\n")
        report.doc["certificate"] = args.out


def cmd_extremal(args: argparse.Namespace, report: Report) -> None:
    from .series import SchwarzSpec, expand_subordinate, extremal_expand, hankel_from_taylor, schwarz_series

    if args.terms < 5:
        raise UsageError("--terms must be at least 5")
    if args.schwarz == "blaschke":
        if args.x is None or not 0 <= args.x <= 1:
            raise UsageError("blaschke needs --x in [0, 1]")
        spec = SchwarzSpec.blaschke(args.x)
    else:
        spec = SchwarzSpec.monomial(2 if args.schwarz == "z2" else 3)
    a = expand_subordinate(schwarz_series(spec, args.terms), args.t, args.terms)
    report.put("coefficients", [format_rational(c) for c in a])
    h2, h3 = hankel_from_taylor(a[1:])
    report.exact("H2", h2)
    report.exact("H3", h3)
    if args.schwarz != "blaschke":
        kind = "h2_monomial" if args.schwarz == "z2" else "h3_monomial"
        need = 8 if kind == "h2_monomial" else 11
        n = max(args.terms + 1, need)
        closed = extremal_expand(kind, args.t, n).coeffs[1 : args.terms + 1]
        report.put("integral_form_agrees", list(closed) == list(a))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hankelcert", description="Certified Hankel determinant bounds.")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi", help="class conditions for phi(z) = 1 + z + (M/N) z^2")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("h2", help="sharp bound on |H_2(2)|")
    p.add_argument("--t", type=_rat, required=True)
    p.set_defaults(func=cmd_h2)

    p = sub.add_parser("h3-certify", help="certify |H_3(1)| <= 1/144")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="h3-certificate.json")
    p.set_defaults(func=cmd_h3_certify)

    p = sub.add_parser("reproduce", help="recompute a published coefficient matrix")
    p.add_argument("id")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("bound", help="certify an upper bound for a polynomial on a box")
    p.add_argument("file")
    p.add_argument("--box", required=True, help='e.g. "0:1,0:1/2"')
    p.add_argument("--max", type=_rat, required=True)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--vertex", help='e.g. "0,0"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("extremal", help="Taylor coefficients for an extremal Schwarz function")
    p.add_argument("--schwarz", choices=("z2", "z3", "blaschke"), required=True)
    p.add_argument("--x", type=_rat)
    p.add_argument("--t", type=_rat, required=True)
    p.add_argument("--terms", type=int, required=True)
    p.set_defaults(func=cmd_extremal)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    inputs = {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items() if k not in ("func", "format", "verbose", "command")}
    report = Report(["hankelcert"] + argv, inputs)
    try:
        args.func(args, report)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return report.emit(args.format)


if __name__ == "__main__":
    raise SystemExit(main())
