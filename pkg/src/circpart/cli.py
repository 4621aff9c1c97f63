"""circpart command line: tables, partitions, curves, optimisation, verification."""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .bounds import gamma_one, gamma_theta_kgon
from .construct import KgonFrame, build_partition, optimal_gamma, scaled_initial_gap
from .document import FlatPartition, PartitionDocument, csv_text, format_float, svg_text, write_atomic
from .edgecover import canonical_scaled_gap, classify, steps_to_cover
from .fixedpoint import GAMMA_STAR, positive_fixed_points
from .verify import check_covering, grow_pieces, indisk_center_cells_ok

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_NONTERMINATING = 2
EXIT_USAGE = 3

TABLE_KS = range(3, 9)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _k_arg(args) -> int:
    k = args.k if args.k is not None else args.k_pos
    if k is None:
        raise UsageError("a polygon size k is required")
    return k


def best_gamma(k: int) -> float:
    """gamma_theta when the corner bound already closes, otherwise the searched optimum."""
    g = gamma_theta_kgon(k)
    if k <= 4 or build_partition(k, g, max_disks=1 << 16).terminated:
        return g
    return optimal_gamma(k)


def table_rows(with_counts: bool = True) -> List[list]:
    rows = []
    for k in TABLE_KS:
        g1, gt = gamma_one(k), gamma_theta_kgon(k)
        gs = best_gamma(k)
        pieces = None
        if with_counts:
            p = build_partition(k, gs)
            pieces = p.piece_count if p.terminated else None
        rows.append([k, g1, gt, gs, pieces])
    return rows


def cmd_table(args) -> int:
    rows = table_rows(not args.no_counts)
    header = ["k", "gamma_one", "gamma_theta", "gamma_star", "pieces"]
    if args.csv:
        write_atomic(args.csv, csv_text(header, rows))
    lines = [f"{'k':>3} {'gamma_1':>9} {'gamma_theta':>11} {'gamma*':>9} {'pieces':>11}"]
    for k, g1, gt, gs, n in rows:
        lines.append(f"{k:>3} {g1:9.5f} {gt:11.5f} {gs:9.5f} {('-' if n is None else str(n)):>11}")
    lines.append("  k   1/cos(pi/k)   (1 + csc(theta/2))/2")
    print("\n".join(lines))
    return EXIT_OK


def _nontermination_report(k: int, gamma: float) -> dict:
    a0 = scaled_initial_gap(KgonFrame(k), gamma)
    cls = classify(a0, gamma) if a0 > 0 else None
    return {"k": k, "gamma": gamma, "scaled_gap": a0,
            "region": None if cls is None else cls.region,
            "fixed_points": [] if cls is None else list(cls.fixed_points)}


def cmd_partition(args) -> int:
    k = _k_arg(args)
    if args.gamma in (None, "auto"):
        gamma = best_gamma(k)
    else:
        try:
            gamma = float(args.gamma)
        except ValueError:
            raise UsageError(f"--gamma must be a number or 'auto', got {args.gamma!r}") from None
    a0 = scaled_initial_gap(KgonFrame(k), gamma)
    if a0 > 0 and gamma > 1 and not classify(a0, gamma).terminates:
        report = _nontermination_report(k, gamma)
        print(json.dumps({"error": "nonterminating", **report}), file=sys.stderr)
        return EXIT_NONTERMINATING
    try:
        p = build_partition(k, gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = {"k": k, "gamma": gamma, "piece_count": p.piece_count, "terminated": p.terminated,
               "depth": p.depth, "steps": p.steps, "residual": p.canonical_gap.residual}
    if not p.terminated:
        print(json.dumps({"error": "nonterminating", **summary,
                          **_nontermination_report(k, gamma)}), file=sys.stderr)
        return EXIT_NONTERMINATING
    if (args.out or args.svg) and p.piece_count > args.max_pieces:
        raise UsageError(f"{p.piece_count} pieces exceed --max-pieces {args.max_pieces}")
    if args.out:
        write_atomic(args.out, PartitionDocument.from_partition(p).to_json())
    if args.svg:
        write_atomic(args.svg, svg_text(p, args.svg_min_radius))
    print(json.dumps(summary))
    return EXIT_OK


def _grid(lo: float, hi: float, n: int) -> np.ndarray:
    if not 1 < lo < hi:
        raise UsageError("need 1 < gamma-min < gamma-max")
    if n < 2:
        raise UsageError("need at least 2 points")
    return np.linspace(lo, hi, n)


def steps_curve(gammas: Sequence[float], cap: int = 100_000) -> List[list]:
    return [[float(g), steps_to_cover(canonical_scaled_gap(g), float(g), cap)] for g in gammas]


def cmd_steps_curve(args) -> int:
    rows = steps_curve(_grid(args.gamma_min, args.gamma_max, args.points))
    _emit(csv_text(["gamma", "steps"], rows), args.csv)
    return EXIT_OK


def fixed_point_curve(gammas: Sequence[float]) -> List[list]:
    rows = []
    for g in gammas:
        roots = positive_fixed_points(float(g))
        a1, a2 = roots if roots else (None, None)
        rows.append([float(g), a1, a2, 2.0 * math.sqrt(g - 1.0)])
    return rows


def cmd_fixed_point_curve(args) -> int:
    if args.gamma_max > 1.3:
        raise UsageError("the fixed-point grid must lie inside (1, 1.3]")
    rows = fixed_point_curve(_grid(args.gamma_min, args.gamma_max, args.points))
    _emit(csv_text(["gamma", "a1_star", "a2_star", "delta_scaled"], rows), args.csv)
    return EXIT_OK


def optimize_row(k: int) -> dict:
    opt = optimal_gamma(k)
    g1 = gamma_one(k)
    return {"k": k, "gamma_theta": gamma_theta_kgon(k), "optimal_gamma": opt, "gamma_one": g1,
            "winner": "one-piece" if opt >= g1 - 1e-7 else "construction"}


def cmd_optimize(args) -> int:
    k = _k_arg(args)
    if k < 5:
        raise UsageError("optimize needs k >= 5")
    print(json.dumps(optimize_row(k)))
    if args.csv:
        hi = args.k_max if args.k_max is not None else max(k, 12)
        rows = [optimize_row(j) for j in range(5, hi + 1)]
        header = ["k", "gamma_theta", "optimal_gamma", "gamma_one", "winner"]
        write_atomic(args.csv, csv_text(header, [[r[h] for h in header] for r in rows]))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.document, encoding="utf-8") as fh:
            doc = PartitionDocument.from_json(fh.read())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read document: {exc}") from None
    part = FlatPartition.from_document(doc)
    if not part.terminated:
        print(json.dumps({"ok": False, "error": "document is not a terminated partition"}))
        return EXIT_NONTERMINATING
    rep = check_covering(part, args.samples, args.seed)
    out = {"samples_total": rep.samples_total, "samples_uncovered": rep.samples_uncovered,
           "worst_point": None if rep.worst_point is None else [rep.worst_point.x, rep.worst_point.y],
           "disjointness_violations": [list(p) for p in rep.disjointness_violations]}
    failures = []
    if rep.samples_uncovered:
        failures.append("uncovered samples")
    if rep.disjointness_violations:
        failures.append("indisk overlap")
    try:
        grid = grow_pieces(part, args.resolution)
        comps = grid.components()
        out["regions"] = len(comps)
        out["disconnected"] = sorted(pid for pid, n in comps.items() if n != 1)
        out["misplaced_indisks"] = indisk_center_cells_ok(part, grid)
        if out["disconnected"]:
            failures.append("disconnected pieces")
    except ValueError as exc:
        out["growth_error"] = str(exc)
        failures.append("growth")
    out["failures"] = failures
    out["ok"] = not failures
    print(json.dumps(out))
    return EXIT_OK if not failures else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="circpart", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("table", help="bounds and achieved ratios for k = 3..8")
    t.add_argument("--csv")
    t.add_argument("--no-counts", action="store_true", help="skip building partitions for piece counts")
    t.set_defaults(fn=cmd_table)

    p = sub.add_parser("partition", help="build one k-gon partition")
    p.add_argument("k_pos", nargs="?", type=int, metavar="k")
    p.add_argument("--k", type=int)
    p.add_argument("--gamma", default="auto")
    p.add_argument("--out", help="PartitionDocument JSON path")
    p.add_argument("--svg")
    p.add_argument("--svg-min-radius", type=float, default=1e-4)
    p.add_argument("--max-pieces", type=int, default=2_000_000)
    p.set_defaults(fn=cmd_partition)

    s = sub.add_parser("steps-curve", help="steps to cover the canonical gap versus gamma")
    s.add_argument("--gamma-min", type=float, default=GAMMA_STAR + 1e-6)
    s.add_argument("--gamma-max", type=float, default=1.3)
    s.add_argument("--points", type=int, default=400)
    s.add_argument("--csv")
    s.set_defaults(fn=cmd_steps_curve)

    f = sub.add_parser("fixed-point-curve", help="positive fixed points of the gap map versus gamma")
    f.add_argument("--gamma-min", type=float, default=1.001)
    f.add_argument("--gamma-max", type=float, default=1.3)
    f.add_argument("--points", type=int, default=300)
    f.add_argument("--csv")
    f.set_defaults(fn=cmd_fixed_point_curve)

    o = sub.add_parser("optimize", help="best ratio reachable by the construction")
    o.add_argument("k_pos", nargs="?", type=int, metavar="k")
    o.add_argument("--k", type=int)
    o.add_argument("--k-max", type=int, help="upper k for the --csv sweep")
    o.add_argument("--csv")
    o.set_defaults(fn=cmd_optimize)

    v = sub.add_parser("verify", help="check a PartitionDocument")
    v.add_argument("document")
    v.add_argument("--samples", type=int, default=100_000)
    v.add_argument("--resolution", type=float, default=1.0 / 512)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"circpart: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"circpart: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
