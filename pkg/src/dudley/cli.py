"""Command-line front end.

Subcommands: approximate, verify, audit, bench, render.  Exit codes are part
of the contract so scripts can branch without parsing output: 0 success,
1 usage or malformed input, 2 violated precondition (body fails the
exact-mode sandwich), 3 geometric failure (unbounded hull, packing failure).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import io
from .approx import (
    MODE_EXACT,
    MODE_GENERAL,
    DudleyConfig,
    approximate,
    audit_proof,
)
from .errors import (
    DimensionMismatchError,
    DudleyError,
    FormatError,
    GeometryError,
    SandwichError,
)
from .render import render_svg
from .verify import check_containment, exact_gap_2d, hausdorff_gap

_MODE_FLAGS = {"paper-exact": MODE_EXACT, "generalized": MODE_GENERAL}


class _Parser(argparse.ArgumentParser):
    # Usage problems must exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _write_or_print(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_approximate(args) -> int:
    if args.eps <= 0 or not math.isfinite(args.eps):
        sys.stderr.write("error: --eps must be a positive number\n")
        return 1
    body = io.load_body(args.body)
    config = DudleyConfig(epsilon=args.eps, mode=_MODE_FLAGS[args.mode],
                          seed=args.seed)
    construction, report = approximate(body, config)
    io.dump(io.construction_to_dict(construction), args.out)
    if args.report:
        io.dump(io.report_to_dict(report), args.report)
    sys.stdout.write(
        f"halfspaces={report.halfspace_count} delta={report.delta:.6g} "
        f"containment={'ok' if report.containment_ok else 'FAIL'} "
        f"hausdorff~{report.hausdorff_estimate:.6g} "
        f"({report.runtime_ms:.0f} ms)\n")
    return 0


def cmd_verify(args) -> int:
    if args.eps < 0 or not math.isfinite(args.eps):
        sys.stderr.write("error: --eps must be nonnegative\n")
        return 1
    if args.dirs < 1:
        sys.stderr.write("error: --dirs must be at least 1\n")
        return 1
    body = io.load_body(args.body)
    if args.exact and body.dim != 2:
        sys.stderr.write("error: --exact requires a 2-d body\n")
        return 1
    D = io.load_hpolytope(args.hpoly)
    containment = check_containment(body, D, 1e-8)
    gap = hausdorff_gap(body, D, args.dirs, args.seed)
    pad = 1e-9
    passed = containment.ok and gap.estimate <= args.eps + pad
    out = {
        "epsilon": args.eps,
        "containment": {"ok": containment.ok,
                        "worst_violation": containment.worst_violation},
        "hausdorff": {"estimate": gap.estimate,
                      "worst_direction": gap.worst_direction,
                      "n_directions": gap.n_directions,
                      "certified": gap.certified},
    }
    if args.exact:
        exact = exact_gap_2d(body, D)
        out["exact_gap_2d"] = exact
        passed = passed and exact <= args.eps + pad
    out["passed"] = passed
    _write_or_print(io.dumps(out), args.out)
    return 0 if passed else 3


def cmd_audit(args) -> int:
    if args.samples < 1:
        sys.stderr.write("error: --samples must be at least 1\n")
        return 1
    construction = io.load_construction(args.construction)
    audit = audit_proof(construction, args.samples, args.seed)
    _write_or_print(io.dumps(io.audit_to_dict(audit)), args.out)
    n_bad = len(audit.violations)
    sys.stderr.write(f"audit: {audit.n_samples} samples, "
                     f"{n_bad} violation(s)\n")
    return 0 if n_bad == 0 else 3


def cmd_bench(args) -> int:
    try:
        ladder = [float(tok) for tok in args.eps_ladder.split(",") if tok.strip()]
    except ValueError:
        sys.stderr.write("error: --eps-ladder must be comma-separated floats\n")
        return 1
    if len(ladder) < 3:
        sys.stderr.write("error: need at least 3 ladder values to fit a slope\n")
        return 1
    if any(e <= 0 for e in ladder):
        sys.stderr.write("error: ladder values must be positive\n")
        return 1
    body = io.load_body(args.body)
    rows = []
    for eps in ladder:
        config = DudleyConfig(epsilon=eps, mode=_MODE_FLAGS[args.mode],
                              seed=args.seed)
        _, report = approximate(body, config)
        rows.append((eps, report.delta, report.halfspace_count,
                     report.hausdorff_estimate, report.runtime_ms))
        sys.stderr.write(f"eps={eps:g}: {report.halfspace_count} halfspaces\n")
    counts = np.array([r[2] for r in rows], dtype=float)
    inv_eps = 1.0 / np.array(ladder)
    slope = float(np.polyfit(np.log(inv_eps), np.log(counts), 1)[0])
    reference = (body.dim - 1) / 2.0

    lines = ["eps,delta,count,hausdorff_estimate,runtime_ms"]
    for eps, delta, count, est, ms in rows:
        lines.append(f"{io.float_repr(eps)},{io.float_repr(delta)},{count},"
                     f"{io.float_repr(est)},{io.float_repr(ms)}")
    lines.append(f"fitted_slope,{io.float_repr(slope)}")
    lines.append(f"reference_slope,{io.float_repr(reference)}")
    _write_or_print("\n".join(lines), args.out)
    return 0


def cmd_render(args) -> int:
    if args.eps < 0 or not math.isfinite(args.eps):
        sys.stderr.write("error: --eps must be nonnegative\n")
        return 1
    body = io.load_body(args.body)
    if body.dim != 2:
        sys.stderr.write("error: rendering is 2-d only\n")
        return 1
    D = io.load_hpolytope(args.hpoly)
    packing = None
    if args.packing:
        doc = io._load_file(args.packing)
        if isinstance(doc, dict) and "packing" in doc:
            doc = doc["packing"]  # accept a full construction bundle too
        packing = io.packing_from_dict(doc)
    svg = render_svg(body, D, args.eps, packing=packing)
    _write_or_print(svg, args.out)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="dudley",
                     description="Halfspace outer approximation of convex "
                                 "bodies, with verification and auditing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approximate", help="build the halfspace approximation")
    p.add_argument("--body", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="paper-exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("verify", help="check containment and the sampled gap")
    p.add_argument("--body", required=True)
    p.add_argument("--hpoly", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--dirs", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true",
                   help="also run the exact 2-d gap oracle")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("audit", help="replay the gap analysis on samples")
    p.add_argument("--construction", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bench", help="sweep an eps ladder and fit the count slope")
    p.add_argument("--body", required=True)
    p.add_argument("--eps-ladder", required=True,
                   help="comma-separated eps values, at least 3")
    p.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="paper-exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="render body, hull, and eps shell to SVG")
    p.add_argument("--body", required=True)
    p.add_argument("--hpoly", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--packing", default=None,
                   help="packing or construction JSON to overlay points from")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SandwichError as exc:
        sys.stderr.write(f"precondition failed: {exc}\n")
        return 2
    except FormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except DimensionMismatchError as exc:
        # Mismatched artifact files are malformed input, not a geometric failure.
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except GeometryError as exc:
        sys.stderr.write(f"geometry failure: {exc}\n")
        return 3
    except DudleyError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
