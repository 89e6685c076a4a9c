"""Command-line front end: ``fplab {classify,solve,sweep,pmin,verify-metric}``.

Maps come from exactly one source:

* ``--map paper-piecewise`` / ``--map linear-scale:0.9`` (or ``--map
  linear-scale --lambda 0.9``) / ``--map constant:0.5``;
* ``--map PATH`` naming a piecewise-linear map file;
* ``--matrix PATH --table i0,i1,...`` for a map on a finite metric space.

JSON goes to ``--out-json`` (stdout when omitted). CSV artifacts are only
written when ``--out-csv`` is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import bridge_report
from .contraction import DEFAULT_P_MAX, alpha_singh_chatterjea, classify
from .errors import FplabError, InvalidParameterError, MissingParameterError
from .maps import (
    gallery_constant,
    gallery_linear_scale,
    gallery_paper_piecewise,
    load_piecewise_map,
    table_map,
)
from .solver import BOUND, MODES, StopRule, fmt, format_point, picard, uniqueness_probe
from .space import SamplePlan, box, interval, load_finite_space, sample_points, verify_metric_axioms

DEFAULT_SEED = 42
DEFAULT_GRID = 101


def _default_seed() -> int:
    raw = os.environ.get("FPLAB_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise InvalidParameterError(f"FPLAB_SEED: not an integer: {raw!r}") from None


def _number(field: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidParameterError(f"{field}: not a number: {text!r}") from None


def resolve_map(args):
    if args.map and args.matrix:
        raise InvalidParameterError("map: give either --map or --matrix, not both")
    if args.matrix:
        if not args.table:
            raise MissingParameterError("table: --matrix needs --table with one image index per point")
        try:
            table = [int(v) for v in args.table.split(",")]
        except ValueError:
            raise InvalidParameterError(f"table: not a comma-separated index list: {args.table!r}") from None
        return table_map(load_finite_space(args.matrix), table, name=Path(args.matrix).stem)
    if not args.map:
        raise MissingParameterError("map: one of --map or --matrix is required")

    name, _, param = args.map.partition(":")
    if name == "paper-piecewise" and not param:
        return gallery_paper_piecewise()
    if name == "linear-scale":
        if param:
            lam = _number("map", param)
        elif getattr(args, "lam", None) is not None:
            lam = args.lam
        else:
            raise MissingParameterError("lambda: linear-scale needs a constant (linear-scale:0.9 or --lambda)")
        return gallery_linear_scale(lam)
    if name == "constant":
        if not param:
            raise MissingParameterError("map: constant needs a value, e.g. constant:0.5")
        return gallery_constant(_number("map", param))
    path = Path(args.map)
    if not path.is_file():
        raise InvalidParameterError(f"map: not a gallery name or readable file: {args.map!r}")
    return load_piecewise_map(path)


def resolve_plan(args) -> SamplePlan:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.grid is not None and args.random is not None:
        raise InvalidParameterError("grid: give either --grid or --random, not both")
    if args.random is not None:
        return SamplePlan("random", args.random, seed)
    return SamplePlan("grid", DEFAULT_GRID if args.grid is None else args.grid, seed)


def parse_point(space, text: str, field: str):
    text = text.strip()
    if space.kind == "finite":
        try:
            x = int(text)
        except ValueError:
            raise InvalidParameterError(f"{field}: expected an integer index, got {text!r}") from None
    elif space.kind == "interval":
        x = _number(field, text)
    else:
        x = tuple(_number(field, v) for v in text.split(";"))
    if not space.contains(x):
        raise InvalidParameterError(f"{field}: {text!r} is not a point of the space")
    return x


def parse_space(text: str):
    """``interval:a:b`` or ``box:a:b,c:d,...``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "interval":
            a, b = rest.split(":")
            return interval(float(a), float(b))
        if kind == "box":
            axes = [tuple(float(v) for v in ax.split(":")) for ax in rest.split(",")]
            if any(len(ax) != 2 for ax in axes):
                raise ValueError
            return box(axes)
    except ValueError:
        pass
    raise InvalidParameterError(f"space: expected interval:a:b or box:a:b,c:d, got {text!r}")


def _stop(args) -> StopRule:
    return StopRule(eps=args.eps, max_iters=args.max_iters, mode=args.mode)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit_json(args, obj) -> None:
    text = _dump(obj)
    if args.out_json:
        Path(args.out_json).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args) -> int:
    T = resolve_map(args)
    report = classify(T, resolve_plan(args), args.p_max)
    if args.out_csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "p", "alpha", "holds", "witness_x", "witness_y"])
        for e in report.estimates():
            wx, wy = ("", "") if e.witness is None else map(format_point, e.witness)
            w.writerow([e.condition.kind, e.condition.p, fmt(e.value), e.holds, wx, wy])
        Path(args.out_csv).write_text(buf.getvalue())
    _emit_json(args, report.to_dict())
    return 0


def _alpha_for(args, T):
    if args.alpha is not None:
        return args.alpha
    if args.mode != BOUND:
        return None
    plan = resolve_plan(args)
    est = alpha_singh_chatterjea(T, args.p, sample_points(T.space, plan), seed=plan.seed)
    if not est.holds:
        raise InvalidParameterError(
            f"alpha: sampled estimate {est.value!r} at p={args.p} is not below 1/2; BOUND mode unavailable"
        )
    return est.value


def cmd_solve(args) -> int:
    T = resolve_map(args)
    x0 = parse_point(T.space, args.x0, "x0") if args.x0 is not None else _default_start(T.space)
    trace = picard(T, args.p, x0, _stop(args), _alpha_for(args, T))
    if args.out_csv:
        trace.write_csv(args.out_csv)
    _emit_json(args, trace.summary())
    return 0


def _default_start(space):
    if space.kind == "finite":
        return 0
    if space.kind == "interval":
        return space.lower[0]
    return tuple(space.lower)


def cmd_sweep(args) -> int:
    T = resolve_map(args)
    if not args.starts:
        raise MissingParameterError("starts: --starts a,b,... is required")
    starts = [parse_point(T.space, s, "starts") for s in args.starts.split(",")]
    probe = uniqueness_probe(T, args.p, starts, _stop(args), _alpha_for(args, T))
    if args.out_csv:
        out = Path(args.out_csv)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["start", "n", "x", "delta"])
        for k, trace in enumerate(probe.traces):
            for row in trace.rows:
                w.writerow([format_point(trace.start), row.n, format_point(row.x), fmt(row.delta)])
            trace.write_csv(out.with_name(f"{out.stem}_start{k}{out.suffix or '.csv'}"))
        out.write_text(buf.getvalue())
    summary = {"map": T.name, "p": args.p, "eps": args.eps, "starts": [format_point(s) for s in starts]}
    summary.update(probe.summary())
    _emit_json(args, summary)
    return 0


def cmd_pmin(args) -> int:
    if args.lam is None:
        raise MissingParameterError("lambda: --lambda is required")
    if args.map or args.matrix:
        T = resolve_map(args)
        report = bridge_report(args.lam, T, resolve_plan(args), args.p_max)
    else:
        report = bridge_report(args.lam)
    _emit_json(args, report.to_dict())
    return 0


def cmd_verify_metric(args) -> int:
    if args.space:
        if args.map or args.matrix:
            raise InvalidParameterError("space: give either --space or a map source, not both")
        space = parse_space(args.space)
    elif args.matrix and not args.table:
        space = load_finite_space(args.matrix)
    else:
        space = resolve_map(args).space
    report = verify_metric_axioms(space, resolve_plan(args))
    _emit_json(args, report.to_dict())
    return 0


def _add_map_args(p):
    p.add_argument("--map", help="gallery name (paper-piecewise, linear-scale[:lam], constant:c) or map file")
    p.add_argument("--matrix", help="distance-matrix file for a finite space")
    p.add_argument("--table", help="comma-separated image indices for --matrix maps")
    p.add_argument("--lambda", dest="lam", type=float, help="Banach constant / linear-scale factor")


def _add_plan_args(p):
    p.add_argument("--grid", type=int, metavar="N", help=f"N-point uniform grid (default {DEFAULT_GRID})")
    p.add_argument("--random", type=int, metavar="N", help="N seeded pseudorandom points")
    p.add_argument("--seed", type=int, help="sampling seed (default $FPLAB_SEED or 42)")


def _add_solver_args(p):
    p.add_argument("--p", type=int, default=1, help="iterate S = T^p (default 1)")
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--mode", choices=MODES, default="displacement")
    p.add_argument("--alpha", type=float, help="known cross-condition constant of T^p")


def _add_out_args(p, csv=True):
    p.add_argument("--out-json", metavar="PATH")
    if csv:
        p.add_argument("--out-csv", metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fplab", description="Fixed-point contraction toolkit.")
    parser.add_argument("--version", action="version", version=f"fplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="estimate contraction constants for every class")
    _add_map_args(p)
    _add_plan_args(p)
    p.add_argument("--p-max", type=int, default=DEFAULT_P_MAX)
    _add_out_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="Picard iteration from one start")
    _add_map_args(p)
    _add_plan_args(p)
    _add_solver_args(p)
    p.add_argument("--x0", help="starting point (scalar, a;b for boxes, index for finite)")
    _add_out_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="Picard iteration from several starts")
    _add_map_args(p)
    _add_plan_args(p)
    _add_solver_args(p)
    p.add_argument("--starts", help="comma-separated starting points")
    _add_out_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pmin", help="minimal iterate for a Banach constant")
    _add_map_args(p)
    _add_plan_args(p)
    p.add_argument("--p-max", type=int, default=DEFAULT_P_MAX)
    _add_out_args(p, csv=False)
    p.set_defaults(func=cmd_pmin)

    p = sub.add_parser("verify-metric", help="check the metric axioms on samples")
    _add_map_args(p)
    _add_plan_args(p)
    p.add_argument("--space", help="interval:a:b or box:a:b,c:d (instead of a map)")
    _add_out_args(p, csv=False)
    p.set_defaults(func=cmd_verify_metric)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FplabError, OSError) as exc:
        print(f"fplab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
