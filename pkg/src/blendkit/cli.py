"""Command line front end: ``blendkit <command> ...``.

Exit status is 2 for argument errors, 1 for computation errors and 0
otherwise. Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import BlendError, InvalidSpec
from .expr import Expression, ExpressionDomainError, ExpressionSyntaxError
from .piecewise import DEFAULT_SAMPLES, convergence_study
from .spec import (
    BlendSpec,
    dimension,
    elevate_to_divisible,
    lower_set,
    normalize_sequences,
    predicted_order,
    quasi_uniform_grid,
)
from .surface import BlendedSurface, Rect, control_net_csv, fit, fmt

SERENDIPITY = ((1, 2), (1, 3), (1, 2, 4), (2, 4))


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(count: int):
    def parse(text: str) -> list[float]:
        try:
            vals = [float(t) for t in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        return vals
    return parse


def _ks(text: str) -> list[int]:
    """``1..16`` or ``4,8,16``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 1..16 or a list like 4,8,16, got {text!r}")


def _spec(args) -> BlendSpec:
    m, n = list(args.m), list(args.n)
    if len(m) != len(n) or not m:
        raise UsageError("--m and --n must be non-empty and of equal length")
    for name, seq in (("m", m), ("n", n)):
        if any(a >= b for a, b in zip(seq, seq[1:])) or any(v < 0 for v in seq):
            raise UsageError(f"--{name} must be strictly increasing non-negative integers")
    try:
        return BlendSpec(tuple(m), tuple(n))
    except InvalidSpec as exc:
        if getattr(args, "strict", False):
            raise UsageError(str(exc))
    m2, n2 = elevate_to_divisible(m), elevate_to_divisible(n)
    print(f"warning: degree sequences repaired by degree elevation to m={list(m2)} n={list(n2)}",
          file=sys.stderr)
    return BlendSpec(m2, n2)


def _expression(text: str) -> Expression:
    try:
        return Expression(text)
    except ExpressionSyntaxError as exc:
        raise UsageError(f"--fn: {exc}")


def _rect(vals) -> Rect:
    try:
        return Rect.checked(*vals)
    except ValueError as exc:
        raise UsageError(f"--domain: {exc}")


def _normalized(args):
    m, n = list(args.m), list(args.n)
    if len(m) != len(n) or not m:
        raise UsageError("--m and --n must be non-empty and of equal length")
    try:
        return m, n, normalize_sequences(m, n)
    except InvalidSpec as exc:
        raise UsageError(str(exc))


def cmd_dim(args, out):
    m, n, (mh, nh) = _normalized(args)
    if (list(mh), list(nh)) != (m, n):
        print(f"note: normalized to m={list(mh)} n={list(nh)}", file=sys.stderr)
    out.write(f"dim={dimension(mh, nh)}\n")
    out.write(f"lower_set={len(lower_set(mh, nh))}\n")


def cmd_order(args, out):
    _, _, (mh, nh) = _normalized(args)
    out.write(f"p={predicted_order(mh, nh)}\n")


def cmd_grid(args, out):
    spec = _spec(args)
    grid = quasi_uniform_grid(spec)
    points = grid.sorted_points()
    if args.format == "json":
        doc = {
            "spec": {"m": list(spec.m), "n": list(spec.n)},
            "points": [list(p) for p in points],
            "alpha": [list(a) for a in grid.sequences.alpha],
            "beta": [list(b) for b in grid.sequences.beta],
            "inverse_alpha": [[int(v) for v in t] for t in grid.inverse_alpha],
            "inverse_beta": [[int(v) for v in t] for t in grid.inverse_beta],
        }
        out.write(json.dumps(doc) + "\n")
    else:
        out.write("i,j,level_x,level_y\n")
        for i, j in points:
            out.write(f"{i},{j},{grid.level_of_x(i)},{grid.level_of_y(j)}\n")


def cmd_fit(args, out):
    spec = _spec(args)
    F = _expression(args.fn)
    surface = fit(spec, _rect(args.domain), F)
    text = control_net_csv(surface)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.save:
        with open(args.save, "w") as fh:
            fh.write(surface.dumps() + "\n")


def cmd_eval(args, out):
    try:
        with open(args.surface) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--surface: {exc}")
    surface = BlendedSurface.from_dict(doc)
    u, v = args.at
    out.write(fmt(surface(u, v)) + "\n")


def cmd_converge(args, out):
    spec = _spec(args)
    F = _expression(args.fn)
    ks = args.ks
    if not ks or ks[0] < 1 or any(a >= b for a, b in zip(ks, ks[1:])):
        raise UsageError("--ks must be strictly increasing positive integers")
    if args.tail is not None and args.tail < 2:
        raise UsageError("--tail must be at least 2")
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    table = convergence_study(spec, _rect(args.domain), F, ks, samples_per_cell=args.samples,
                              method=args.method, tail=args.tail)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(table.to_csv())
    else:
        out.write(table.to_csv())
    out.write(table.order_line() + "\n")


def cmd_serendipity(args, out):
    out.write("m,n,dim,p\n")
    for seq in SERENDIPITY:
        label = "[" + ",".join(map(str, seq)) + "]"
        out.write(f'"{label}","{label}",{dimension(seq, seq)},{predicted_order(seq, seq)}\n')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blendkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def degrees(p, repair=True):
        p.add_argument("--m", type=_ints, required=True, help="x degrees, e.g. 2,4")
        p.add_argument("--n", type=_ints, required=True, help="y degrees, e.g. 2,4")
        if repair:
            p.add_argument("--strict", action="store_true", help="reject non-divisible sequences")

    p = sub.add_parser("dim", help="dimension of the blended space")
    degrees(p, repair=False)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("order", help="predicted approximation order")
    degrees(p, repair=False)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("grid", help="quasi-uniform grid and index maps")
    degrees(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("fit", help="fit a surface and emit its control net")
    degrees(p)
    p.add_argument("--domain", type=_floats(4), default=[0.0, 1.0, 0.0, 1.0], help="a,b,c,d")
    p.add_argument("--fn", required=True, help='expression in x and y, e.g. "sin(2*x*y)"')
    p.add_argument("--out", help="write the control net CSV here instead of stdout")
    p.add_argument("--save", help="write the surface JSON (for eval) here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate a saved surface")
    p.add_argument("--surface", required=True, help="surface JSON written by fit --save")
    p.add_argument("--at", type=_floats(2), required=True, help="u,v")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("converge", help="piecewise convergence study")
    degrees(p)
    p.add_argument("--domain", type=_floats(4), default=[0.0, 2.0, 0.0, 2.0], help="a,b,c,d")
    p.add_argument("--fn", required=True)
    p.add_argument("--ks", type=_ks, default=list(range(1, 17)), help="1..16 or 4,8,16")
    p.add_argument("--tail", type=int, help="fit the order on the last N rows only")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="samples per cell and axis")
    p.add_argument("--method", choices=("lstsq", "endpoints"), default="lstsq")
    p.add_argument("--out", help="write the k,h,error CSV here instead of stdout")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("serendipity", help="dimension and order of the serendipity configurations")
    p.set_defaults(func=cmd_serendipity)
    return parser


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"blendkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (BlendError, ExpressionDomainError, OSError, ArithmeticError, ValueError) as exc:
        print(f"blendkit {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
