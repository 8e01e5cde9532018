"""Command line front end.

Subcommands map one-to-one onto the library operations::

    convex-tail bound --dist exp:1 --s 1
    convex-tail envelope --dist exp:1 --grid 100 --format csv
    convex-tail extremal --dist exp:1 --s 1 --format csv
    convex-tail hinge --dist exp:1 --t 2
    convex-tail transfer --q const:1 --p 2 --T 1 --gamma 1 --ts 1,2,3
    convex-tail ratio --dist pareto:2,1 --x 0.25 --R 4
    convex-tail kemperman --r 2
    convex-tail regularity --dist pareto:2,1 --p 2
    convex-tail verify --x-dist atoms:1:1 --y-dist exp:1 --checks prop2,prop4
    convex-tail counterexample --nmax 20 --format csv

Distribution specs follow the grammar of
:func:`convex_tail.distributions.parse_distribution`.  Reals are printed
with 17 significant digits so CSV output round-trips exactly.  The default
seed comes from ``--seed`` or the ``CONVEX_TAIL_SEED`` environment variable.

Exit status: 0 on success, 1 when a mathematical hypothesis or precondition
fails (diagnostics, including both sides of the failed inequality, go to
stderr), 2 on usage errors such as unknown flags or malformed specs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import envelope as env_mod
from . import majorization as maj_mod
from . import oracle as oracle_mod
from .distributions import AtomicMixture, parse_distribution
from .errors import (
    DomainError,
    HypothesisError,
    NumericalError,
    PreconditionError,
    SpecParseError,
)

USAGE_EXIT = 2
HYPOTHESIS_EXIT = 1


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _parse_q(spec: str):
    """Threshold-scale functions for ``transfer``: const:C, max:C, expsq:P."""
    if ":" not in spec:
        raise SpecParseError(f"--q {spec!r}: expected FORM:ARG")
    form, arg = spec.split(":", 1)
    try:
        c = float(arg)
    except ValueError:
        raise SpecParseError(f"--q {spec!r}: {arg!r} is not a number") from None
    if form == "const":
        if c <= 0:
            raise SpecParseError(f"--q {spec!r}: constant must be positive")
        return lambda t: c
    if form == "max":
        if c <= 0:
            raise SpecParseError(f"--q {spec!r}: floor must be positive")
        return lambda t: max(t, c)
    if form == "expsq":
        if c <= 1:
            raise SpecParseError(f"--q {spec!r}: exponent parameter must exceed 1")
        return lambda t: float(np.exp(t * t / (2.0 * c)))
    raise SpecParseError(f"--q {spec!r}: unknown form {form!r}")


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise SpecParseError(f"{flag} {text!r}: {exc}") from None


def _parse_r(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return float("inf")
    try:
        return float(text)
    except ValueError:
        raise SpecParseError(f"--r {text!r} is not a number or 'inf'") from None


def _print_curve(curve, fmt, extra_cols=None):
    if fmt == "csv":
        print(curve.to_csv(), end="")
    elif fmt == "json":
        print(curve.to_json())
    else:
        print(f"# {curve.source} ({curve.meaning})")
        header = ["x", "value"] + (list(extra_cols or {}))
        print("  ".join(f"{h:>24}" for h in header))
        cols = [curve.abscissas, curve.values] + [v for v in (extra_cols or {}).values()]
        for row in zip(*cols):
            print("  ".join(f"{_fmt(v):>24}" for v in row))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"),
                        default="table", help="output format")
    common.add_argument("--seed", type=int, default=None,
                        help="deterministic seed (default: $CONVEX_TAIL_SEED or 0)")

    p = argparse.ArgumentParser(
        prog="convex-tail",
        description="Tail and quantile bounds under increasing convex domination.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("bound", parents=[common],
                        help="sharp conditional tail bound for a threshold s")
    sp.add_argument("--dist", required=True, help="law of the dominating Y")
    sp.add_argument("--s", type=float, required=True)

    sp = sub.add_parser("envelope", parents=[common],
                        help="averaged-quantile envelope curve")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--grid", type=int, default=100, help="number of levels")

    sp = sub.add_parser("extremal", parents=[common],
                        help="law attaining the sharp bound (tail collapsed)")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--knots", type=int, default=4097,
                    help="grid knots for serializing a continuous law")

    sp = sub.add_parser("hinge", parents=[common],
                        help="optimal hinge ray for a level t above the mean")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--t", type=float, required=True)

    sp = sub.add_parser("transfer", parents=[common],
                        help="sub-Gaussian tail transfer at inflated thresholds")
    sp.add_argument("--q", required=True, help="Q spec: const:C | max:C | expsq:P")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--ts", default="0.5,1,1.5,2,2.5,3",
                    help="comma-separated positive t values")

    sp = sub.add_parser("ratio", parents=[common],
                        help="multiplicative tail comparison at the averaged threshold")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)

    sp = sub.add_parser("kemperman", parents=[common],
                        help="sharp constant (1-1/r)^(-r), e at r=inf")
    sp.add_argument("--r", required=True)

    sp = sub.add_parser("regularity", parents=[common],
                        help="estimate the tail-regularity constant T")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--p", type=float, required=True)

    sp = sub.add_parser("verify", parents=[common],
                        help="re-check the tail inequalities on a concrete pair")
    sp.add_argument("--x-dist", required=True)
    sp.add_argument("--y-dist", required=True)
    sp.add_argument("--checks", default="prop2,prop4,prop7")
    sp.add_argument("--s", default=None, help="comma-separated thresholds")
    sp.add_argument("--xs", default=None, help="comma-separated levels in (0,1)")
    sp.add_argument("--R", type=float, default=2.0)
    sp.add_argument("--samples", type=int, default=10 ** 6)

    sp = sub.add_parser("counterexample", parents=[common],
                        help="quantile-ratio blow-up under convex domination")
    sp.add_argument("--nmax", type=int, default=20)
    return p


def _cmd_bound(args) -> int:
    d = parse_distribution(args.dist)
    sb = maj_mod.sharp_tail_bound(d, args.s)
    if args.format == "json":
        print(json.dumps({"s": sb.s, "threshold": sb.threshold,
                          "bound": sb.bound, "degenerate": sb.degenerate}))
    elif args.format == "csv":
        print("s,threshold,bound,degenerate")
        print(f"{_fmt(sb.s)},{_fmt(sb.threshold)},{_fmt(sb.bound)},{sb.degenerate}")
    else:
        if sb.degenerate:
            print(f"P{{Y > {_fmt(sb.s)}}} = 0, hence P{{X > {_fmt(sb.s)}}} = 0")
        else:
            print(f"threshold {_fmt(sb.threshold)}")
            print(f"bound     {_fmt(sb.bound)}")
    return 0


def _cmd_envelope(args) -> int:
    d = parse_distribution(args.dist)
    if args.grid < 1:
        raise SpecParseError("--grid must be positive")
    xs = [(i + 1.0) / (args.grid + 1.0) for i in range(args.grid)]
    _print_curve(env_mod.quantile_envelope(d, xs), args.format)
    return 0


def _cmd_extremal(args) -> int:
    d = parse_distribution(args.dist)
    x = maj_mod.extremal_construction(d, args.s)
    if isinstance(x, AtomicMixture):
        print(x.spec_string())
        return 0
    # continuous part sampled on a grid, atom encoded as a flat top segment
    q = 1.0 - x.atom_prob
    if args.knots < 2:
        raise SpecParseError("--knots must be at least 2")
    if q < 1e-7:
        print(AtomicMixture([(x.atom_value, 1.0)]).spec_string())
        return 0
    lo = min(1e-7, q / 2.0)
    us = np.concatenate([np.linspace(lo, q, args.knots),
                         [q + 1e-12, 1.0 - 1e-12]])
    hs = np.asarray(x.quantile(us))
    if args.format == "json":
        print(json.dumps({"atom_value": x.atom_value, "atom_prob": x.atom_prob,
                          "points": [[float(u), float(h)] for u, h in zip(us, hs)]}))
    else:
        for u, h in zip(us, hs):
            print(f"{_fmt(u)},{_fmt(h)}")
    return 0


def _cmd_hinge(args) -> int:
    d = parse_distribution(args.dist)
    hm = maj_mod.optimal_hinge(d, args.t)
    if args.format == "json":
        print(json.dumps({"t": hm.hinge.t, "a": hm.hinge.a,
                          "kink": hm.kink, "objective": hm.objective}))
    elif args.format == "csv":
        print("t,a,kink,objective")
        print(",".join(_fmt(v) for v in (hm.hinge.t, hm.hinge.a, hm.kink,
                                         hm.objective)))
    else:
        print(f"slope     {_fmt(hm.hinge.a)}")
        print(f"kink      {_fmt(hm.kink)}")
        print(f"objective {_fmt(hm.objective)}")
    return 0


def _cmd_transfer(args) -> int:
    Q = _parse_q(args.q)
    ts = _float_list(args.ts, "--ts")
    curve = env_mod.gaussian_transfer(Q, args.p, args.T, args.gamma, ts)
    _print_curve(curve, args.format, extra_cols={"t": ts})
    return 0


def _cmd_ratio(args) -> int:
    d = parse_distribution(args.dist)
    t, bound = env_mod.tail_ratio_bound(d, args.x, args.R)
    if args.format == "json":
        print(json.dumps({"x": args.x, "R": args.R, "t": t, "bound": bound}))
    elif args.format == "csv":
        print("x,R,t,bound")
        print(",".join(_fmt(v) for v in (args.x, args.R, t, bound)))
    else:
        print(f"t     {_fmt(t)}")
        print(f"bound {_fmt(bound)}")
    return 0


def _cmd_kemperman(args) -> int:
    c = env_mod.kemperman_constant(_parse_r(args.r))
    if args.format == "json":
        print(json.dumps({"r": args.r, "constant": c}))
    else:
        print(_fmt(c))
    return 0


def _cmd_regularity(args) -> int:
    d = parse_distribution(args.dist)
    reg = env_mod.check_regularity(d, args.p)
    flags = {}
    if d.is_non_atomic():
        flags = env_mod.derivative_conditions(d, reg.p, reg.T)
    if args.format == "json":
        print(json.dumps({"p": reg.p, "T": reg.T, **flags}))
    else:
        print(f"T {_fmt(reg.T)}")
        for k, v in flags.items():
            print(f"{k} {v}")
    return 0


def _cmd_verify(args, seed: int) -> int:
    x_law = parse_distribution(args.x_dist)
    y_law = parse_distribution(args.y_dist)
    checks = tuple(c for c in args.checks.split(",") if c)
    for c in checks:
        if c not in oracle_mod.KNOWN_CHECKS:
            raise SpecParseError(f"--checks: unknown check {c!r}")
    s_values = _float_list(args.s, "--s") if args.s else None
    x_values = _float_list(args.xs, "--xs") if args.xs else None
    reports = oracle_mod.verify_bound(
        x_law, y_law, checks, s_values=s_values, x_values=x_values,
        R=args.R, mc_samples=args.samples, seed=seed)
    if args.format == "json":
        for r in reports:
            print(r.to_json())
    elif args.format == "csv":
        print("check_name,method,lhs,rhs,slack,tolerance,passed")
        for r in reports:
            print(f"{r.check_name},{r.method},{_fmt(r.lhs)},{_fmt(r.rhs)},"
                  f"{_fmt(r.slack)},{_fmt(r.tolerance)},{r.passed}")
    else:
        width = max(len(r.check_name) for r in reports)
        for r in reports:
            status = "pass" if r.passed else "FAIL"
            print(f"{r.check_name:<{width}}  {status}  lhs={_fmt(r.lhs)} "
                  f"rhs={_fmt(r.rhs)} tol={_fmt(r.tolerance)} [{r.method}]")
    return 0


def _cmd_counterexample(args) -> int:
    pair = oracle_mod.counterexample(args.nmax)
    rows = zip(range(1, pair.n_max + 1), pair.log_masses,
               pair.log_cell_means, pair.ratio_curve)
    if args.format == "json":
        print(json.dumps({
            "n_max": pair.n_max,
            "log_masses": [float(v) for v in pair.log_masses],
            "log_cell_means": [float(v) for v in pair.log_cell_means],
            "ratio_curve": [float(v) for v in pair.ratio_curve],
            "tail_mean_partial_sum": pair.tail_mean_partial_sum(),
        }))
    else:
        print("n,log_mass,log_cell_mean,ratio")
        for n, lm, lcm, ratio in rows:
            print(f"{n},{_fmt(lm)},{_fmt(lcm)},{_fmt(ratio)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT

    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("CONVEX_TAIL_SEED", "0"))

    dispatch = {
        "bound": lambda: _cmd_bound(args),
        "envelope": lambda: _cmd_envelope(args),
        "extremal": lambda: _cmd_extremal(args),
        "hinge": lambda: _cmd_hinge(args),
        "transfer": lambda: _cmd_transfer(args),
        "ratio": lambda: _cmd_ratio(args),
        "kemperman": lambda: _cmd_kemperman(args),
        "regularity": lambda: _cmd_regularity(args),
        "verify": lambda: _cmd_verify(args, seed),
        "counterexample": lambda: _cmd_counterexample(args),
    }
    try:
        return dispatch[args.command]()
    except (SpecParseError, DomainError) as exc:
        print(f"convex-tail: usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (HypothesisError, PreconditionError, NumericalError) as exc:
        print(f"convex-tail: {exc}", file=sys.stderr)
        if isinstance(exc, HypothesisError) and exc.lhs is not None:
            print(f"convex-tail: lhs={exc.lhs!r} rhs={exc.rhs!r} at {exc.where!r}",
                  file=sys.stderr)
        return HYPOTHESIS_EXIT


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
