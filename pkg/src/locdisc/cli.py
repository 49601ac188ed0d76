"""Command-line interface. Every failure prints a JSON error object on stderr
and exits nonzero."""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import runner
from .adaptive import PriorGrid, dp_solve, simulate, write_tables
from .errors import DomainError, ResourceError
from .helstrom import collective_error
from .local import repeated_error_opt, repeated_exponent_opt
from .qubit import make_pair, quantum_chernoff_exponent
from .sdp import ppt_error

_ANGLE = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_angle(text: str) -> float:
    """Accept a float in radians or forms like 'pi/2', '3pi/4', '0.5*pi'."""
    m = _ANGLE.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    return float(text)


def _n_values(args) -> list[int]:
    if args.n_max is not None:
        return list(range(args.n_min or 1, args.n_max + 1))
    if args.n is not None:
        return [args.n]
    raise DomainError("give --n or --n-max")


def _check_size(n: int, args) -> None:
    if n > runner.MAX_N and not args.allow_large:
        raise ResourceError(f"N={n} exceeds {runner.MAX_N}; pass --allow-large to override")


def _emit(rows: list[dict], args, spec: dict, wall: float) -> None:
    text = runner.to_json(rows, spec, wall) + "\n" if args.format == "json" else runner.to_csv(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pair(args):
    return make_pair(args.r0, args.r1, args.theta)


def cmd_collective(args):
    pair = _pair(args)
    return [{"N": n, "collective": collective_error(pair, n)} for n in _n_values(args)]


def cmd_ppt(args):
    pair = _pair(args)
    rows = []
    for n in _n_values(args):
        _check_size(n, args)
        res = ppt_error(pair, n, args.tol)
        rows.append({"N": n, "ppt": res.error, "status": res.status,
                     "gap": res.solution.gap if res.solution else 0.0})
    return rows


def cmd_repeated(args):
    pair = _pair(args)
    rows = []
    for n in _n_values(args):
        pe, angle = repeated_error_opt(pair, n)
        rows.append({"N": n, "repeated": pe, "angle": angle})
    return rows


def cmd_adaptive(args):
    pair = _pair(args)
    rows = []
    for n in _n_values(args):
        _check_size(n, args)
        res = dp_solve(pair, n, PriorGrid(args.grid))
        row = {"N": n, "adaptive": res.error, "first_angle": res.first_angle,
               "status": res.status}
        if args.trials:
            s0 = simulate(res.policy, pair, 0, args.trials, args.seed)
            s1 = simulate(res.policy, pair, 1, args.trials, args.seed + 1)
            row["mc_success"] = 0.5 * (s0.success + s1.success)
            row["mc_stderr"] = 0.5 * math.hypot(s0.stderr, s1.stderr)
        if args.tables:
            write_tables(args.tables, res)
        rows.append(row)
    return rows


def _spec(args) -> runner.SweepSpec:
    return runner.SweepSpec(args.r0, args.r1, args.theta, tuple(_n_values(args)),
                            tuple(args.strategies), args.tol, args.grid, args.seed,
                            args.allow_large)


def cmd_sweep_n(args):
    return runner.sweep_n(_spec(args))


def cmd_sweep_r(args):
    n = args.n if args.n is not None else 25
    _check_size(n, args)
    r_list = [float(x) for x in args.r_list.split(",")]
    return runner.sweep_r(args.theta, n, r_list, tuple(args.strategies), args.tol, args.grid)


def cmd_gap(args):
    pair = _pair(args)
    rows = []
    for n in _n_values(args):
        _check_size(n, args)
        g = runner.gap(pair, n, args.tol)
        rows.append({"N": n, "delta": g.delta, "collective": g.p_collective,
                     "ppt": g.p_ppt, "flagged": g.flagged, "status": g.status})
    return rows


def cmd_fit(args):
    pair = _pair(args)
    ns = list(range(args.n_min or 25, (args.n_max or 35) + 1))
    if args.strategy == "ppt":
        for n in ns:
            _check_size(n, args)
    pe = {
        "collective": lambda n: collective_error(pair, n),
        "repeated": lambda n: repeated_error_opt(pair, n)[0],
        "ppt": lambda n: ppt_error(pair, n, args.tol).error,
    }[args.strategy]
    fit = runner.fit_rate([(n, pe(n)) for n in ns])
    row = {"strategy": args.strategy, "C0": fit.c0, "C1": fit.c1, "C2": fit.c2,
           "residual": fit.residual, "n_min": fit.window[0], "n_max": fit.window[1]}
    if args.strategy == "collective":
        row["reference"] = quantum_chernoff_exponent(pair)
    elif args.strategy == "repeated":
        row["reference"] = repeated_exponent_opt(pair)[0]
    return [row]


def cmd_ratio(args):
    n = args.n if args.n is not None else 25
    _check_size(n, args)
    r_list = [float(x) for x in args.r_list.split(",")] if args.r_list else [args.r0]
    rows = []
    for r in r_list:
        res = runner.copies_ratio(make_pair(r, r, args.theta), n, args.tol)
        rows.append({"r": r, "N": n, "f": res.f, "c_collective": res.c_collective,
                     "c_ppt": res.c_ppt})
    return rows


def cmd_verify(args):
    from .verify import run_dense_suite
    rows = run_dense_suite(n_max=args.n_max or 6, samples=args.samples, seed=args.seed)
    if not all(row["pass"] for row in rows):
        _emit(rows, args, vars_clean(args), 0.0)
        raise DomainError("dense-oracle suite failed")
    return rows


COMMANDS = {
    "collective": cmd_collective, "ppt": cmd_ppt, "repeated": cmd_repeated,
    "adaptive": cmd_adaptive, "sweep-n": cmd_sweep_n, "sweep-r": cmd_sweep_r,
    "gap": cmd_gap, "fit": cmd_fit, "ratio": cmd_ratio, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r0", type=float, default=0.8)
    common.add_argument("--r1", type=float, default=0.8)
    common.add_argument("--theta", type=parse_angle, default=math.pi / 2,
                        help="angle between Bloch vectors, radians or e.g. pi/2")
    common.add_argument("--n", type=int)
    common.add_argument("--n-min", type=int, help="first N of a range (default 1, fit: 25)")
    common.add_argument("--n-max", type=int)
    common.add_argument("--grid", type=int, default=20000, help="DP prior grid points")
    common.add_argument("--tol", type=float, help="SDP duality-gap tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path, stdout if omitted")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--allow-large", action="store_true",
                        help=f"permit N > {runner.MAX_N} for SDP and DP")

    parser = argparse.ArgumentParser(prog="locdisc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("sweep-n", "sweep-r"):
            p.add_argument("--strategies", type=lambda s: s.split(","),
                           default=list(runner.STRATEGIES))
        if name in ("sweep-r", "ratio"):
            p.add_argument("--r-list", default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95"
                           if name == "sweep-r" else None)
        if name == "fit":
            p.add_argument("--strategy", choices=("collective", "repeated", "ppt"),
                           default="collective")
        if name == "adaptive":
            p.add_argument("--trials", type=int, default=0, help="Monte Carlo rollouts")
            p.add_argument("--tables", help="write value/policy tables to this TSV")
        if name == "verify":
            p.add_argument("--samples", type=int, default=50)
    return parser


def vars_clean(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with runner.Timer() as timer:
            rows = COMMANDS[args.command](args)
        _emit(rows, args, vars_clean(args), timer.elapsed)
    except (DomainError, ResourceError, ValueError, RuntimeError, OSError,
            np.linalg.LinAlgError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc),
                   "command": args.command}, sys.stderr)
        sys.stderr.write("\n")
        return 2 if isinstance(exc, (DomainError, ResourceError)) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
