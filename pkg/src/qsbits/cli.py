"""Command-line front end: ``qsbits {exact,table,asympt,simulate,validate}``.

Exit codes: 0 on success, 1 when ``validate`` finds a failing check, 2 on
invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import asymptotics as asy
from .exact import DEFAULT_DIGITS, format_decimal, format_rational
from .mu import C3Divisor, MuValue, mu1_exact, mu_avg_exact, mu_general_exact, mu_table
from .simulator import monte_carlo
from .validate import LEVELS, run_validation

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_MAX_N = 20
DEFAULT_TRIALS = 100_000


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {v}")
    return v


def _seed(text: str) -> int:
    v = _nonneg_int(text)
    if v >= 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsbits", description="Expected bit comparisons of Quickselect: exact, asymptotic, simulated."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("exact", help="exact rational mu(m, n)")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--smallest", action="store_true", help="rank 1")
    which.add_argument("--average", action="store_true", help="rank uniform on 1..n")
    which.add_argument("-m", "--rank", type=_positive_int, dest="m", help="target rank")
    p.add_argument("-n", type=_positive_int, required=True, help="number of keys")
    p.add_argument("--digits", type=_nonneg_int, default=DEFAULT_DIGITS)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--c3-divisor", choices=[d.value for d in C3Divisor], default="integration",
                   help=argparse.SUPPRESS)

    p = sub.add_parser("table", help="mu(m, n) for all 1 <= m <= n <= max-n")
    p.add_argument("--max-n", type=_positive_int, default=DEFAULT_MAX_N)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--digits", type=_nonneg_int, default=DEFAULT_DIGITS)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = sub.add_parser("asympt", help="slope constants and asymptotic expansions")
    p.add_argument("--constant", choices=("c", "avg"), required=True)
    p.add_argument("-n", type=_positive_int, help="also evaluate the expansion at n (n >= 3)")
    p.add_argument("--k-max", type=_positive_int, help="fixed truncation of the fluctuation sums")
    p.add_argument("--tol", type=_positive_float, default=asy.DEFAULT_TOL,
                   help="tail tolerance for adaptive truncation")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("simulate", help="Monte Carlo estimate of mu(m, n)")
    p.add_argument("-m", type=_positive_int, required=True)
    p.add_argument("-n", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="json")

    p = sub.add_parser("validate", help="cross-check all engines")
    p.add_argument("--level", choices=LEVELS, default="quick")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--json", action="store_const", const="json", dest="format", help="same as --format json")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--timings", action="store_true", help="include per-check wall time")
    p.add_argument("--c3-divisor", choices=[d.value for d in C3Divisor], default="integration",
                   help=argparse.SUPPRESS)
    for name, subparser in sub.choices.items():
        subparser.set_defaults(command_parser=subparser)
    return parser


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _format_mu(v: MuValue, digits: int) -> str:
    if v.value.denominator == 1:
        return format_rational(v.value)
    return f"{format_rational(v.value)} ≈ {format_decimal(v.value, digits)}"


def cmd_exact(args, parser) -> int:
    n = args.n
    if args.smallest:
        v = mu1_exact(n)
    elif args.average:
        v = mu_avg_exact(n)
    else:
        if args.m > n:
            parser.error(f"rank -m {args.m} exceeds -n {n}")
        v = mu_general_exact(args.m, n, C3Divisor(args.c3_divisor))
    if args.format == "json":
        _emit(json.dumps(v.to_dict(args.digits)))
    else:
        _emit(_format_mu(v, args.digits))
    return EXIT_OK


def cmd_table(args, parser) -> int:
    table = mu_table(args.max_n, workers=args.workers)
    text = table.to_csv(args.digits) if args.format == "csv" else table.to_json(args.digits)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sig10(x: float) -> str:
    return f"{x:.10g}"


def cmd_asympt(args, parser) -> int:
    if args.n is not None and args.n < 3:
        parser.error("-n must be at least 3 for the expansion")
    series = asy.slope_sum_series if args.constant == "c" else asy.a_tilde_series
    info = series(args.k_max, args.tol).evaluate()
    value = asy.slope_c(args.k_max, args.tol) if args.constant == "c" else asy.slope_avg(args.k_max, args.tol)
    out: dict = {"constant": args.constant, "value": _sig10(value), "k_max": info.k_used,
                 "tail_estimate": info.tail}
    if args.n is not None:
        n = args.n
        if args.constant == "c":
            est = asy.mu1_asymptotic(n, args.tol)
            stable = asy.mu1_stable(n, args.tol)
        else:
            est = asy.mu_avg_asymptotic(n, args.tol)
            stable = asy.mu_avg_stable(n, args.tol)
        out.update({"n": n, "expansion": est.value, "stable": stable,
                    "abs_difference": abs(stable - est.value), "remainder": est.remainder_bound_note})
    if args.format == "json":
        _emit(json.dumps(out))
        return EXIT_OK
    lines = [f"{args.constant} = {out['value']}  (k_max={info.k_used}, tail~{info.tail:.1e})"]
    if args.n is not None:
        lines.append(f"n = {out['n']}: expansion {out['expansion']:.10g}, stable {out['stable']:.10g}, "
                     f"|difference| {out['abs_difference']:.6g}")
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_simulate(args, parser) -> int:
    if args.m > args.n:
        parser.error(f"rank -m {args.m} exceeds -n {args.n}")
    stats = monte_carlo(args.m, args.n, args.trials, args.seed, args.workers)
    d = stats.to_dict()
    if args.format == "json":
        _emit(json.dumps(d))
    else:
        _emit(
            f"m={d['m']} n={d['n']} trials={d['trials']} seed={d['seed']}\n"
            f"bit comparisons: {d['bit_mean']:.6f} +- {d['bit_stderr']:.6f}\n"
            f"key comparisons: {d['key_mean']:.6f} +- {d['key_stderr']:.6f}"
        )
    return EXIT_OK


def cmd_validate(args, parser) -> int:
    report = run_validation(args.level, C3Divisor(args.c3_divisor), args.seed, args.workers)
    if args.format == "json":
        _emit(json.dumps(report.to_dict(args.timings)))
    else:
        sys.stdout.write(report.to_text(args.timings))
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "exact": cmd_exact,
    "table": cmd_table,
    "asympt": cmd_asympt,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, args.command_parser)
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
