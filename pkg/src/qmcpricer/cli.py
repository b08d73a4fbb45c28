"""Command-line entry points.

Subcommands:
  price        one run at a fixed N, raw per-batch CSV
  convergence  N-grid run, summary CSV
  table1       residual-fraction grid for the Asian payoff
  timing       per-method wall-time report
  coeffs       dump the regression coefficient vector

Exit codes: 0 success, 2 bad flags, 3 unsupported (payoff, method)
combination, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from .brownian_max import QuadratureError
from .harness import (
    METHODS,
    PAYOFFS,
    ExperimentConfig,
    UnsupportedCombinationError,
    regression_vector_for,
    run_experiment,
    timing_report,
    write_raw_csv,
    write_summary_csv,
)
from .regression import asian_variance_report, variance_report_continuum

# full-scale path dimensions per payoff, behind --full-scale
FULL_SCALE_N = {
    "asian": 250,
    "basket": 250,
    "digital-barrier": 2000,
    "asian-barrier": 1000,
}


def _add_market_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--payoff", choices=PAYOFFS, default="asian")
    p.add_argument(
        "--method",
        choices=METHODS,
        action="append",
        help="repeatable; default depends on the subcommand",
    )
    p.add_argument("--n", type=int, default=64, help="time steps per asset")
    p.add_argument("--batches", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s0", type=float, default=100.0)
    p.add_argument("--strike", type=float, default=100.0)
    p.add_argument("--rate", type=float, default=0.04)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--maturity", type=float, default=1.0)
    p.add_argument("--barrier", type=float, default=None)
    p.add_argument("--assets", type=int, default=10)
    p.add_argument("--rho", type=float, default=0.05)
    p.add_argument("--sigma-min", type=float, default=0.1)
    p.add_argument("--sigma-max", type=float, default=0.3)
    p.add_argument("--lt-columns", type=int, default=25)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--full-scale", action="store_true", help="use the full per-payoff n")


def _config(args, paths: list[int], methods: list[str]) -> ExperimentConfig:
    n = FULL_SCALE_N[args.payoff] if args.full_scale else args.n
    return ExperimentConfig(
        payoff=args.payoff,
        methods=methods,
        n=n,
        paths=paths,
        batches=args.batches,
        seed=args.seed,
        s0=args.s0,
        strike=args.strike,
        rate=args.rate,
        sigma=args.sigma,
        maturity=args.maturity,
        barrier=args.barrier,
        assets=args.assets,
        rho=args.rho,
        sigma_min=args.sigma_min,
        sigma_max=args.sigma_max,
        lt_columns=args.lt_columns,
        workers=args.workers,
    )


def _cmd_price(args) -> int:
    methods = args.method or ["forward"]
    cfg = _config(args, [args.paths], methods)
    raw, stats = run_experiment(cfg)
    if any(not math.isfinite(r.estimate) for r in raw):
        print("numerical failure: non-finite estimate", file=sys.stderr)
        return 4
    if args.out:
        write_raw_csv(raw, args.out)
    for s in stats:
        print(
            f"{s.payoff} {s.method} n={s.n} N={s.N} "
            f"mean={s.mean:.6f} stddev={s.stddev:.6e} batches={s.batches}"
        )
    return 0


def _cmd_convergence(args) -> int:
    if args.log2_min > args.log2_max:
        raise ValueError("--log2-min must not exceed --log2-max")
    methods = args.method or ["forward", "regression"]
    paths = [2**k for k in range(args.log2_min, args.log2_max + 1)]
    cfg = _config(args, paths, methods)
    _, stats = run_experiment(cfg)
    if any(not math.isfinite(s.mean) for s in stats):
        print("numerical failure: non-finite estimate", file=sys.stderr)
        return 4
    if args.out:
        write_summary_csv(stats, args.out)
    for s in stats:
        print(
            f"{s.payoff} {s.method} n={s.n} N={s.N} "
            f"mean={s.mean:.6f} stddev={s.stddev:.6e} batches={s.batches}"
        )
    return 0


def _cmd_table1(args) -> int:
    n = args.n
    print("# residual variance fraction (V - |a|^2) / V for the Asian payoff, T=1")
    print(f"# r sigma2 discrete_n{n} continuum")
    for r in (0.1, 0.2, 0.3):
        for s2 in (0.01, 0.02, 0.03, 0.04):
            sigma = math.sqrt(s2)
            disc = asian_variance_report(r, sigma, 1.0, n).residual_fraction
            cont = variance_report_continuum(r, sigma, 1.0).residual_fraction
            print(f"{r} {s2} {disc:.6f} {cont:.6f}")
    return 0


def _cmd_timing(args) -> int:
    methods = args.method or ["forward", "regression", "pca", "lt"]
    cfg = _config(args, [args.paths], methods)
    report = timing_report(cfg, repeats=args.repeats)
    print("method setup_ms run_ms total_ms estimate")
    for row in report:
        print(
            f"{row['method']} {row['setup_ms']:.3f} {row['run_ms']:.3f} "
            f"{row['total_ms']:.3f} {row['estimate']:.6f}"
        )
    return 0


def _cmd_coeffs(args) -> int:
    cfg = _config(args, [2], ["regression"])
    rv = regression_vector_for(cfg)
    print(f"# regression coefficients, payoff={cfg.payoff} n={cfg.n} norm={float(rv.norm)!r}")
    for i, v in enumerate(rv.a, start=1):
        print(f"{i} {float(v)!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmcpricer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="single-N run, raw CSV")
    _add_market_flags(p)
    p.add_argument("--paths", type=int, default=2**12, help="sample paths N")
    p.add_argument("--out", default=None, help="raw CSV path")
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("convergence", help="N-grid run, summary CSV")
    _add_market_flags(p)
    p.add_argument("--log2-min", type=int, default=5)
    p.add_argument("--log2-max", type=int, default=12)
    p.add_argument("--out", default=None, help="summary CSV path")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("table1", help="residual-fraction grid")
    p.add_argument("--n", type=int, default=2**12, help="time steps for the exact sums")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("timing", help="per-method wall times")
    _add_market_flags(p)
    p.add_argument("--paths", type=int, default=2**14)
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=_cmd_timing)

    p = sub.add_parser("coeffs", help="dump the regression vector")
    _add_market_flags(p)
    p.set_defaults(func=_cmd_coeffs)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedCombinationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        parser.error(str(exc))  # exits 2


if __name__ == "__main__":
    sys.exit(main())
