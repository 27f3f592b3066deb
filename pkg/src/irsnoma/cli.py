"""``irsnoma`` command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 validation threshold breached.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .special import ConvergenceError
from .sweep import EXPERIMENTS, emit, load_config, run_sweep
from .system import ConfigError, ORDERING_MODES

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4
# share of validated points allowed to exceed |z| > 3
BREACH_FRACTION = 0.01

log = logging.getLogger("irsnoma")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="irsnoma",
        description="Outage, ergodic-rate and energy-efficiency sweeps for IRS-assisted NOMA.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="YAML scenario file")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per point (0 disables)")
    p.add_argument("--seed", type=int)
    p.add_argument("--ordering", choices=ORDERING_MODES)
    p.add_argument("--quad-u", type=int, help="Gauss-Laguerre order")
    p.add_argument("--quad-n", type=int, help="Gauss-Chebyshev order")
    p.add_argument("--tol", type=float, help="relative tolerance of the adaptive integrator")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        config, spec, energy = load_config(args.config, args.experiment)
        overrides = {k: v for k, v in dict(trials=args.trials, seed=args.seed,
                                           quad_u=args.quad_u, quad_n=args.quad_n,
                                           tol=args.tol).items() if v is not None}
        if args.out:
            overrides["output_path"] = args.out
        spec = dataclasses.replace(spec, **overrides)
        if args.ordering:
            config = config.with_(ordering_mode=args.ordering)
        result = run_sweep(config, spec, energy)
    except ConfigError as exc:
        print(f"irsnoma: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, OverflowError, ArithmeticError) as exc:
        print(f"irsnoma: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    try:
        text = emit(result.rows, args.format, spec.output_path)
    except OSError as exc:
        print(f"irsnoma: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"irsnoma: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if spec.output_path is None:
        sys.stdout.write(text)

    if result.failed:
        print("irsnoma: some points failed numerically; see the error column", file=sys.stderr)
        return EXIT_NUMERIC
    if spec.experiment == "validate":
        log.info("validated %d points, %d with |z| > 3", result.checked, result.breaches)
        if result.breach_fraction > BREACH_FRACTION:
            print(f"irsnoma: {result.breaches} of {result.checked} points exceed |z| > 3",
                  file=sys.stderr)
            return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
