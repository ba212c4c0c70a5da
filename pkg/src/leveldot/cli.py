"""Command-line interface.

Subcommands: ``simulate``, ``theory``, ``compare``, ``sweep``, ``presets``.
Exit codes: 0 success, 1 comparison failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import __version__, harness
from .errors import ComparisonError, ConfigError, LevelDotError

EXIT_OK = 0
EXIT_COMPARISON = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_run_arguments(parser: argparse.ArgumentParser):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="path to an experiment config JSON file")
    source.add_argument("--preset", help="name of a built-in preset (see: presets list)")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--workers", type=int, help="worker threads for realizations")
    parser.add_argument("--out", help="output directory (default: $LEVELDOT_OUTPUT_ROOT/<name>)")


def _load_run_config(args) -> harness.ExperimentConfig:
    if args.preset:
        presets = harness.build_presets()
        if args.preset not in presets:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(presets))}")
        config = presets[args.preset]
    else:
        config = harness.load_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leveldot",
        description="Survival-probability laboratory for a level coupled to a random-matrix bath")
    parser.add_argument("--version", action="version", version=f"leveldot {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    # also accepted after the subcommand; SUPPRESS keeps the root value intact
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the Monte Carlo curves of a config",
                       parents=[common])
    _add_run_arguments(p)

    p = sub.add_parser("theory", help="evaluate the analytic curves of a config",
                       parents=[common])
    _add_run_arguments(p)

    p = sub.add_parser("sweep", help="run a coupling sweep and tabulate the plateau",
                       parents=[common])
    _add_run_arguments(p)

    p = sub.add_parser("compare", help="z-score comparison of MC vs theory CSVs",
                       parents=[common])
    p.add_argument("--mc", required=True, help="survival CSV")
    p.add_argument("--theory", required=True, help="theory CSV")
    p.add_argument("--out", help="write the report JSON here")
    p.add_argument("--z-threshold", type=float, default=3.0)
    p.add_argument("--max-fail-fraction", type=float, default=0.02)
    p.add_argument("--ratio-target", type=float, help="expected plateau/offset ratio")
    p.add_argument("--ratio-tol", type=float, default=0.2)
    p.add_argument("--exclude-tau", action="append", default=[], metavar="LO:HI",
                   help="tau window to exclude from z statistics (repeatable)")
    p.add_argument("--interpolate", action="store_true",
                   help="resample the theory curve onto the MC grid")

    p = sub.add_parser("presets", help="inspect built-in presets", parents=[common])
    p.add_argument("action", choices=["list"])
    return parser


def _cmd_run(args, runner) -> int:
    config = _load_run_config(args)
    written = runner(config, out_dir=args.out,
                     **({} if runner is harness.run_theory else {"workers": args.workers}))
    if isinstance(written, dict):
        for name in sorted(written):
            print(f"{name}: {written[name]}")
    else:
        for row in written:
            print(f"gamma={row['gamma']:.6g}  p_late={row['p_late']:.6g} "
                  f"+- {row['p_late_stderr']:.2g}  residence={row['p_residence']:.6g}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    tolerances = {
        "z_threshold": args.z_threshold,
        "max_z_fail_fraction": args.max_fail_fraction,
    }
    if args.ratio_target is not None:
        tolerances["ratio_target"] = args.ratio_target
        tolerances["ratio_tol"] = args.ratio_tol
    windows = []
    for item in args.exclude_tau:
        try:
            lo, hi = item.split(":")
            windows.append((float(lo), float(hi)))
        except ValueError as exc:
            raise ConfigError(f"bad --exclude-tau {item!r}; expected LO:HI") from exc
    if windows:
        tolerances["exclude_tau"] = windows
    report = harness.run_compare(args.mc, args.theory, tolerances=tolerances,
                                 out_path=args.out, interpolate=args.interpolate)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status}: max|z|={report.max_abs_z:.2f}, "
          f"{report.frac_z_exceeding:.1%} of points above z={report.z_threshold:g}, "
          f"ratio={report.observables['ratio']:.3f} +- {report.observables['ratio_err']:.3f}")
    return EXIT_OK if report.passed else EXIT_COMPARISON


def _cmd_presets(args) -> int:
    presets = harness.build_presets()
    width = max(len(name) for name in presets)
    for name in sorted(presets):
        cfg = presets[name]
        if cfg.gammas:
            kind = f"sweep over {len(cfg.gammas)} couplings"
        elif cfg.classes:
            kind = f"classes {'/'.join(cfg.classes)} at gamma={cfg.spec.gamma:g}"
        else:
            kind = f"class {cfg.spec.cls} at gamma={cfg.spec.gamma:g}"
        print(f"{name:<{width}}  dim={cfg.spec.dim:<5d} samples={cfg.n_samples:<6d} "
              f"bath={cfg.spec.bath:<8s} {kind}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "simulate":
            return _cmd_run(args, harness.run_simulate)
        if args.command == "theory":
            return _cmd_run(args, harness.run_theory)
        if args.command == "sweep":
            return _cmd_run(args, harness.run_sweep)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "presets":
            return _cmd_presets(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ComparisonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LevelDotError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
