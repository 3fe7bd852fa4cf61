"""Command-line front end: ``selcand run|compare|diagnose|list-functions|list-algorithms``."""

from __future__ import annotations

import argparse
import os
import shutil
import sys
import tempfile
from pathlib import Path

from .baselines import BASELINES
from .bench import report
from .bench.functions import BASES
from .bench.runner import ConfigInvalid, run_experiment
from .config import load_config

PARALLEL_ENV = "SELCAND_PARALLEL"
EXIT_IO = 1
EXIT_CONFIG = 2


def _default_parallel() -> int:
    try:
        return max(1, int(os.environ.get(PARALLEL_ENV, "1")))
    except ValueError:
        return 1


def _publish(tmp: Path, out: Path):
    """Move finished files into ``out`` so a failed run leaves nothing behind."""
    out.mkdir(parents=True, exist_ok=True)
    for f in sorted(tmp.iterdir()):
        shutil.move(str(f), out / f.name)


def _execute(args, files) -> int:
    try:
        spec = load_config(args.config, args.seed)
    except (ConfigInvalid, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    if files == "diagnose":
        spec = spec.__class__(**{**spec.__dict__, "diagnostics": True})
        if not any(a.scss for a in spec.algorithms):
            print("error: diagnostics need at least one scss algorithm", file=sys.stderr)
            return EXIT_CONFIG
    result = run_experiment(spec, args.parallel)
    out = Path(args.out)
    try:
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            if files == "diagnose":
                report.write_td(tmp / "td_by_rank.csv", result.records)
                report.write_pa(tmp / "prediction_accuracy.csv", result.records)
            else:
                report.write_runs(tmp / "runs.csv", result.records)
                report.write_summary(tmp / "summary.csv", result.comparison)
                report.write_convergence(tmp / "convergence.csv", result.records)
                if spec.diagnostics:
                    report.write_diagnostics(tmp / "diagnostics.csv", result.records)
                if result.comparison.friedman:
                    report.write_ranking(tmp / "ranking.csv", result.comparison)
            _publish(tmp, out)
    except OSError as exc:
        print(f"error: cannot write results: {exc}", file=sys.stderr)
        return EXIT_IO
    if files != "diagnose":
        for line in result.comparison.summary_lines() + result.comparison.friedman_lines():
            print(line)
    else:
        print(f"wrote {out / 'td_by_rank.csv'} and {out / 'prediction_accuracy.csv'}")
    return 0


def cmd_run(args) -> int:
    return _execute(args, "run")


def cmd_diagnose(args) -> int:
    return _execute(args, "diagnose")


def cmd_compare(args) -> int:
    try:
        comparison = report.compare_files(args.runs, args.alpha)
    except report.IncompatibleInputs as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read runs: {exc}", file=sys.stderr)
        return EXIT_IO
    for line in report.format_table(comparison):
        print(line)
    for line in comparison.summary_lines() + comparison.friedman_lines():
        print(line)
    return 0


def cmd_list_functions(args) -> int:
    for name, (_, bound) in BASES.items():
        print(f"{name:<18} [-{bound:g}, {bound:g}]^D")
    return 0


def cmd_list_algorithms(args) -> int:
    import dataclasses

    for name, (_, params) in BASELINES.items():
        defaults = ", ".join(f"{f.name}={f.default}" for f in dataclasses.fields(params))
        print(f"{name:<7} {defaults}")
    print("scss schemes: scheme1 (gd), scheme2, oppo, meval")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selcand", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, default_out in (("run", cmd_run, "results"), ("diagnose", cmd_diagnose, "diagnostics")):
        p = sub.add_parser(name, help=f"{name} an experiment described by a TOML config")
        p.add_argument("config")
        p.add_argument("--out", default=default_out, help="output directory")
        p.add_argument("--parallel", type=int, default=_default_parallel(),
                       help=f"worker processes (default ${PARALLEL_ENV} or 1)")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.set_defaults(func=func)

    p = sub.add_parser("compare", help="compare algorithms from runs.csv files")
    p.add_argument("runs", nargs="+")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_compare)

    sub.add_parser("list-functions").set_defaults(func=cmd_list_functions)
    sub.add_parser("list-algorithms").set_defaults(func=cmd_list_algorithms)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "parallel", 1) < 1:
        print("error: --parallel must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
