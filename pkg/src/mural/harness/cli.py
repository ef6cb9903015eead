"""Command line entry point: ``mural {run,compare,verify,gen}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

from ..domain import Instance, InstanceError
from ..scenarios import build_scenario
from .compare import COMPARE_COLUMNS, CompareError, compare_reports, load_reports
from .config import ConfigError, load_config
from .runner import InvariantViolation, run_experiment
from .verify import verify_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_STRICT = 0, 1, 2, 3

log = logging.getLogger("mural")


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("MURAL_JOBS", "1")))
    except ValueError:
        return 1


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        out = args.out or cfg.out_dir or "runs"
        outcome = run_experiment(cfg, out, jobs=args.jobs, seed_offset=args.seed_offset,
                                 figures=not args.no_figures)
    except (ConfigError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_FAIL
    n = len(outcome.reports)
    print(f"{n} runs -> {Path(out) / 'runs.csv'}")
    for (algo, eps), k in sorted(outcome.misses.items()):
        print(f"warning: {algo} eps={eps:g}: {k} run(s) above the guarantee bound", file=sys.stderr)
    if args.strict and outcome.over_budget:
        print(f"strict: misses exceed the delta budget for {outcome.over_budget}", file=sys.stderr)
        return EXIT_STRICT
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        rows = compare_reports(load_reports(args.reports), baseline=args.baseline)
    except (CompareError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COMPARE_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(buf.getvalue())
        if not args.no_figures:
            from ..plotting import plot_comparison

            plot_comparison(rows, out.with_suffix(".png"))
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_verify(args) -> int:
    status = EXIT_OK
    cached = None
    if args.instance:
        cached = json.loads(Path(args.instance).read_text())
    for path in args.reports:
        report = json.loads(Path(path).read_text())
        inst = cached
        if inst is None:
            scen = report["config"].get("scenario")
            if scen is None:
                print(f"{path}: no scenario recorded; pass --instance", file=sys.stderr)
                status = EXIT_FAIL
                continue
            inst = build_scenario(scen["name"], scen.get("params", {})).to_dict()
        problems = verify_report(report, inst)
        if problems:
            status = EXIT_FAIL
            for p in problems:
                print(f"{path}: {p}")
        else:
            print(f"{path}: ok (excess {report['excess_true_loss']:.6g})")
    return status


def cmd_gen(args) -> int:
    try:
        if args.config:
            cfg = load_config(args.config)
            inst = build_scenario(cfg.scenario, cfg.scenario_params)
        else:
            params = json.loads(args.params) if args.params else {}
            inst = build_scenario(args.scenario, params)
    except (ConfigError, InstanceError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(inst.to_dict()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mural", description="Multi-group active learning experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute every (algorithm, eps, seed) cell of a config")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--strict", action="store_true", help="nonzero exit when guarantee misses exceed delta")
    p.add_argument("--jobs", type=int, default=_default_jobs(), metavar="N")
    p.add_argument("--seed-offset", type=int, default=0, metavar="K")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="pair active reports with the passive baseline")
    p.add_argument("reports", nargs="+", help="report directories or globs")
    p.add_argument("--out", metavar="CSV")
    p.add_argument("--baseline", default="passive")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="recompute report excess from the instance")
    p.add_argument("reports", nargs="+")
    p.add_argument("--instance", metavar="PATH", help="instance JSON (default: rebuild from the report)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="emit an instance as JSON")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH")
    src.add_argument("--scenario")
    p.add_argument("--params", help="scenario parameters as a JSON object")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
