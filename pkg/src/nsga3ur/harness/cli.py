"""Command-line entry point: run, summarize, classify, dump-front, validate."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..core import ConfigurationError
from .experiment import load_records, load_spec, run_experiment
from .report import classification_report, dump_front, summarize
from .validate import run_checks


def _records_or_exit(out_dir):
    records = load_records(out_dir)
    if not records:
        raise SystemExit(f"no run records found in {out_dir}")
    return records


def cmd_run(args) -> int:
    spec = load_spec(args.spec, seed=args.seed, budget=args.budget, reps=args.reps, out=args.out,
                     workers=args.workers)
    total = len(spec.cells())

    def progress(rec):
        igd = "n/a" if rec.igd is None else f"{rec.igd:.4e}"
        print(f"{rec.problem} m={rec.m} {rec.algorithm} seed={rec.seed} igd={igd} "
              f"({rec.duration:.1f}s)", flush=True)

    records = run_experiment(spec, progress=None if args.quiet else progress)
    print(f"{len(records)}/{total} records in {spec.out}")
    return 0


def cmd_summarize(args) -> int:
    records = _records_or_exit(args.out)
    out = Path(args.out)
    csv_parts = []
    for metric in args.metric:
        summary = summarize(records, metric, alpha=args.alpha)
        text = summary.to_text()
        print(text)
        (out / f"summary_{metric}.txt").write_text(text)
        csv_parts.append(summary.to_csv() if not csv_parts else summary.to_csv().split("\n", 1)[1])
    (out / "summary.csv").write_text("".join(csv_parts))
    return 0


def cmd_classify(args) -> int:
    report = classification_report(_records_or_exit(args.out))
    print(report.to_text(), end="")
    (Path(args.out) / "classification.csv").write_text(report.to_csv())
    return 0


def cmd_dump_front(args) -> int:
    dest = args.dest or Path(args.out) / "fronts"
    for path in dump_front(_records_or_exit(args.out), dest):
        print(path)
    return 0


def cmd_validate(args) -> int:
    return 0 if run_checks() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsga3ur", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress details")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute every run of an experiment spec (TOML)")
    p.add_argument("spec", help="experiment spec file")
    p.add_argument("--seed", type=int, help="base seed; replication r uses seed + r")
    p.add_argument("--budget", type=int, help="function evaluations per run")
    p.add_argument("--reps", type=int, help="replications per cell")
    p.add_argument("--out", help="output directory for run records")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("-q", "--quiet", action="store_true", help="do not print one line per run")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("summarize", help="mean (std) tables with significance marks")
    p.add_argument("out", help="directory holding run records")
    p.add_argument("--metric", nargs="+", choices=("igd", "hv"), default=["igd", "hv"])
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("classify", help="regularity classification accuracy of NSGA-III-UR runs")
    p.add_argument("out", help="directory holding run records")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("dump-front", help="write median-IGD fronts as plain-text matrices")
    p.add_argument("out", help="directory holding run records")
    p.add_argument("--dest", type=Path, help="target directory (default OUT/fronts)")
    p.set_defaults(func=cmd_dump_front)

    p = sub.add_parser("validate", help="quick self-check of core properties")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
