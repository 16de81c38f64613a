"""``plan`` command line: run, bench, validate, export."""

from __future__ import annotations

import argparse
import json
import logging
import os
import statistics
import sys
from pathlib import Path

from . import harness
from .benchfn import available, get_benchfn
from .scenario import ScenarioError
from .tlbo import VARIANTS, OptimizerConfig


def _cmd_run(args) -> int:
    try:
        config = harness.RunConfig.from_file(args.config)
    except (harness.ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        summary = harness.run_batch(config)
    except OSError as exc:
        print(f"error: cannot write to {config.output_dir}: {exc}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for variant, st in summary.stats().items() if summary.runs else ():
        print(f"{variant:14s} n={st['n']:3d} min={st['min']:.4f} median={st['median']:.4f} "
              f"max={st['max']:.4f} collision_free={st['collision_free']}")
    for variant, seed, err in summary.failures:
        print(f"FAILED {variant} seed {seed}: {err}", file=sys.stderr)
    print(f"wrote {config.output_dir}")
    return 0 if summary.ok else 1


def _cmd_bench(args) -> int:
    try:
        fn = get_benchfn(args.fn, args.dim)
        seeds = harness.parse_seeds(args.seeds)
        base = OptimizerConfig(population_size=args.population, max_fes=args.max_fes)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out or os.environ.get(harness.OUT_DIR_ENV)
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    report = {}
    for variant in args.variant.split(","):
        finals = []
        for seed in seeds:
            trace = harness.run_benchfn(fn, variant, base.replace(seed=seed))
            finals.append(trace[-1].best_cost)
            if out_dir:
                harness.write_trace(trace, Path(out_dir) / harness.trace_name(
                    f"{fn.name}{fn.dim}-{variant}", seed))
        report[variant] = {"finals": finals, "median": statistics.median(finals)}
        print(f"{fn.name} D={fn.dim} {variant:14s} median={statistics.median(finals):.6g} "
              f"min={min(finals):.6g} max={max(finals):.6g}")
    if out_dir:
        (Path(out_dir) / f"bench_{fn.name}{fn.dim}.json").write_text(json.dumps(report, indent=1))
    return 0


def _cmd_validate(args) -> int:
    problems = harness.validate_dir(args.dir)
    for p in problems:
        print(p)
    if not problems:
        print(f"{args.dir}: ok")
    return 1 if problems else 0


def _cmd_export(args) -> int:
    try:
        rows = harness.export_dir(args.dir, args.aligned_csv)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows) - 1} rows x {len(rows[0]) - 1} series to {args.aligned_csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plan", description="TLBO / MS-TLBO 3D path planner")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a batch of seeded optimizations from a config file")
    r.add_argument("--config", required=True)
    r.set_defaults(func=_cmd_run)

    b = sub.add_parser("bench", help="run an optimizer on an analytic benchmark function")
    b.add_argument("--fn", required=True, choices=available())
    b.add_argument("--dim", type=int, default=10)
    b.add_argument("--variant", default="mstlbo",
                   help=f"comma separated subset of {','.join(VARIANTS)}")
    b.add_argument("--seeds", default="0..29")
    b.add_argument("--population", type=int, default=30)
    b.add_argument("--max-fes", type=int, default=20_000)
    b.add_argument("--out", default=None, help="directory for traces (optional)")
    b.set_defaults(func=_cmd_bench)

    v = sub.add_parser("validate", help="re-read and cross-check a run directory")
    v.add_argument("--dir", required=True)
    v.set_defaults(func=_cmd_validate)

    e = sub.add_parser("export", help="write FES-aligned best-cost curves as CSV")
    e.add_argument("--dir", required=True)
    e.add_argument("--aligned-csv", required=True)
    e.set_defaults(func=_cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
