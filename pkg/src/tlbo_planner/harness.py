"""Batch runner: seeded runs per variant, trace/path/summary files, re-validation."""

from __future__ import annotations

import csv
import json
import logging
import os
import re
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .benchfn import BenchFunction, get_benchfn
from .cost import CostWeights, PathCost
from .scenario import Scenario, decode, load_scenario, scenario_from_dict
from .tlbo import VARIANTS, ConvergenceTrace, OptimizerConfig, path_problem, solve

log = logging.getLogger(__name__)

OUT_DIR_ENV = "PLAN_OUT_DIR"
TRACE_HEADER = ("iteration", "fes", "best_cost", "mean_cost")
MSTLBO_KEYS = ("number_of_subject", "subject_layout", "mutation_scale", "learner_style",
               "scalar_r")


class ConfigError(ValueError):
    pass


def parse_seeds(spec) -> list[int]:
    """Accept a list of ints, ``"0..29"`` (inclusive) or ``"1,4,7"``."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(s) for s in spec]
    seeds: list[int] = []
    for part in str(spec).split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)\.\.(\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ConfigError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        elif part:
            seeds.append(int(part))
    return seeds


@dataclass
class RunConfig:
    scenario: Path
    variants: list[str] = field(default_factory=lambda: ["tlbo", "mstlbo"])
    seeds: list[int] = field(default_factory=lambda: list(range(30)))
    population_size: int = 30
    max_fes: int = 20_000
    weights: CostWeights = field(default_factory=CostWeights)
    mstlbo: dict = field(default_factory=dict)
    output_dir: Path = Path("out")
    workers: int = 1

    def __post_init__(self):
        self.scenario = Path(self.scenario)
        self.output_dir = Path(self.output_dir)
        self.variants = [v.lower() for v in self.variants]
        if not self.seeds:
            raise ConfigError("seeds must not be empty")
        if not self.variants:
            raise ConfigError("variants must not be empty")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(f"unknown variant {v!r}; expected one of {VARIANTS}")
        unknown = set(self.mstlbo) - set(MSTLBO_KEYS)
        if unknown:
            raise ConfigError(f"unknown mstlbo keys: {sorted(unknown)}")
        if not self.scenario.is_file():
            raise ConfigError(f"scenario file not found: {self.scenario}")
        # fail early on bad optimizer settings
        self.optimizer_config(self.variants[0], self.seeds[0])

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "RunConfig":
        data = dict(data)
        base_dir = Path(base_dir or ".")
        if "scenario" not in data:
            raise ConfigError("config needs a 'scenario' entry")
        scenario = Path(data.pop("scenario"))
        if not scenario.is_absolute():
            scenario = base_dir / scenario
        variants = data.pop("variants", data.pop("variant", ["tlbo", "mstlbo"]))
        if isinstance(variants, str):
            variants = [variants]
        out = Path(os.environ.get(OUT_DIR_ENV) or data.pop("output_dir", "out"))
        data.pop("output_dir", None)
        if not out.is_absolute() and OUT_DIR_ENV not in os.environ:
            out = base_dir / out
        known = {"seeds", "population_size", "max_fes", "weights", "mstlbo", "workers"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(scenario=scenario, variants=list(variants),
                       seeds=parse_seeds(data.get("seeds", "0..29")),
                       population_size=int(data.get("population_size", 30)),
                       max_fes=int(data.get("max_fes", 20_000)),
                       weights=CostWeights.from_dict(data.get("weights")),
                       mstlbo=dict(data.get("mstlbo", {})), output_dir=out,
                       workers=int(data.get("workers", 1)))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data, path.parent)

    def optimizer_config(self, variant: str, seed: int) -> OptimizerConfig:
        try:
            return OptimizerConfig(population_size=self.population_size, max_fes=self.max_fes,
                                   seed=seed, variant=variant, **self.mstlbo)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {"scenario": str(self.scenario), "variants": self.variants, "seeds": self.seeds,
                "population_size": self.population_size, "max_fes": self.max_fes,
                "weights": self.weights.to_dict(), "mstlbo": self.mstlbo,
                "output_dir": str(self.output_dir), "workers": self.workers}


@dataclass
class RunRecord:
    variant: str
    seed: int
    total: float
    j1: float
    j2: float
    j3: float
    violated: bool
    fes: int
    wall_time: float

    @property
    def collision_free(self) -> bool:
        return self.j2 == 0.0


@dataclass
class RunSummary:
    runs: list[RunRecord]
    failures: list[tuple[str, int, str]] = field(default_factory=list)

    def finals(self, variant: str) -> list[float]:
        return [r.total for r in self.runs if r.variant == variant]

    def stats(self) -> dict:
        out = {}
        for variant in dict.fromkeys(r.variant for r in self.runs):
            finals = self.finals(variant)
            runs = [r for r in self.runs if r.variant == variant]
            out[variant] = {
                "n": len(finals),
                "min": min(finals),
                "median": statistics.median(finals),
                "max": max(finals),
                "collision_free": sum(r.collision_free for r in runs),
                "altitude_violations": sum(r.violated for r in runs),
            }
        return out

    @property
    def ok(self) -> bool:
        return not self.failures


def trace_name(variant: str, seed: int) -> str:
    return f"trace_{variant}_{seed}.csv"


def path_name(variant: str, seed: int) -> str:
    return f"path_{variant}_{seed}.json"


def write_trace(trace: ConvergenceTrace, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for rec in trace:
            w.writerow([rec.iteration, rec.fes, repr(rec.best_cost), repr(rec.mean_cost)])


def read_trace(path: str | Path) -> ConvergenceTrace:
    trace = ConvergenceTrace()
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if tuple(header or ()) != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in rows:
            trace.append(int(row[0]), int(row[1]), float(row[2]), float(row[3]))
    return trace


def _run_one(scenario: Scenario, weights: CostWeights, opt: OptimizerConfig, out_dir: Path
             ) -> RunRecord:
    t0 = time.perf_counter()
    state = solve(path_problem(scenario, weights), opt)
    elapsed = time.perf_counter() - t0
    best = state.best
    write_trace(state.trace, out_dir / trace_name(opt.variant, opt.seed))
    payload = {
        "variant": opt.variant,
        "seed": opt.seed,
        "waypoints": decode(best.genes, scenario).tolist(),
        "genes": best.genes.tolist(),
        "cost": best.cost.to_dict(),
    }
    (out_dir / path_name(opt.variant, opt.seed)).write_text(json.dumps(payload, indent=1))
    c = best.cost
    return RunRecord(opt.variant, opt.seed, c.total, c.j1, c.j2, c.j3, c.violated,
                     state.fes, elapsed)


def _run_job(args):
    scenario, weights, opt, out_dir = args
    try:
        return _run_one(scenario, weights, opt, out_dir)
    except Exception as exc:  # reported per (variant, seed), batch continues
        return (opt.variant, opt.seed, f"{type(exc).__name__}: {exc}")


def run_batch(config: RunConfig) -> RunSummary:
    """Run every (variant, seed) pair and write traces, paths and ``summary.json``."""
    scenario = load_scenario(config.scenario)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(scenario, config.weights, config.optimizer_config(v, s), out_dir)
            for v in config.variants for s in config.seeds]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_run_job(job))
            log.info("finished %s seed %d", job[2].variant, job[2].seed)
    summary = RunSummary([r for r in results if isinstance(r, RunRecord)],
                         [r for r in results if not isinstance(r, RunRecord)])
    doc = {
        "config": config.to_dict(),
        "scenario": scenario.to_dict(),
        "runs": [asdict(r) | {"collision_free": r.collision_free} for r in summary.runs],
        "variants": summary.stats() if summary.runs else {},
        "failures": [{"variant": v, "seed": s, "error": e} for v, s, e in summary.failures],
    }
    (out_dir / "summary.json").write_text(json.dumps(doc, indent=1))
    return summary


def run_benchfn(function: str | BenchFunction, variant: str, config: OptimizerConfig,
                dim: int = 10, initial_population=None) -> ConvergenceTrace:
    """Optimise an analytic function with the same variant code path as the planner."""
    if isinstance(function, str):
        function = get_benchfn(function, dim)
    return solve(function.problem(), config.replace(variant=variant),
                 initial_population=initial_population).trace


def align_traces(traces: Mapping[str, ConvergenceTrace]) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Best cost of each trace on the union of all recorded FES values.

    Values between records are linearly interpolated; outside a trace's range
    its first/last value is held.
    """
    if not traces:
        raise ValueError("no traces to align")
    grid = np.unique(np.concatenate([t.fes for t in traces.values()]))
    return grid, {label: np.interp(grid, t.fes, t.best) for label, t in traces.items()}


def median_curves(grid_values: Mapping[str, np.ndarray], groups: Mapping[str, Iterable[str]]
                  ) -> dict[str, np.ndarray]:
    return {g: np.median([grid_values[k] for k in keys], axis=0) for g, keys in groups.items()}


def fes_to_reach(grid: np.ndarray, curve: np.ndarray, target: float) -> float:
    """First FES at which ``curve`` is at or below ``target`` (inf if never)."""
    hit = np.flatnonzero(curve <= target)
    return float(grid[hit[0]]) if hit.size else float("inf")


def export_plot_data(traces: Mapping[str, ConvergenceTrace], path: str | Path | None = None,
                     groups: Mapping[str, Sequence[str]] | None = None) -> list[list]:
    """FES-aligned table ``fes, <label>..., [median_<group>...]``.

    Rows are returned and, if ``path`` is given, written as CSV.
    """
    grid, values = align_traces(traces)
    columns = dict(values)
    if groups:
        for g, curve in median_curves(values, groups).items():
            columns[f"median_{g}"] = curve
    rows: list[list] = [["fes", *columns]]
    for j, f in enumerate(grid):
        rows.append([int(f), *(float(c[j]) for c in columns.values())])
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(rows[0])
            w.writerows([r[0], *map(repr, r[1:])] for r in rows[1:])
    return rows


def load_run_dir(out_dir: str | Path) -> tuple[dict, dict[tuple[str, int], ConvergenceTrace]]:
    out_dir = Path(out_dir)
    summary = json.loads((out_dir / "summary.json").read_text())
    traces = {(r["variant"], r["seed"]): read_trace(out_dir / trace_name(r["variant"], r["seed"]))
              for r in summary["runs"]}
    return summary, traces


def export_dir(out_dir: str | Path, csv_path: str | Path) -> list[list]:
    _, traces = load_run_dir(out_dir)
    labelled = {f"{v}_{s}": t for (v, s), t in traces.items()}
    groups: dict[str, list[str]] = {}
    for v, s in traces:
        groups.setdefault(v, []).append(f"{v}_{s}")
    return export_plot_data(labelled, csv_path, groups)


def validate_dir(out_dir: str | Path) -> list[str]:
    """Re-read everything a batch wrote and cross-check it. Returns problems found."""
    out_dir = Path(out_dir)
    problems: list[str] = []
    try:
        summary = json.loads((out_dir / "summary.json").read_text())
        scenario = scenario_from_dict(summary["scenario"])
        weights = CostWeights.from_dict(summary["config"]["weights"])
    except (OSError, KeyError, ValueError) as exc:
        return [f"summary.json unreadable: {exc}"]
    cost = PathCost(scenario, weights)
    finals: dict[str, list[float]] = {}
    for run in summary["runs"]:
        v, s = run["variant"], run["seed"]
        tag = f"{v}/{s}"
        try:
            trace = read_trace(out_dir / trace_name(v, s))
            path_doc = json.loads((out_dir / path_name(v, s)).read_text())
        except (OSError, ValueError, IndexError) as exc:
            problems.append(f"{tag}: {exc}")
            continue
        best = trace.best
        if len(best) == 0:
            problems.append(f"{tag}: empty trace")
            continue
        if np.any(np.diff(best) > 0):
            problems.append(f"{tag}: best cost increases in trace")
        if np.any(np.diff(trace.fes) < 0) or trace.fes[-1] > summary["config"]["max_fes"]:
            problems.append(f"{tag}: FES column out of order or over budget")
        if best[-1] != run["total"]:
            problems.append(f"{tag}: trace final {best[-1]!r} != summary total {run['total']!r}")
        recomputed = cost(np.array(path_doc["genes"]))
        if recomputed.total != run["total"]:
            problems.append(f"{tag}: path cost {recomputed.total!r} != summary {run['total']!r}")
        if not np.array_equal(np.array(path_doc["waypoints"]),
                              decode(np.array(path_doc["genes"]), scenario)):
            problems.append(f"{tag}: waypoints do not match genes")
        finals.setdefault(v, []).append(float(best[-1]))
    for v, vals in finals.items():
        want = summary["variants"].get(v, {}).get("median")
        if want != statistics.median(vals):
            problems.append(f"{v}: summary median {want!r} != trace median {statistics.median(vals)!r}")
    return problems
