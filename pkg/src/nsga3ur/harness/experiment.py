"""Replicated experiment execution with per-run JSON records."""

from __future__ import annotations

import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional

from ..algorithms import run
from ..core import ALGORITHMS, ConfigurationError, RngStream, RunConfig
from ..indicators import hypervolume, igd
from ..problems import FIXED_OBJECTIVES, cached_front, get_problem

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

SPEC_KEYS = {"problems", "objectives", "algorithms", "reps", "budget", "seed", "out",
             "pop_size", "si_scaling", "workers"}
CSV_FIELDS = ("problem", "m", "algorithm", "seed", "igd", "hv", "si", "threshold", "mode",
              "duration", "evaluations", "shape", "si_scaling", "initial_digest")


def default_pop_size(m: int) -> int:
    return 120 if m <= 4 else 105


@dataclass
class ExperimentSpec:
    problems: list[str]
    objectives: list[int]
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    reps: int = 30
    budget: int = 60_000
    seed: int = 1
    out: str = "results"
    pop_size: Optional[int] = None
    si_scaling: str = "literal"
    workers: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ConfigurationError("reps must be at least 1")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigurationError(f"unknown algorithm(s) {unknown}; expected {list(ALGORITHMS)}")
        for name, m in self.cells_without_algorithms():
            get_problem(name, m)
        if self.si_scaling not in ("literal", "rms"):
            raise ConfigurationError("si_scaling must be 'literal' or 'rms'")

    def cells_without_algorithms(self) -> list[tuple[str, int]]:
        pairs = []
        for name in self.problems:
            fixed = FIXED_OBJECTIVES.get(name.upper())
            for m in ([fixed] if fixed else self.objectives):
                if (name, m) not in pairs:
                    pairs.append((name, m))
        return pairs

    def seeds(self) -> list[int]:
        # shared across algorithms so comparisons are paired
        return [self.seed + r for r in range(self.reps)]

    def cells(self) -> list[tuple[str, int, str, int]]:
        return [(name, m, alg, s) for name, m in self.cells_without_algorithms()
                for alg in self.algorithms for s in self.seeds()]

    def population_size(self, m: int) -> int:
        return self.pop_size or default_pop_size(m)


def load_spec(path, **overrides) -> ExperimentSpec:
    """Read a TOML experiment file; non-None ``overrides`` win over file values."""
    path = Path(path)
    with path.open("rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - SPEC_KEYS
    if unknown:
        raise ConfigurationError(f"unknown key(s) in {path}: {sorted(unknown)}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("problems", "algorithms"):
        if isinstance(raw.get(key), str):
            raw[key] = [raw[key]]
    if isinstance(raw.get("objectives"), int):
        raw["objectives"] = [raw["objectives"]]
    if "problems" not in raw or "objectives" not in raw:
        raise ConfigurationError(f"{path} must define 'problems' and 'objectives'")
    return ExperimentSpec(**raw)


@dataclass
class ResultRecord:
    problem: str
    m: int
    algorithm: str
    seed: int
    igd: Optional[float]
    hv: Optional[float]
    si: Optional[float]
    threshold: Optional[float]
    mode: Optional[str]
    duration: float
    evaluations: int = 0
    shape: str = ""
    si_scaling: str = "literal"
    initial_digest: str = ""
    front: list = field(default_factory=list, repr=False)

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.problem, self.m, self.algorithm)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "ResultRecord":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def record_filename(problem: str, m: int, algorithm: str, seed: int) -> str:
    return f"{problem}_m{m}_{algorithm}_s{seed}.json"


def _finite_or_none(x: float) -> Optional[float]:
    return None if x is None or not math.isfinite(x) else float(x)


def execute_cell(problem_name: str, m: int, algorithm: str, seed: int, budget: int, pop_size: int,
                 si_scaling: str = "literal", force_mode: Optional[str] = None) -> ResultRecord:
    """Run one replication and score its final non-dominated set."""
    problem = get_problem(problem_name, m)
    config = RunConfig(problem_name, m, pop_size, budget, seed=seed, algorithm=algorithm,
                       si_scaling=si_scaling, force_mode=force_mode)
    streams = RngStream(seed)
    result = run(problem, config, streams)
    front = result.nondominated()
    ref = cached_front(problem)
    igd_value = igd(front, ref) if ref is not None else None
    hv_value = hypervolume(front, problem, rng=streams.indicator)
    ur = result.ur
    return ResultRecord(
        problem=problem_name, m=m, algorithm=algorithm, seed=seed,
        igd=_finite_or_none(igd_value), hv=_finite_or_none(hv_value),
        si=ur.si if ur else None, threshold=ur.threshold if ur else None, mode=result.mode,
        duration=result.duration, evaluations=result.evaluations, shape=problem.shape,
        si_scaling=si_scaling, initial_digest=result.initial_digest,
        front=front.tolist(),
    )


def load_records(out_dir) -> list[ResultRecord]:
    out_dir = Path(out_dir)
    records = []
    for path in sorted(out_dir.glob("*.json")):
        with path.open() as fh:
            data = json.load(fh)
        if isinstance(data, dict) and "algorithm" in data:
            records.append(ResultRecord.from_dict(data))
    return records


class RecordWriter:
    """Single sink for JSON records and the streaming CSV."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.csv_path = out_dir / "records.csv"
        out_dir.mkdir(parents=True, exist_ok=True)

    def write(self, rec: ResultRecord):
        path = self.out_dir / record_filename(rec.problem, rec.m, rec.algorithm, rec.seed)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(rec.to_json())
        tmp.replace(path)
        new_file = not self.csv_path.exists()
        with self.csv_path.open("a", newline="") as fh:
            writer = csv.writer(fh)
            if new_file:
                writer.writerow(CSV_FIELDS)
            writer.writerow([getattr(rec, f) for f in CSV_FIELDS])


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None, progress=None) -> list[ResultRecord]:
    """Execute every (problem, m, algorithm, seed) cell, skipping finished ones.

    Returns all records of the spec, freshly computed or loaded from disk.
    """
    out_dir = Path(spec.out)
    writer = RecordWriter(out_dir)
    workers = workers or spec.workers or 1
    done, pending = {}, []
    for cell in spec.cells():
        path = out_dir / record_filename(*cell)
        if path.exists():
            done[cell] = ResultRecord.from_dict(json.loads(path.read_text()))
        else:
            pending.append(cell)
    log.info("%d cells finished, %d to run", len(done), len(pending))

    def args(cell):
        name, m, alg, seed = cell
        return (name, m, alg, seed, spec.budget, spec.population_size(m), spec.si_scaling)

    def finish(cell, rec):
        writer.write(rec)
        done[cell] = rec
        if progress:
            progress(rec)

    if workers <= 1:
        for cell in pending:
            finish(cell, execute_cell(*args(cell)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(execute_cell, *args(cell)): cell for cell in pending}
            for fut in as_completed(futures):
                finish(futures[fut], fut.result())
    return [done[cell] for cell in spec.cells()]


def group_records(records: Iterable[ResultRecord]) -> dict[tuple[str, int, str], list[ResultRecord]]:
    groups: dict = {}
    for rec in records:
        groups.setdefault(rec.key, []).append(rec)
    for recs in groups.values():
        recs.sort(key=lambda r: r.seed)
    return groups
