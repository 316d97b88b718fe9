"""Comparison tables, regularity classification report and front dumps.

Every function here is a pure function of the record set, so the same
records always render to the same bytes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from ..adaptation import regularity_threshold
from ..core import ALGORITHMS
from ..indicators import mann_whitney
from ..problems import get_problem, save_front, shape_category
from .experiment import ResultRecord, group_records

REFERENCE_ALGORITHM = "nsga3-ur"
METRIC_DIRECTION = {"igd": "lower", "hv": "higher"}
MARKS = ("+", "-", "≈")
CATEGORIES = ("regular", "irregular", "real-world")
SUMMARY_COLUMNS = ("problem", "m", "algorithm", "metric", "mean", "std", "mark")


def format_sci(x: float, digits: int) -> str:
    """Scientific notation with an unpadded exponent, e.g. ``1.7843e-2``."""
    if x is None or not math.isfinite(x):
        return "n/a"
    if x == 0:
        return f"{0:.{digits}f}e0"
    mantissa, exponent = f"{x:.{digits}e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def format_cell(mean: float, std: float) -> str:
    return f"{format_sci(mean, 4)} ({format_sci(std, 2)})"


def _algorithm_order(names: Iterable[str]) -> list[str]:
    names = set(names)
    known = [a for a in ALGORITHMS if a in names]
    return known + sorted(names - set(known))


def _metric_values(recs: list[ResultRecord], metric: str) -> np.ndarray:
    values = [getattr(r, metric) for r in recs]
    return np.array([v for v in values if v is not None and math.isfinite(v)], dtype=float)


@dataclass
class SummaryRow:
    problem: str
    m: int
    algorithm: str
    metric: str
    mean: float
    std: float
    mark: str = ""
    best: bool = False
    n: int = 0


@dataclass
class Summary:
    metric: str
    algorithms: list[str]
    rows: list[SummaryRow]
    tallies: dict[str, dict[str, int]] = field(default_factory=dict)

    def cells(self) -> list[tuple[str, int]]:
        seen = []
        for row in self.rows:
            if (row.problem, row.m) not in seen:
                seen.append((row.problem, row.m))
        return seen

    def row(self, problem: str, m: int, algorithm: str) -> Optional[SummaryRow]:
        for r in self.rows:
            if (r.problem, r.m, r.algorithm) == (problem, m, algorithm):
                return r
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for r in self.rows:
            writer.writerow([r.problem, r.m, r.algorithm, r.metric, repr(r.mean), repr(r.std), r.mark])
        return buf.getvalue()

    def to_text(self) -> str:
        """Fixed-width table; the best mean per row is wrapped in brackets."""
        header = ["Problem", "M"] + self.algorithms
        lines = []
        for problem, m in self.cells():
            line = [problem, str(m)]
            for alg in self.algorithms:
                r = self.row(problem, m, alg)
                if r is None or r.n == 0:
                    line.append("n/a")
                    continue
                text = format_cell(r.mean, r.std)
                if r.mark:
                    text += f" {r.mark}"
                line.append(f"[{text}]" if r.best else text)
            lines.append(line)
        if self.tallies:
            footer = ["+/-/≈", ""]
            for alg in self.algorithms:
                t = self.tallies.get(alg)
                footer.append("" if t is None else "/".join(str(t[k]) for k in MARKS))
            lines.append(footer)
        widths = [max(len(row[i]) for row in [header] + lines) for i in range(len(header))]
        out = [f"{self.metric.upper()} mean (std)"]
        for row in [header] + lines:
            out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        return "\n".join(out) + "\n"


def summarize(records: Iterable[ResultRecord], metric: str = "igd", alpha: float = 0.05) -> Summary:
    """Mean and std per (problem, m, algorithm) with rank-sum marks against NSGA-III-UR.

    A mark is set on each baseline row: ``+`` when the baseline is
    significantly better than NSGA-III-UR, ``-`` when worse, ``≈`` otherwise.
    Runs whose metric is unavailable are left out of the statistics.
    """
    if metric not in METRIC_DIRECTION:
        raise ValueError(f"metric must be one of {sorted(METRIC_DIRECTION)}")
    better = METRIC_DIRECTION[metric]
    groups = group_records(records)
    algorithms = _algorithm_order(alg for _, _, alg in groups)
    compare = REFERENCE_ALGORITHM in algorithms and len(algorithms) > 1
    baselines = [a for a in algorithms if a != REFERENCE_ALGORITHM] if compare else []
    tallies = {a: dict.fromkeys(MARKS, 0) for a in baselines}
    rows = []
    for problem, m in sorted({(p, m) for p, m, _ in groups}):
        cell_rows = []
        reference = _metric_values(groups.get((problem, m, REFERENCE_ALGORITHM), []), metric)
        for alg in algorithms:
            values = _metric_values(groups.get((problem, m, alg), []), metric)
            if len(values) == 0:
                continue
            row = SummaryRow(problem, m, alg, metric, float(values.mean()),
                             float(values.std(ddof=1)) if len(values) > 1 else 0.0, n=len(values))
            if alg in tallies and len(reference):
                row.mark = mann_whitney(values, reference, alpha=alpha, better=better)
                tallies[alg][row.mark] += 1
            cell_rows.append(row)
        if cell_rows:
            means = [r.mean for r in cell_rows]
            target = min(means) if better == "lower" else max(means)
            for r in cell_rows:
                r.best = r.mean == target
        rows.extend(cell_rows)
    return Summary(metric, algorithms, rows, tallies)


# --- regularity classification ---------------------------------------------

@dataclass
class ClassificationRow:
    group: str
    category: str
    runs: int
    adaptive: int
    accuracy: Optional[float]


@dataclass
class ClassificationReport:
    by_category: list[ClassificationRow]
    by_shape: list[ClassificationRow]
    flags: list[str]

    def accuracy(self, category: str) -> Optional[float]:
        for row in self.by_category:
            if row.group == category:
                return row.accuracy
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("level", "group", "category", "runs", "adaptive", "accuracy"))
        for level, rows in (("category", self.by_category), ("shape", self.by_shape)):
            for r in rows:
                writer.writerow((level, r.group, r.category, r.runs, r.adaptive,
                                 "" if r.accuracy is None else repr(r.accuracy)))
        return buf.getvalue()

    def to_text(self) -> str:
        out = ["Regularity classification of NSGA-III-UR runs",
               f"{'group':<14}{'runs':>6}{'adaptive':>10}{'accuracy':>10}"]
        for rows in (self.by_category, self.by_shape):
            for r in rows:
                acc = "n/a" if r.accuracy is None else f"{r.accuracy:.3f}"
                out.append(f"{r.group:<14}{r.runs:>6}{r.adaptive:>10}{acc:>10}")
            out.append("")
        out.extend(f"WARNING: {flag}" for flag in self.flags)
        return "\n".join(out).rstrip() + "\n"


def _shape_of(rec: ResultRecord) -> str:
    return rec.shape or get_problem(rec.problem, rec.m).shape


def _class_row(group: str, category: str, recs: list[ResultRecord]) -> ClassificationRow:
    adaptive = sum(r.mode == "adaptive" for r in recs)
    if category == "regular":
        accuracy = (len(recs) - adaptive) / len(recs)
    elif category == "irregular":
        accuracy = adaptive / len(recs)
    else:
        accuracy = None  # no ground truth
    return ClassificationRow(group, category, len(recs), adaptive, accuracy)


def classification_report(records: Iterable[ResultRecord]) -> ClassificationReport:
    """Fraction of NSGA-III-UR runs whose final mode matches the front's regularity.

    Static is correct on linear or concave fronts, adaptive on degenerate,
    disconnected or inverted ones. Real-world problems are counted but not
    scored.
    """
    ur = sorted((r for r in records if r.algorithm == REFERENCE_ALGORITHM and r.mode is not None),
                key=lambda r: (r.problem, r.m, r.seed))
    by_cat: dict[str, list] = {}
    by_shape: dict[str, list] = {}
    for rec in ur:
        shape = _shape_of(rec)
        by_cat.setdefault(shape_category(shape), []).append(rec)
        by_shape.setdefault(shape, []).append(rec)
    cat_rows = [_class_row(c, c, by_cat[c]) for c in CATEGORIES if c in by_cat]
    shape_rows = [_class_row(s, shape_category(s), by_shape[s]) for s in sorted(by_shape)]

    flags = []
    regular = by_cat.get("regular", [])
    if regular and all(r.mode == "adaptive" for r in regular):
        ms = sorted({r.m for r in regular})
        negative = [m for m in ms if regularity_threshold(m) < 0]
        reason = (f"the threshold is negative for m={negative} while the spreading index is never negative, "
                  "so the test cannot return static there" if negative else
                  "the spreading index exceeded the threshold on every regular run")
        scalings = sorted({r.si_scaling for r in regular})
        flags.append(f"scale mismatch: every regular-front run switched to adaptive mode "
                     f"(si scaling {', '.join(scalings)}); {reason}")
    return ClassificationReport(cat_rows, shape_rows, flags)


# --- front dumps -------------------------------------------------------------

def median_record(recs: list[ResultRecord]) -> ResultRecord:
    """Replication with the median IGD (lower median for even counts).

    Falls back to HV when IGD is unavailable, and to the first seed when
    neither indicator is.
    """
    recs = sorted(recs, key=lambda r: r.seed)
    for metric in ("igd", "hv"):
        scored = [r for r in recs if getattr(r, metric) is not None and math.isfinite(getattr(r, metric))]
        if scored:
            scored.sort(key=lambda r: (getattr(r, metric), r.seed))
            return scored[(len(scored) - 1) // 2]
    return recs[0]


def front_filename(problem: str, m: int, algorithm: str) -> str:
    return f"{problem}_m{m}_{algorithm}_front.txt"


def dump_front(records: Iterable[ResultRecord], out_dir) -> list[Path]:
    """Write the median run's non-dominated objectives for every (problem, m, algorithm).

    Knapsack objectives are written as profits, i.e. with their sign restored.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for (problem, m, alg), recs in sorted(group_records(records).items()):
        rec = median_record(recs)
        front = np.asarray(rec.front, dtype=float).reshape(-1, m)
        if get_problem(problem, m).maximize:
            front = -front
        path = out_dir / front_filename(problem, m, alg)
        save_front(path, front)
        paths.append(path)
    return paths
