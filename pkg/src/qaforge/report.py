"""Cross-benchmark comparison tables and diversity-vs-scale sweeps.

Sweeps come in two axes: questions_per_document (every document gets x
questions) and num_documents (a fixed question total spread as evenly as
possible over the first x documents of one seeded shuffle, using
largest-remainder apportionment). Each (variant, x) point runs with a
seed derived from the sweep seed, so any point can be reproduced as a
standalone generation run with the equivalent plan.
"""

from __future__ import annotations

import csv
import hashlib
import random
from dataclasses import dataclass

from .config import GenerationConfig
from .corpus import Corpus, make_sampling_plan
from .diversity import METRIC_DIRECTIONS, DiversityReport, analyze
from .errors import QaforgeError
from .pipeline import run_generation
from .providers import ProviderBundle

AXIS_QUESTIONS_PER_DOCUMENT = "questions_per_document"
AXIS_NUM_DOCUMENTS = "num_documents"

DEFAULT_SWEEP_TOTAL = 500


@dataclass(frozen=True)
class ComparisonTable:
    labels: tuple[str, ...]
    reports: tuple[DiversityReport, ...]
    best: dict  # metric name -> best row index, or None if not comparable

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"label": label, **report.to_dict()}
                for label, report in zip(self.labels, self.reports)
            ],
            "best": self.best,
            "directions": dict(METRIC_DIRECTIONS),
        }


def compare(inputs, embedder=None, tagger=None) -> ComparisonTable:
    """One analyze() per (label, source) input; inputs must be >= 2."""
    if len(inputs) < 2:
        raise ValueError("compare needs at least two inputs")
    labels = tuple(label for label, _ in inputs)
    if len(set(labels)) != len(labels):
        raise ValueError("compare labels must be distinct")
    reports = tuple(
        analyze(source, embedder=embedder, tagger=tagger) for _, source in inputs
    )
    return ComparisonTable(labels=labels, reports=reports, best=_best_rows(reports))


def _best_rows(reports) -> dict:
    best: dict = {}
    for metric, direction in METRIC_DIRECTIONS.items():
        values = [getattr(report, metric) for report in reports]
        indexed = [(v, i) for i, v in enumerate(values) if v is not None]
        if not indexed:
            best[metric] = None
            continue
        if direction == "higher":
            best[metric] = max(indexed, key=lambda pair: (pair[0], -pair[1]))[1]
        else:
            best[metric] = min(indexed, key=lambda pair: (pair[0], pair[1]))[1]
    return best


def format_comparison_text(table: ComparisonTable) -> str:
    """Aligned text table; the best value per column is starred."""
    headers = ["model", "NGD (up)", "SRS (down)", "word-CR (down)",
               "PoS-CR (down)", "HS (down)", "templates"]
    rows = []
    for i, (label, report) in enumerate(zip(table.labels, table.reports)):
        def cell(metric, value, fmt="{:.3f}"):
            if value is None:
                return "-"
            mark = "*" if table.best.get(metric) == i else " "
            return fmt.format(value) + mark

        rows.append(
            [
                label,
                cell("ngd", report.ngd),
                cell("srs", report.srs),
                cell("word_cr", report.word_cr),
                cell("pos_cr", report.pos_cr),
                cell("embeddings_hs", report.embeddings_hs),
                str(report.distinct_templates),
            ]
        )
    widths = [max(len(headers[c]), *(len(r[c]) for r in rows)) for c in range(len(headers))]
    lines = [
        "  ".join(h.ljust(widths[c]) for c, h in enumerate(headers)),
        "  ".join("-" * widths[c] for c in range(len(headers))),
    ]
    lines += ["  ".join(r[c].ljust(widths[c]) for c in range(len(headers))) for r in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepPoint:
    x: int
    reports: dict  # label -> DiversityReport
    errors: dict  # label -> error message, for points that failed


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: tuple[SweepPoint, ...]


def derive_point_seed(seed: int, label: str, x: int) -> int:
    """Stable per-point seed; documented so points can be re-run standalone."""
    digest = hashlib.blake2b(f"{seed}|{label}|{x}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def plan_for_point(axis: str, corpus: Corpus, x: int, total: int, seed: int) -> list[str]:
    """The document plan a sweep point runs with (shared by standalone runs)."""
    ids = corpus.ids()
    if axis == AXIS_QUESTIONS_PER_DOCUMENT:
        if x < 1:
            raise ValueError("questions per document must be >= 1")
        counts = {doc_id: x for doc_id in ids}
    elif axis == AXIS_NUM_DOCUMENTS:
        if not (1 <= x <= len(ids)):
            raise ValueError(f"num_documents x={x} outside 1..{len(ids)}")
        shuffled = list(ids)
        random.Random(seed).shuffle(shuffled)  # one shuffle; prefixes nest
        chosen = shuffled[:x]
        base, remainder = divmod(total, x)
        counts = {
            doc_id: base + (1 if i < remainder else 0)
            for i, doc_id in enumerate(chosen)
        }
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    plan_seed = derive_point_seed(seed, f"plan:{axis}", x)
    return make_sampling_plan(corpus, seed=plan_seed, counts=counts)


def run_sweep(
    axis: str,
    variants: list[tuple[str, GenerationConfig]],
    corpus: Corpus,
    bundle_factory,
    xs: list[int],
    seed: int,
    total: int = DEFAULT_SWEEP_TOTAL,
    embedder=None,
    tagger=None,
    **run_kwargs,
) -> SweepResult:
    """One generation + analysis per (variant, x).

    bundle_factory() builds a fresh ProviderBundle per point so provider
    stats stay per-run. Points execute sequentially to keep provider rate
    usage predictable; a failing point is recorded and the sweep goes on.
    """
    if xs != sorted(xs) or len(set(xs)) != len(xs):
        raise ValueError("x values must be strictly increasing")
    points = []
    for x in xs:
        reports: dict = {}
        errors: dict = {}
        for label, cfg in variants:
            try:
                plan = plan_for_point(axis, corpus, x, total, seed)
                bundle = bundle_factory()
                benchmark = run_generation(
                    cfg,
                    corpus,
                    plan,
                    bundle,
                    seed=derive_point_seed(seed, label, x),
                    **run_kwargs,
                )
                reports[label] = analyze(
                    benchmark.questions(), embedder=embedder, tagger=tagger
                )
            except (QaforgeError, ValueError) as exc:
                errors[label] = str(exc)
        points.append(SweepPoint(x=x, reports=reports, errors=errors))
    return SweepResult(axis=axis, points=tuple(points))


SWEEP_CSV_METRICS = ("ngd", "srs", "word_cr", "pos_cr", "embeddings_hs", "distinct_templates")


def write_sweep_csv(result: SweepResult, path) -> None:
    """Long-form series (x, label, metric, value) for external plotting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "label", "metric", "value"])
        for point in result.points:
            for label in sorted(point.reports):
                report = point.reports[label]
                for metric in SWEEP_CSV_METRICS:
                    value = getattr(report, metric)
                    if value is None:
                        continue
                    writer.writerow([point.x, label, metric, value])


def sweep_to_dict(result: SweepResult) -> dict:
    return {
        "axis": result.axis,
        "points": [
            {
                "x": point.x,
                "reports": {
                    label: report.to_dict() for label, report in point.reports.items()
                },
                "errors": dict(point.errors),
            }
            for point in result.points
        ],
    }
