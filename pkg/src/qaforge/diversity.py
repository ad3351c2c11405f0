"""Question-diversity metrics over a benchmark.

Five scores: n-gram diversity (unique/total ratios for n=1..4, summed;
higher is more diverse), self-repetition (share of questions whose
4-grams appear in another question; lower is better), word- and PoS-level
gzip compression ratios (lower is better), and the embedding
homogenization score (mean pairwise cosine similarity; lower is better),
plus the syntactic-template statistics (first five PoS tags).

All metrics read question text only, never answers. N-gram counting
lowercases tokens and never crosses question boundaries. Gzip parameters
are pinned (level 6, mtime 0) so ratios are stable across machines.
"""

from __future__ import annotations

import gzip
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmbeddingError, MetricError
from .textproc.tagging import PosSequence, PosTemplate, pos_tag, template_of
from .textproc.tokenizer import ngrams, tokenize

NGD_MAX_ORDER = 4
SRS_ORDER = 4
GZIP_LEVEL = 6

# Direction of improvement per metric column, used by comparison tables.
METRIC_DIRECTIONS = {
    "ngd": "higher",
    "srs": "lower",
    "word_cr": "lower",
    "pos_cr": "lower",
    "embeddings_hs": "lower",
}


@dataclass(frozen=True)
class TemplateEntry:
    template: PosTemplate
    count: int
    examples: tuple[str, ...]


@dataclass(frozen=True)
class TemplateStats:
    distinct_templates: int
    top_templates: tuple[TemplateEntry, ...]
    top1_share: float
    top3_share: float


@dataclass(frozen=True)
class DiversityReport:
    n_questions: int
    ngd: float
    srs: float
    word_cr: float
    pos_cr: float
    embeddings_hs: float | None
    distinct_templates: int
    top_templates: tuple[TemplateEntry, ...]
    top1_share: float
    top3_share: float
    lowercased_ngrams: bool = True

    def to_dict(self) -> dict:
        return {
            "n_questions": self.n_questions,
            "ngd": self.ngd,
            "srs": self.srs,
            "word_cr": self.word_cr,
            "pos_cr": self.pos_cr,
            "embeddings_hs": self.embeddings_hs,
            "distinct_templates": self.distinct_templates,
            "top1_share": self.top1_share,
            "top3_share": self.top3_share,
            "top_templates": [
                {
                    "template": str(entry.template),
                    "count": entry.count,
                    "examples": list(entry.examples),
                }
                for entry in self.top_templates
            ],
            "lowercased_ngrams": self.lowercased_ngrams,
        }


def _token_lists(questions) -> list:
    return [tokenize(q) for q in questions]


def ngd(questions: list[str]) -> float:
    """Sum over n=1..4 of distinct/total n-gram ratios, pooled per question."""
    if not questions:
        raise MetricError("ngd needs at least one question")
    sequences = _token_lists(questions)
    score = 0.0
    for n in range(1, NGD_MAX_ORDER + 1):
        pooled: Counter = Counter()
        for seq in sequences:
            pooled.update(ngrams(seq, n))
        total = sum(pooled.values())
        if total:
            score += len(pooled) / total
    return score


def srs(questions: list[str]) -> float:
    """Share of questions with a 4-gram that also occurs in another question."""
    if not questions:
        raise MetricError("srs needs at least one question")
    if len(questions) < 2:
        return 0.0
    gram_sets = [frozenset(ngrams(seq, SRS_ORDER)) for seq in _token_lists(questions)]
    question_freq: Counter = Counter()
    for grams in gram_sets:
        question_freq.update(grams)
    repeated = sum(
        1 for grams in gram_sets if any(question_freq[g] > 1 for g in grams)
    )
    return repeated / len(questions)


def compression_ratio(payload: bytes) -> float:
    """Uncompressed size over gzip size; >1 means compressible/redundant."""
    if not payload:
        raise MetricError("cannot compute a compression ratio of an empty payload")
    compressed = gzip.compress(payload, compresslevel=GZIP_LEVEL, mtime=0)
    return len(payload) / len(compressed)


def word_cr(questions: list[str]) -> float:
    if not questions:
        raise MetricError("word_cr needs at least one question")
    return compression_ratio("\n".join(questions).encode("utf-8"))


def pos_cr(questions: list[str], tagger=None) -> float:
    if not questions:
        raise MetricError("pos_cr needs at least one question")
    sequences = [pos_tag(q, tagger) for q in questions]
    return pos_cr_from_sequences(sequences)


def pos_cr_from_sequences(sequences: list[PosSequence]) -> float:
    lines = [" ".join(seq.tags) for seq in sequences]
    return compression_ratio("\n".join(lines).encode("utf-8"))


def homogenization(questions: list[str], embedder) -> float:
    """Mean cosine similarity over all ordered pairs of distinct questions.

    Computed as ((sum e) . (sum e) - sum ||e||^2) / (N (N-1)) after row
    normalization, which avoids enumerating the N^2 pairs.
    """
    if len(questions) < 2:
        raise MetricError("homogenization needs at least two questions")
    vectors = embedder.embed_batch(list(questions))
    matrix = np.array([v.values for v in vectors], dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        raise EmbeddingError("embedding with zero norm cannot be normalized")
    unit = matrix / norms[:, None]
    total = unit.sum(axis=0)
    n = len(questions)
    return float((total @ total - (unit * unit).sum()) / (n * (n - 1)))


def template_stats(questions: list[str], tagger=None) -> TemplateStats:
    if not questions:
        raise MetricError("template_stats needs at least one question")
    sequences = [pos_tag(q, tagger) for q in questions]
    return template_stats_from_sequences(questions, sequences)


def template_stats_from_sequences(questions, sequences) -> TemplateStats:
    counts: Counter = Counter()
    examples: dict[PosTemplate, list[str]] = {}
    for question, seq in zip(questions, sequences):
        template = template_of(seq)
        counts[template] += 1
        bucket = examples.setdefault(template, [])
        if len(bucket) < 3:
            bucket.append(question)
    # ties broken lexicographically on the tag tuple, so output is stable
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0].tags))
    n = len(questions)
    entries = tuple(
        TemplateEntry(template=tpl, count=count, examples=tuple(examples[tpl]))
        for tpl, count in ranked[:10]
    )
    top1 = ranked[0][1] / n
    top3 = sum(count for _, count in ranked[:3]) / n
    return TemplateStats(
        distinct_templates=len(counts),
        top_templates=entries,
        top1_share=top1,
        top3_share=top3,
    )


def analyze(source, embedder=None, tagger=None) -> DiversityReport:
    """Full report for a question list, benchmark JSONL, or questions file.

    The homogenization score is left absent (None) when no embedder is
    configured or when there are fewer than two questions.
    """
    if isinstance(source, (str, Path)):
        questions = load_questions(source)
    else:
        questions = list(source)
    if not questions:
        raise MetricError("no questions to analyze")

    sequences = [pos_tag(q, tagger) for q in questions]  # tag once, reuse
    stats = template_stats_from_sequences(questions, sequences)

    hs = None
    if embedder is not None and len(questions) >= 2:
        hs = homogenization(questions, embedder)

    return DiversityReport(
        n_questions=len(questions),
        ngd=ngd(questions),
        srs=srs(questions),
        word_cr=word_cr(questions),
        pos_cr=pos_cr_from_sequences(sequences),
        embeddings_hs=hs,
        distinct_templates=stats.distinct_templates,
        top_templates=stats.top_templates,
        top1_share=stats.top1_share,
        top3_share=stats.top3_share,
    )


def load_questions(path) -> list[str]:
    """Read questions from benchmark JSONL or a plain one-per-line file."""
    path = Path(path)
    questions = []
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    mode = None
    for line in lines:
        if not line.strip():
            continue
        if mode is None:
            mode = "jsonl" if _looks_like_record(line) else "text"
        if mode == "jsonl":
            obj = json.loads(line)
            question = obj.get("question")
            if not isinstance(question, str) or not question.strip():
                raise MetricError(f"{path}: benchmark line without a question field")
            questions.append(question)
        else:
            questions.append(line.strip())
    return questions


def _looks_like_record(line: str) -> bool:
    stripped = line.strip()
    if not stripped.startswith("{"):
        return False
    try:
        obj = json.loads(stripped)
    except json.JSONDecodeError:
        return False
    return isinstance(obj, dict) and "question" in obj


def format_report_text(report: DiversityReport, label: str = "") -> str:
    """Aligned plain-text rendering of one report."""
    lines = []
    if label:
        lines.append(f"# {label}")
    hs = "-" if report.embeddings_hs is None else f"{report.embeddings_hs:.3f}"
    lines += [
        f"questions            {report.n_questions}",
        f"NGD        (higher)  {report.ngd:.3f}",
        f"SRS        (lower)   {report.srs:.3f}",
        f"word-CR    (lower)   {report.word_cr:.3f}",
        f"PoS-CR     (lower)   {report.pos_cr:.3f}",
        f"embeddings-HS (lower) {hs}",
        f"distinct templates   {report.distinct_templates}",
        f"top-1 template share {report.top1_share:.1%}",
        f"top-3 template share {report.top3_share:.1%}",
    ]
    for entry in report.top_templates[:3]:
        example = entry.examples[0] if entry.examples else ""
        lines.append(f"  {entry.template!s:<24} {entry.count:>6}  e.g. {example}")
    return "\n".join(lines) + "\n"
