"""Generation pipeline: draw -> document -> k candidates -> filter -> record.

All randomness is materialized up front from one master seed: for each
plan entry the master stream yields the category draw (users then
questions, in config order) and one 63-bit record seed, in that order.
Records then execute independently (possibly in a worker pool) and are
assembled in plan order, so a run with mock providers is a pure function
of (config, corpus, plan, seed).

A record attempt fails when the model output has no parseable candidate
lines, the judge reply is unparseable, or every candidate is rejected.
Each retry re-invokes generation with a fresh per-attempt seed (forwarded
to the backend) before the record is recorded as a failure. Hard provider
errors (bad status, auth) abort the run; per-call timeouts count as
attempt failures so the failure-rate policy can catch a systemic outage.
"""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

from .config import GenerationConfig, config_digest
from .corpus import Corpus, Document, corpus_digest
from .errors import (
    CandidateParseError,
    JudgeError,
    PlanError,
    ProviderTimeoutError,
    RunAbortedError,
)
from .prompting import USER_BULLET, QUESTION_BULLET, render_prompt
from .providers import ChatRequest, ProviderBundle
from .sampling import CategoryDraw, draw_categories

JUDGE_TEMPERATURE = 0.0
JUDGE_MAX_TOKENS = 256

DEFAULT_RETRIES = 2
DEFAULT_MAX_FAILURE_RATE = 0.2

_VERDICT_FIELDS_SLOT = "[verdict_fields]"
_CHARACTERISTICS_SLOT = "[characteristics]"
_QUESTION_SLOT = "[question]"
_ANSWER_SLOT = "[answer]"
_DOCUMENT_SLOT = "[document]"


@dataclass(frozen=True)
class CandidatePair:
    question: str
    answer: str
    raw_line: str


@dataclass(frozen=True)
class FilterVerdict:
    context_free: bool
    category_adherent: bool
    faithful: bool
    judge_raw: str

    @property
    def passed(self) -> bool:
        return self.context_free and self.category_adherent and self.faithful


@dataclass(frozen=True)
class RecordProvenance:
    model: str
    prompt_sha256: str
    record_seed: int
    attempt: int
    temperature: float
    max_tokens: int


@dataclass(frozen=True)
class BenchmarkRecord:
    record_id: str
    question: str
    answer: str
    document_id: str
    user_categories: dict[str, str]
    question_categories: dict[str, str]
    candidates: tuple[tuple[CandidatePair, FilterVerdict], ...]
    provenance: RecordProvenance


@dataclass(frozen=True)
class RecordFailure:
    record_id: str
    document_id: str
    reason: str
    attempts: int


@dataclass(frozen=True)
class Benchmark:
    records: tuple[BenchmarkRecord, ...]
    failures: tuple[RecordFailure, ...]
    config_digest: str
    corpus_digest: str
    seed: int

    def questions(self) -> list[str]:
        return [r.question for r in self.records]


# ---------------------------------------------------------------------------
# Candidate parsing


def parse_candidates(raw: str, k: int) -> list[CandidatePair]:
    """Pull up to k {"question", "answer"} objects out of model text.

    Scans line by line; tolerates surrounding prose and code fences by
    trying a JSON decode at every brace on the line. Lines that do not
    yield an object with non-empty string question/answer are skipped.
    """
    found: list[CandidatePair] = []
    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        obj = _first_json_object(stripped)
        if obj is None:
            continue
        question = obj.get("question")
        answer = obj.get("answer")
        if (
            isinstance(question, str)
            and isinstance(answer, str)
            and question.strip()
            and answer.strip()
        ):
            found.append(
                CandidatePair(
                    question=question.strip(),
                    answer=answer.strip(),
                    raw_line=stripped,
                )
            )
            if len(found) == k:
                break
    if not found:
        raise CandidateParseError(
            "model output contained no parseable question/answer lines", raw_text=raw
        )
    return found


_decoder = json.JSONDecoder()


def _first_json_object(line: str):
    start = line.find("{")
    while start >= 0:
        try:
            obj, _ = _decoder.raw_decode(line, start)
        except json.JSONDecodeError:
            start = line.find("{", start + 1)
            continue
        if isinstance(obj, dict):
            return obj
        start = line.find("{", start + 1)
    return None


# ---------------------------------------------------------------------------
# Judge


def default_judge_template() -> str:
    return resources.files("qaforge.data").joinpath("judge_prompt.txt").read_text(
        encoding="utf-8"
    )


def render_judge_prompt(
    pair: CandidatePair,
    draw: CategoryDraw,
    doc: Document,
    template: str | None = None,
) -> str:
    if template is None:
        template = default_judge_template()
    if draw.is_empty():
        fields = '"context_free", "faithful"'
        paragraphs = [
            p for p in template.split("\n\n") if _CHARACTERISTICS_SLOT not in p
        ]
        template = "\n\n".join(paragraphs)
        bullets = ""
    else:
        fields = '"context_free", "category_adherent", "faithful"'
        bullets = "\n".join(
            [USER_BULLET.format(cat.description) for _, cat in draw.user_picks]
            + [QUESTION_BULLET.format(cat.description) for _, cat in draw.question_picks]
        )
    text = template.replace(_VERDICT_FIELDS_SLOT, fields)
    text = text.replace(_CHARACTERISTICS_SLOT, bullets)
    text = text.replace(_QUESTION_SLOT, pair.question)
    text = text.replace(_ANSWER_SLOT, pair.answer)
    text = text.replace(_DOCUMENT_SLOT, doc.text)
    return text


def parse_judge_verdict(raw: str, category_required: bool) -> FilterVerdict:
    obj = None
    for line in raw.splitlines():
        obj = _first_json_object(line.strip())
        if obj is not None:
            break
    if obj is None:
        raise JudgeError("judge reply contained no JSON object", raw_text=raw)

    def _flag(name: str, required: bool, default: bool) -> bool:
        value = obj.get(name, None if required else default)
        if not isinstance(value, bool):
            raise JudgeError(f"judge reply missing boolean {name!r}", raw_text=raw)
        return value

    return FilterVerdict(
        context_free=_flag("context_free", True, True),
        category_adherent=_flag("category_adherent", category_required, True),
        faithful=_flag("faithful", True, True),
        judge_raw=raw,
    )


def judge_candidate(
    pair: CandidatePair,
    draw: CategoryDraw,
    doc: Document,
    provider,
    template: str | None = None,
    model: str = "default",
) -> FilterVerdict:
    """One judge call checking context-freeness, category fit, faithfulness.

    With an empty draw there are no categories to check, so the category
    flag is vacuously true and the judge is only asked the other two.
    """
    prompt = render_judge_prompt(pair, draw, doc, template=template)
    req = ChatRequest(
        prompt=prompt,
        temperature=JUDGE_TEMPERATURE,
        max_tokens=JUDGE_MAX_TOKENS,
        model=model,
    )
    raw = provider.complete(req).text
    return parse_judge_verdict(raw, category_required=not draw.is_empty())


# ---------------------------------------------------------------------------
# Record generation


@dataclass(frozen=True)
class RecordAssignment:
    index: int
    document_id: str
    draw: CategoryDraw
    record_seed: int

    @property
    def record_id(self) -> str:
        return f"r{self.index:06d}"


def materialize_assignments(
    cfg: GenerationConfig, plan: list[str], seed: int
) -> list[RecordAssignment]:
    """Consume the master stream once, up front, in plan order."""
    master = random.Random(seed)
    assignments = []
    for index, doc_id in enumerate(plan):
        draw = draw_categories(cfg, master)
        record_seed = master.getrandbits(63)
        assignments.append(
            RecordAssignment(
                index=index, document_id=doc_id, draw=draw, record_seed=record_seed
            )
        )
    return assignments


def generate_record(
    assignment: RecordAssignment,
    doc: Document,
    cfg: GenerationConfig,
    bundle: ProviderBundle,
    retries: int = DEFAULT_RETRIES,
    prompt_template: str | None = None,
    judge_template: str | None = None,
    model: str = "default",
):
    """Run one plan entry; returns (record, None) or (None, failure).

    The record's substream drives, in order: one per-attempt generation
    seed before each attempt, then one uniform pick among the passing
    candidates on success.
    """
    rng = random.Random(assignment.record_seed)
    prompt = render_prompt(
        assignment.draw, doc, cfg.num_candidates_k, template=prompt_template
    )
    prompt_hash = hashlib.sha256(prompt.text.encode("utf-8")).hexdigest()
    last_reason = "no attempts made"

    for attempt in range(retries + 1):
        attempt_seed = rng.getrandbits(63)
        request = ChatRequest(prompt=prompt.text, seed=attempt_seed, model=model)
        try:
            raw = bundle.generator.complete(request).text
        except ProviderTimeoutError as exc:
            last_reason = f"generation timed out: {exc}"
            continue
        try:
            candidates = parse_candidates(raw, cfg.num_candidates_k)
        except CandidateParseError:
            last_reason = "model output contained no parseable candidates"
            continue
        try:
            judged = tuple(
                (
                    pair,
                    judge_candidate(
                        pair,
                        assignment.draw,
                        doc,
                        bundle.judge,
                        template=judge_template,
                        model=model,
                    ),
                )
                for pair in candidates
            )
        except JudgeError:
            last_reason = "judge reply was unparseable"
            continue
        except ProviderTimeoutError as exc:
            last_reason = f"judge timed out: {exc}"
            continue

        passing = [i for i, (_, verdict) in enumerate(judged) if verdict.passed]
        if not passing:
            last_reason = "all candidates rejected by the filter"
            continue

        winner = judged[passing[rng.randrange(len(passing))]][0]
        record = BenchmarkRecord(
            record_id=assignment.record_id,
            question=winner.question,
            answer=winner.answer,
            document_id=doc.id,
            user_categories=assignment.draw.user_names(),
            question_categories=assignment.draw.question_names(),
            candidates=judged,
            provenance=RecordProvenance(
                model=bundle.generator.name,
                prompt_sha256=prompt_hash,
                record_seed=assignment.record_seed,
                attempt=attempt,
                temperature=request.temperature,
                max_tokens=request.max_tokens,
            ),
        )
        return record, None

    failure = RecordFailure(
        record_id=assignment.record_id,
        document_id=doc.id,
        reason=last_reason,
        attempts=retries + 1,
    )
    return None, failure


def run_generation(
    cfg: GenerationConfig,
    corpus: Corpus,
    plan: list[str],
    bundle: ProviderBundle,
    seed: int,
    retries: int = DEFAULT_RETRIES,
    max_failure_rate: float = DEFAULT_MAX_FAILURE_RATE,
    workers: int = 1,
    prompt_template: str | None = None,
    judge_template: str | None = None,
    model: str = "default",
    progress=None,
) -> Benchmark:
    """One generate_record attempt per plan entry, emitted in plan order."""
    docs = corpus.by_id()
    unknown = [doc_id for doc_id in plan if doc_id not in docs]
    if unknown:
        raise PlanError(f"plan references unknown document id {unknown[0]!r}")

    assignments = materialize_assignments(cfg, plan, seed)

    def run_one(assignment: RecordAssignment):
        return generate_record(
            assignment,
            docs[assignment.document_id],
            cfg,
            bundle,
            retries=retries,
            prompt_template=prompt_template,
            judge_template=judge_template,
            model=model,
        )

    records: list[BenchmarkRecord] = []
    failures: list[RecordFailure] = []
    allowed_failures = max_failure_rate * len(plan)

    if workers > 1:
        executor = ThreadPoolExecutor(max_workers=workers)
        results = executor.map(run_one, assignments)
    else:
        executor = None
        results = map(run_one, assignments)

    try:
        for done, (record, failure) in enumerate(results, start=1):
            if record is not None:
                records.append(record)
            else:
                failures.append(failure)
                if len(failures) > allowed_failures:
                    raise RunAbortedError(
                        f"aborting: {len(failures)} of {len(plan)} records failed "
                        f"(threshold {max_failure_rate:.0%}); last reason: {failure.reason}",
                        failures=len(failures),
                        total=len(plan),
                    )
            if progress is not None:
                progress(done, len(plan))
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)

    return Benchmark(
        records=tuple(records),
        failures=tuple(failures),
        config_digest=config_digest(cfg),
        corpus_digest=corpus_digest(corpus),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Serialization


def record_to_dict(record: BenchmarkRecord) -> dict:
    return {
        "record_id": record.record_id,
        "question": record.question,
        "answer": record.answer,
        "document_id": record.document_id,
        "user_categories": record.user_categories,
        "question_categories": record.question_categories,
        "candidates": [
            {
                "question": pair.question,
                "answer": pair.answer,
                "raw_line": pair.raw_line,
                "verdict": {
                    "context_free": verdict.context_free,
                    "category_adherent": verdict.category_adherent,
                    "faithful": verdict.faithful,
                    "judge_raw": verdict.judge_raw,
                },
            }
            for pair, verdict in record.candidates
        ],
        "provenance": {
            "model": record.provenance.model,
            "prompt_sha256": record.provenance.prompt_sha256,
            "record_seed": record.provenance.record_seed,
            "attempt": record.provenance.attempt,
            "temperature": record.provenance.temperature,
            "max_tokens": record.provenance.max_tokens,
        },
    }


def write_benchmark_jsonl(benchmark: Benchmark, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in benchmark.records:
            fh.write(json.dumps(record_to_dict(record), ensure_ascii=False) + "\n")


def failure_summary(benchmark: Benchmark) -> dict:
    return {
        "planned": len(benchmark.records) + len(benchmark.failures),
        "generated": len(benchmark.records),
        "failed": len(benchmark.failures),
        "failures": [
            {
                "record_id": f.record_id,
                "document_id": f.document_id,
                "reason": f.reason,
                "attempts": f.attempts,
            }
            for f in benchmark.failures
        ],
    }
