"""Corpus loading and document sampling plans.

Two input layouts are supported: JSONL (one ``{"id": ..., "text": ...}``
object per line, optional ``metadata`` map of strings) and a directory of
plain-text files where the relative path becomes the document id.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusError, PlanError

# Documents longer than this are cut at the last whitespace before the
# budget so prompts stay within typical LLM context limits.
DEFAULT_MAX_DOC_CHARS = 24_000


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    metadata: dict[str, str] = field(default_factory=dict)
    truncated: bool = False


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]

    def __post_init__(self):
        if not self.documents:
            raise CorpusError("corpus contains no documents")

    def __len__(self) -> int:
        return len(self.documents)

    def ids(self) -> list[str]:
        return [d.id for d in self.documents]

    def by_id(self) -> dict[str, Document]:
        return {d.id: d for d in self.documents}


def load_corpus(path, format: str = "jsonl", max_chars: int = DEFAULT_MAX_DOC_CHARS) -> Corpus:
    """Load a corpus from ``path``; format is "jsonl" or "plain_dir"."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus path does not exist: {path}")
    if format == "jsonl":
        documents = _load_jsonl(path, max_chars)
    elif format == "plain_dir":
        documents = _load_plain_dir(path, max_chars)
    else:
        raise CorpusError(f"unknown corpus format {format!r}")
    return Corpus(documents=tuple(documents))


def _load_jsonl(path: Path, max_chars: int) -> list[Document]:
    documents = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}:{lineno}: line is not a JSON object")
            for key in ("id", "text"):
                if key not in obj:
                    raise CorpusError(f"{path}:{lineno}: missing {key!r} field")
                if not isinstance(obj[key], str):
                    raise CorpusError(f"{path}:{lineno}: {key!r} must be a string")
            doc_id = obj["id"]
            if not doc_id:
                raise CorpusError(f"{path}:{lineno}: empty document id")
            if doc_id in seen:
                raise CorpusError(
                    f"{path}:{lineno}: duplicate id {doc_id!r} (first seen at line {seen[doc_id]})"
                )
            seen[doc_id] = lineno
            metadata = obj.get("metadata") or {}
            if not isinstance(metadata, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
            ):
                raise CorpusError(f"{path}:{lineno}: metadata must map strings to strings")
            text, truncated = _truncate(obj["text"], max_chars)
            if not text.strip():
                raise CorpusError(f"{path}:{lineno}: document text is empty")
            documents.append(
                Document(id=doc_id, text=text, metadata=dict(metadata), truncated=truncated)
            )
    if not documents:
        raise CorpusError(f"{path}: corpus file contains no documents")
    return documents


def _load_plain_dir(path: Path, max_chars: int) -> list[Document]:
    if not path.is_dir():
        raise CorpusError(f"{path} is not a directory")
    documents = []
    for file in sorted(p for p in path.rglob("*") if p.is_file()):
        rel = file.relative_to(path).as_posix()
        raw = file.read_text(encoding="utf-8")
        text, truncated = _truncate(raw, max_chars)
        if not text.strip():
            raise CorpusError(f"{file}: document text is empty")
        documents.append(Document(id=rel, text=text, truncated=truncated))
    if not documents:
        raise CorpusError(f"{path}: directory contains no files")
    return documents


def _truncate(text: str, max_chars: int) -> tuple[str, bool]:
    if len(text) <= max_chars:
        return text, False
    cut = text.rfind(" ", 0, max_chars + 1)
    if cut <= 0:
        cut = max_chars
    return text[:cut].rstrip(), True


def corpus_digest(corpus: Corpus) -> str:
    """sha256 over document ids and texts, in corpus order."""
    h = hashlib.sha256()
    for doc in corpus.documents:
        for part in (doc.id, doc.text):
            encoded = part.encode("utf-8")
            h.update(len(encoded).to_bytes(8, "big"))
            h.update(encoded)
    return h.hexdigest()


def make_sampling_plan(
    corpus: Corpus,
    seed: int,
    total: int | None = None,
    counts: dict[str, int] | None = None,
) -> list[str]:
    """Build the ordered list of document ids to generate from.

    Exactly one of ``total`` (i.i.d. uniform draws with replacement) and
    ``counts`` (exact per-document repetition counts, shuffled) must be
    given. The result is deterministic in (corpus order, mode, seed).
    """
    if (total is None) == (counts is None):
        raise PlanError("exactly one of total/counts must be given")
    rng = random.Random(seed)
    ids = corpus.ids()

    if total is not None:
        if total < 1:
            raise PlanError(f"total must be >= 1, got {total}")
        return [ids[rng.randrange(len(ids))] for _ in range(total)]

    known = set(ids)
    plan: list[str] = []
    for doc_id in ids:  # corpus order keeps expansion deterministic
        if doc_id in counts:
            count = counts[doc_id]
            if count < 0:
                raise PlanError(f"negative count for document {doc_id!r}")
            plan.extend([doc_id] * count)
    unknown = sorted(set(counts) - known)
    if unknown:
        raise PlanError(f"counts reference unknown document id {unknown[0]!r}")
    if not plan:
        raise PlanError("counts sum to zero; nothing to generate")
    rng.shuffle(plan)
    return plan
