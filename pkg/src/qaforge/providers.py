"""Chat-completion and embedding backends.

Real traffic goes through an OpenAI-compatible wire protocol
(``/chat/completions`` and ``/embeddings``); endpoint, model, and the
``QAFORGE_API_KEY`` env var configure it. For offline runs and tests
there are deterministic mocks: two generator personas ("varied", which
conditions its style on the category descriptions present in the prompt,
and "templated", which rehashes one question pattern the way an
unconfigured model tends to), a judge mock with pluggable policies, a
hash-projection embedder, and a precomputed-vectors file embedder.

Every mock is a pure function of (input, seed): byte-identical output
across runs and platforms.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
import re
import threading
import time
from dataclasses import dataclass

import httpx

from .errors import EmbeddingError, ProviderError, ProviderTimeoutError
from .textproc.tokenizer import tokenize

API_KEY_ENV = "QAFORGE_API_KEY"

DEFAULT_TEMPERATURE = 1.0
DEFAULT_MAX_TOKENS = 1024

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class ChatRequest:
    prompt: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    model: str = "default"
    seed: int | None = None

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass(frozen=True)
class ChatResult:
    text: str
    latency_s: float = 0.0
    prompt_tokens: int | None = None
    completion_tokens: int | None = None


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    dimension: int

    def __post_init__(self):
        if self.dimension < 1 or self.dimension != len(self.values):
            raise EmbeddingError(
                f"dimension {self.dimension} does not match {len(self.values)} values"
            )
        if not all(math.isfinite(v) for v in self.values):
            raise EmbeddingError("embedding contains non-finite values")


class ProviderStats:
    """Thread-safe call counters surfaced in the run manifest."""

    def __init__(self):
        self._lock = threading.Lock()
        self.calls = 0
        self.prompt_tokens = 0
        self.completion_tokens = 0
        self.total_latency_s = 0.0

    def record(self, result: ChatResult) -> None:
        with self._lock:
            self.calls += 1
            self.total_latency_s += result.latency_s
            if result.prompt_tokens:
                self.prompt_tokens += result.prompt_tokens
            if result.completion_tokens:
                self.completion_tokens += result.completion_tokens

    def to_dict(self) -> dict:
        return {
            "calls": self.calls,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "total_latency_s": round(self.total_latency_s, 3),
        }


# ---------------------------------------------------------------------------
# HTTP providers


class HttpChatProvider:
    """OpenAI-compatible chat client with retry/backoff and a permit limit."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        timeout_ms: int = 60_000,
        retries: int = 3,
        backoff_base_s: float = 0.5,
        max_concurrency: int = 4,
        transport=None,
        sleeper=time.sleep,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.retries = retries
        self.backoff_base_s = backoff_base_s
        self.stats = ProviderStats()
        self._sleep = sleeper
        self._permits = threading.BoundedSemaphore(max_concurrency)
        self._client = httpx.Client(transport=transport, timeout=timeout_ms / 1000.0)

    @property
    def name(self) -> str:
        return f"http:{self.model}@{self.endpoint}"

    def complete(self, req: ChatRequest) -> ChatResult:
        payload: dict = {
            "model": req.model if req.model != "default" else self.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if req.seed is not None:
            payload["seed"] = req.seed
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        url = f"{self.endpoint}/chat/completions"
        started = time.monotonic()
        last_error = None
        with self._permits:
            for attempt in range(self.retries + 1):
                if attempt:
                    self._sleep(self.backoff_base_s * 2 ** (attempt - 1))
                try:
                    response = self._client.post(url, json=payload, headers=headers)
                except httpx.HTTPError as exc:
                    last_error = f"transport error: {exc}"
                    continue
                if response.status_code in _RETRYABLE_STATUS:
                    last_error = f"status {response.status_code}"
                    continue
                if response.status_code != 200:
                    raise ProviderError(
                        f"chat endpoint returned {response.status_code}",
                        status=response.status_code,
                        body_excerpt=response.text[:200],
                    )
                result = self._parse(response, started)
                self.stats.record(result)
                return result
        raise ProviderTimeoutError(
            f"chat endpoint still failing after {self.retries + 1} attempts ({last_error})"
        )

    @staticmethod
    def _parse(response, started) -> ChatResult:
        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise ProviderError(
                f"malformed chat completion response: {exc}",
                status=response.status_code,
                body_excerpt=response.text[:200],
            ) from exc
        usage = data.get("usage") or {}
        return ChatResult(
            text=text,
            latency_s=time.monotonic() - started,
            prompt_tokens=usage.get("prompt_tokens"),
            completion_tokens=usage.get("completion_tokens"),
        )


class HttpEmbedder:
    """OpenAI-compatible /embeddings client; batches internally."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        timeout_ms: int = 60_000,
        batch_size: int = 64,
        transport=None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.batch_size = batch_size
        self._client = httpx.Client(transport=transport, timeout=timeout_ms / 1000.0)

    @property
    def name(self) -> str:
        return f"http-embed:{self.model}@{self.endpoint}"

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        _check_texts(texts)
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        url = f"{self.endpoint}/embeddings"
        out: list[EmbeddingVector] = []
        for start in range(0, len(texts), self.batch_size):
            chunk = texts[start : start + self.batch_size]
            response = self._client.post(
                url, json={"model": self.model, "input": chunk}, headers=headers
            )
            if response.status_code != 200:
                raise ProviderError(
                    f"embedding endpoint returned {response.status_code}",
                    status=response.status_code,
                    body_excerpt=response.text[:200],
                )
            try:
                rows = sorted(response.json()["data"], key=lambda row: row["index"])
                vectors = [row["embedding"] for row in rows]
            except (ValueError, LookupError, TypeError) as exc:
                raise ProviderError(f"malformed embeddings response: {exc}") from exc
            if len(vectors) != len(chunk):
                raise ProviderError(
                    f"embedding endpoint returned {len(vectors)} vectors for {len(chunk)} texts"
                )
            out.extend(
                EmbeddingVector(values=tuple(float(x) for x in v), dimension=len(v))
                for v in vectors
            )
        _check_uniform_dimension(out)
        return out


# ---------------------------------------------------------------------------
# Deterministic mocks

PERSONA_VARIED = "varied"  # category-conditioned: follows the prompt's bullets
PERSONA_TEMPLATED = "templated"  # rehashes one pattern, like an unconfigured model

_DOC_SECTION = "### The generated questions should be about facts from the following document:"

_PLACES = ["China", "Italy", "France", "Europe", "Asia", "America", "Brazil", "India"]
_PLAIN_NOUNS = ["people", "children", "doctors", "patients", "workers", "families"]
_THINGS = ["vaccines", "masks", "tests", "treatments", "drugs", "antibodies", "measures"]
_SIMPLE_ADJS = ["new", "common", "mild", "safe", "early", "serious", "rare"]
_TECH_ADJS = ["clinical", "viral", "respiratory", "asymptomatic", "seasonal"]
_TECH_NOUNS = [
    "pathogenesis", "seroprevalence", "virulence", "immunogenicity",
    "transmissibility", "morbidity", "incubation", "etiology",
]
_RATES = ["mortality", "infection", "recovery", "transmission", "survival"]
_VERBS = ["spread", "work", "help", "protect", "change", "develop", "improve"]


def _digest_rng(*parts) -> random.Random:
    digest = hashlib.blake2b("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _requested_count(prompt: str) -> int:
    match = re.search(r"generate (\d+) candidate questions", prompt)
    return int(match.group(1)) if match else 3


def _document_excerpt(prompt: str) -> str:
    start = prompt.find(_DOC_SECTION)
    if start < 0:
        return ""
    body = prompt[start + len(_DOC_SECTION):]
    end = body.find("\n\n###")
    return body[:end] if end >= 0 else body


def _topic_words(prompt: str) -> list[str]:
    """Distinct content-ish words of the document, in first-seen order."""
    words = []
    seen = set()
    for token in _document_excerpt(prompt).split():
        cleaned = token.strip(".,;:()\"'?!").lower()
        if len(cleaned) >= 4 and cleaned.isalpha() and cleaned not in seen:
            seen.add(cleaned)
            words.append(cleaned)
    return words or ["virus", "outbreak", "treatment", "immunity"]


class MockChatGenerator:
    """Deterministic stand-in for the generation backbone."""

    def __init__(self, seed: int = 0, persona: str = PERSONA_VARIED):
        if persona not in (PERSONA_VARIED, PERSONA_TEMPLATED):
            raise ValueError(f"unknown mock persona {persona!r}")
        self.seed = seed
        self.persona = persona
        self.stats = ProviderStats()

    @property
    def name(self) -> str:
        return f"mock:{self.persona}:{self.seed}"

    def complete(self, req: ChatRequest) -> ChatResult:
        rng = _digest_rng("gen", self.seed, req.seed, req.prompt)
        k = _requested_count(req.prompt)
        topics = _topic_words(req.prompt)
        if self.persona == PERSONA_TEMPLATED:
            lines = [self._templated_line(rng, topics) for _ in range(k)]
        else:
            lines = [self._varied_line(rng, topics, req.prompt) for _ in range(k)]
        result = ChatResult(text="\n".join(lines))
        self.stats.record(result)
        return result

    @staticmethod
    def _templated_line(rng, topics) -> str:
        # always the same "What are the main ..." opener, so every line
        # starts with the WP VBP DT JJ NNS pattern of unconfigured models
        topic = rng.choice(topics[:3])
        noun = rng.choice(["symptoms", "effects", "differences", "causes", "types"])
        question = f"What are the main {noun} of {topic}?"
        answer = f"The study describes the {topic} findings in detail."
        return json.dumps({"question": question, "answer": answer})

    def _varied_line(self, rng, topics, prompt) -> str:
        topic = rng.choice(topics[:8])
        other = rng.choice(topics[:8])
        place = rng.choice(_PLACES)
        wants = _style_flags(prompt)

        if wants["search"]:
            pool = topics[:8] + _THINGS + _RATES
            length = rng.randint(3, 5) if wants["short_query"] else rng.randint(7, 9)
            question = " ".join(rng.choice(pool) for _ in range(length))
        else:
            question = self._natural_question(rng, topic, other, place, wants)
            if wants["premise"]:
                premise = rng.choice(
                    [
                        f"I am a {rng.choice(['nurse', 'teacher', 'student', 'researcher'])}.",
                        f"I live in {place}.",
                        f"My {rng.choice(['child', 'patient', 'colleague'])} is sick.",
                    ]
                )
                question = f"{premise} {question}"
        answer = f"Based on the findings about {topic}, {other} plays a role in {place}."
        return json.dumps({"question": question, "answer": answer})

    @staticmethod
    def _natural_question(rng, topic, other, place, wants) -> str:
        adjs = _TECH_ADJS if wants["expert"] else _SIMPLE_ADJS
        nouns = _TECH_NOUNS if wants["expert"] else _PLAIN_NOUNS
        factoid_forms = [
            f"When did the {topic} outbreak start in {place}?",
            f"How many {rng.choice(_PLAIN_NOUNS)} were affected by {topic}?",
            f"What was the {rng.choice(_RATES)} rate of {topic}?",
            f"Who discovered the {topic} {rng.choice(['strain', 'variant', 'mechanism'])}?",
        ]
        open_forms = [
            f"How does {topic} affect {rng.choice(nouns)}?",
            f"Why do {rng.choice(_PLAIN_NOUNS)} develop {topic}?",
            f"What is the difference between {topic} and {other}?",
            f"How can {rng.choice(_PLAIN_NOUNS)} {rng.choice(_VERBS)} against {topic}?",
        ]
        polar_forms = [
            f"Is the {topic} {rng.choice(adjs)}?",
            f"Can {rng.choice(_PLAIN_NOUNS)} {rng.choice(_VERBS)} without {rng.choice(_THINGS)}?",
            f"Are there {rng.choice(adjs)} {rng.choice(_THINGS)} for {topic}?",
        ]
        if wants["factoid"]:
            forms = factoid_forms + polar_forms[:1]
        elif wants["open_ended"]:
            forms = open_forms
        else:
            forms = factoid_forms + open_forms + polar_forms
        question = rng.choice(forms)
        if wants["verbose"]:
            question = (
                f"{question[:-1]} and how has that changed in {place} "
                f"since the {rng.choice(_RATES)} studies?"
            )
        return question


def _style_flags(prompt: str) -> dict:
    return {
        "search": "typed web query" in prompt,
        "short_query": "less than 7 words" in prompt,
        "premise": "starting with a very short premise" in prompt,
        "verbose": "more than 9 words" in prompt,
        "factoid": "short fact" in prompt,
        "open_ended": "detailed or exploratory" in prompt,
        "expert": "deep understanding" in prompt,
    }


JUDGE_LENIENT = "lenient"
JUDGE_STRICT = "strict"
JUDGE_REJECT = "reject"
JUDGE_GARBLED = "garbled"

_QUESTION_MARK = "### Candidate question:"
_ANSWER_MARK = "### Candidate answer:"
_DOCUMENT_MARK = "### Source document:"
_CONTEXT_LEAK = re.compile(r"\b(document|author|text|passage)\b", re.IGNORECASE)


class MockJudge:
    """Deterministic judge; policies trade strictness for test coverage.

    lenient: everything passes. strict: flags questions that mention the
    document/author, and answers carrying the "[unsupported]" marker.
    reject: everything fails. garbled: unparseable reply (error paths).
    """

    def __init__(self, policy: str = JUDGE_LENIENT):
        if policy not in (JUDGE_LENIENT, JUDGE_STRICT, JUDGE_REJECT, JUDGE_GARBLED):
            raise ValueError(f"unknown judge policy {policy!r}")
        self.policy = policy
        self.stats = ProviderStats()

    @property
    def name(self) -> str:
        return f"mock-judge:{self.policy}"

    def complete(self, req: ChatRequest) -> ChatResult:
        if self.policy == JUDGE_GARBLED:
            result = ChatResult(text="I cannot answer that.")
            self.stats.record(result)
            return result
        question = _between(req.prompt, _QUESTION_MARK, _ANSWER_MARK)
        answer = _between(req.prompt, _ANSWER_MARK, _DOCUMENT_MARK)
        asked_category = '"category_adherent"' in req.prompt

        if self.policy == JUDGE_REJECT:
            verdict = {"context_free": False, "faithful": False}
            if asked_category:
                verdict["category_adherent"] = False
        elif self.policy == JUDGE_STRICT:
            verdict = {
                "context_free": not _CONTEXT_LEAK.search(question),
                "faithful": "[unsupported]" not in answer,
            }
            if asked_category:
                verdict["category_adherent"] = True
        else:
            verdict = {"context_free": True, "faithful": True}
            if asked_category:
                verdict["category_adherent"] = True
        result = ChatResult(text=json.dumps(verdict))
        self.stats.record(result)
        return result


def _between(text: str, start_mark: str, end_mark: str) -> str:
    start = text.find(start_mark)
    if start < 0:
        return ""
    start += len(start_mark)
    end = text.find(end_mark, start)
    return text[start:end].strip() if end >= 0 else text[start:].strip()


class HashEmbedder:
    """Tokens hashed into a fixed-dim vector, L2-normalized; pure in (text, seed)."""

    def __init__(self, dimension: int = 64, seed: int = 0):
        self.dimension = dimension
        self.seed = seed

    @property
    def name(self) -> str:
        return f"mock-embed:{self.dimension}d:{self.seed}"

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        _check_texts(texts)
        return [self._embed(text) for text in texts]

    def _embed(self, text: str) -> EmbeddingVector:
        values = [0.0] * self.dimension
        for token in tokenize(text).tokens:
            digest = hashlib.blake2b(f"{self.seed}|{token}".encode("utf-8")).digest()
            index = int.from_bytes(digest[:4], "big") % self.dimension
            sign = 1.0 if digest[4] & 1 else -1.0
            values[index] += sign
        norm = math.sqrt(sum(v * v for v in values))
        if norm == 0.0:
            values[0] = 1.0
            norm = 1.0
        return EmbeddingVector(
            values=tuple(v / norm for v in values), dimension=self.dimension
        )


class FileEmbedder:
    """Precomputed vectors keyed by exact text, from a JSONL file."""

    def __init__(self, path):
        self.path = str(path)
        self._vectors: dict[str, EmbeddingVector] = {}
        dimension = None
        try:
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        obj = json.loads(line)
                        text, vector = obj["text"], obj["vector"]
                    except (ValueError, LookupError, TypeError) as exc:
                        raise EmbeddingError(
                            f"{path}:{lineno}: malformed vectors line: {exc}"
                        ) from exc
                    if dimension is None:
                        dimension = len(vector)
                    elif len(vector) != dimension:
                        raise EmbeddingError(
                            f"{path}:{lineno}: dimension {len(vector)} != {dimension}"
                        )
                    self._vectors[text] = EmbeddingVector(
                        values=tuple(float(x) for x in vector), dimension=len(vector)
                    )
        except OSError as exc:
            raise EmbeddingError(f"cannot read vectors file {path}: {exc}") from exc
        if not self._vectors:
            raise EmbeddingError(f"{path}: vectors file is empty")

    @property
    def name(self) -> str:
        return f"file-embed:{self.path}"

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        _check_texts(texts)
        missing = [t for t in texts if t not in self._vectors]
        if missing:
            raise EmbeddingError(f"no precomputed vector for text: {missing[0]!r}")
        return [self._vectors[t] for t in texts]


def _check_texts(texts) -> None:
    if not texts:
        raise EmbeddingError("embed_batch called with no texts")
    if any(not t for t in texts):
        raise EmbeddingError("embed_batch called with an empty string")


def _check_uniform_dimension(vectors: list[EmbeddingVector]) -> None:
    dims = {v.dimension for v in vectors}
    if len(dims) > 1:
        raise EmbeddingError(f"mixed embedding dimensions in batch: {sorted(dims)}")


@dataclass
class ProviderBundle:
    """Everything the pipeline needs to talk to models."""

    generator: object
    judge: object
    embedder: object | None = None

    def names(self) -> dict:
        return {
            "generator": self.generator.name,
            "judge": self.judge.name,
            "embedder": self.embedder.name if self.embedder else None,
        }


def mock_bundle(
    seed: int = 0,
    persona: str = PERSONA_VARIED,
    judge_policy: str = JUDGE_LENIENT,
    embedder: bool = False,
) -> ProviderBundle:
    return ProviderBundle(
        generator=MockChatGenerator(seed=seed, persona=persona),
        judge=MockJudge(policy=judge_policy),
        embedder=HashEmbedder(seed=seed) if embedder else None,
    )
