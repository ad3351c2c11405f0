import json
import math
import threading
import time

import httpx
import pytest

from qaforge.errors import EmbeddingError, ProviderError, ProviderTimeoutError
from qaforge.providers import (
    ChatRequest,
    EmbeddingVector,
    FileEmbedder,
    HashEmbedder,
    HttpChatProvider,
    HttpEmbedder,
    MockChatGenerator,
    MockJudge,
    PERSONA_TEMPLATED,
    PERSONA_VARIED,
)

GEN_PROMPT = (
    "You are a user simulator that should generate 3 candidate questions for "
    "starting a conversation.\n\n"
    "### The generated questions should be about facts from the following document:\n"
    "Coronavirus transmission peaked during winter outbreaks in hospitals.\n"
)


class TestMockGenerator:
    def test_deterministic_across_instances(self):
        req = ChatRequest(prompt=GEN_PROMPT, seed=5)
        first = MockChatGenerator(seed=1).complete(req).text
        second = MockChatGenerator(seed=1).complete(req).text
        assert first == second

    def test_request_seed_changes_output(self):
        gen = MockChatGenerator(seed=1)
        a = gen.complete(ChatRequest(prompt=GEN_PROMPT, seed=1)).text
        b = gen.complete(ChatRequest(prompt=GEN_PROMPT, seed=2)).text
        assert a != b

    def test_templated_persona_shape(self):
        gen = MockChatGenerator(seed=3, persona=PERSONA_TEMPLATED)
        lines = gen.complete(ChatRequest(prompt=GEN_PROMPT)).text.splitlines()
        assert len(lines) == 3
        for line in lines:
            obj = json.loads(line)
            assert obj["question"].startswith("What are the main ")

    def test_varied_persona_emits_parseable_lines(self):
        gen = MockChatGenerator(seed=3, persona=PERSONA_VARIED)
        lines = gen.complete(ChatRequest(prompt=GEN_PROMPT)).text.splitlines()
        assert len(lines) == 3
        for line in lines:
            obj = json.loads(line)
            assert obj["question"] and obj["answer"]

    def test_respects_requested_count(self):
        prompt = GEN_PROMPT.replace("generate 3", "generate 5")
        gen = MockChatGenerator(seed=0)
        assert len(gen.complete(ChatRequest(prompt=prompt)).text.splitlines()) == 5

    def test_search_query_style_follows_prompt(self):
        prompt = GEN_PROMPT + (
            "\n### Each of the generated questions must have the following "
            "characteristics:\n    - It must be phrased as a typed web query for "
            "search engines (only keywords, without punctuation and without a "
            "natural-sounding structure). It consists of less than 7 words.\n"
        )
        gen = MockChatGenerator(seed=2)
        for line in gen.complete(ChatRequest(prompt=prompt, seed=9)).text.splitlines():
            question = json.loads(line)["question"]
            assert "?" not in question
            assert 3 <= len(question.split()) <= 5


JUDGE_PROMPT_TEMPLATE = (
    "judge request with fields [fields]\n\n"
    "### Candidate question:\n{question}\n\n"
    "### Candidate answer:\n{answer}\n\n"
    "### Source document:\nsome document text\n"
)


def judge_prompt(question, answer, with_category=True):
    fields = (
        '"context_free", "category_adherent", "faithful"'
        if with_category
        else '"context_free", "faithful"'
    )
    return JUDGE_PROMPT_TEMPLATE.replace("[fields]", fields).format(
        question=question, answer=answer
    )


class TestMockJudge:
    def test_lenient_passes_everything(self):
        raw = MockJudge("lenient").complete(
            ChatRequest(prompt=judge_prompt("Why?", "Because."))
        ).text
        assert json.loads(raw) == {
            "context_free": True,
            "faithful": True,
            "category_adherent": True,
        }

    def test_lenient_answers_only_asked_fields(self):
        raw = MockJudge("lenient").complete(
            ChatRequest(prompt=judge_prompt("Why?", "Because.", with_category=False))
        ).text
        assert json.loads(raw) == {"context_free": True, "faithful": True}

    def test_strict_flags_document_reference(self):
        raw = MockJudge("strict").complete(
            ChatRequest(
                prompt=judge_prompt("As the document states, what is X?", "X is Y.")
            )
        ).text
        assert json.loads(raw)["context_free"] is False

    def test_strict_passes_clean_question(self):
        raw = MockJudge("strict").complete(
            ChatRequest(prompt=judge_prompt("What is X?", "X is Y."))
        ).text
        verdict = json.loads(raw)
        assert verdict["context_free"] is True
        assert verdict["faithful"] is True

    def test_garbled_policy_is_unparseable(self):
        raw = MockJudge("garbled").complete(ChatRequest(prompt="anything")).text
        with pytest.raises(json.JSONDecodeError):
            json.loads(raw)


def chat_response(text="hello", usage=True):
    body = {"choices": [{"message": {"role": "assistant", "content": text}}]}
    if usage:
        body["usage"] = {"prompt_tokens": 7, "completion_tokens": 2}
    return body


class TestHttpChatProvider:
    def test_parses_openai_shape(self):
        def handler(request):
            payload = json.loads(request.content)
            assert payload["messages"][0]["content"] == "ping"
            assert payload["temperature"] == 1.0
            assert payload["max_tokens"] == 1024
            return httpx.Response(200, json=chat_response("pong"))

        provider = HttpChatProvider(
            "https://api.test/v1", model="m1", api_key="k",
            transport=httpx.MockTransport(handler),
        )
        result = provider.complete(ChatRequest(prompt="ping"))
        assert result.text == "pong"
        assert provider.stats.calls == 1
        assert provider.stats.prompt_tokens == 7

    def test_seed_forwarded(self):
        seen = {}

        def handler(request):
            seen.update(json.loads(request.content))
            return httpx.Response(200, json=chat_response())

        provider = HttpChatProvider(
            "https://api.test/v1", model="m", transport=httpx.MockTransport(handler)
        )
        provider.complete(ChatRequest(prompt="x", seed=99))
        assert seen["seed"] == 99

    def test_retries_transient_then_succeeds(self):
        attempts = []
        sleeps = []

        def handler(request):
            attempts.append(1)
            if len(attempts) < 3:
                return httpx.Response(503, text="busy")
            return httpx.Response(200, json=chat_response("done"))

        provider = HttpChatProvider(
            "https://api.test/v1", model="m", retries=3, backoff_base_s=0.5,
            transport=httpx.MockTransport(handler), sleeper=sleeps.append,
        )
        assert provider.complete(ChatRequest(prompt="x")).text == "done"
        assert len(attempts) == 3
        assert sleeps == [0.5, 1.0]

    def test_unreachable_endpoint_times_out_after_retries(self):
        def handler(request):
            raise httpx.ConnectError("unreachable")

        provider = HttpChatProvider(
            "https://api.test/v1", model="m", retries=2,
            transport=httpx.MockTransport(handler), sleeper=lambda s: None,
        )
        with pytest.raises(ProviderTimeoutError, match="3 attempts"):
            provider.complete(ChatRequest(prompt="x"))

    def test_non_retryable_status_raises_with_body(self):
        def handler(request):
            return httpx.Response(401, text="bad key")

        provider = HttpChatProvider(
            "https://api.test/v1", model="m",
            transport=httpx.MockTransport(handler),
        )
        with pytest.raises(ProviderError) as excinfo:
            provider.complete(ChatRequest(prompt="x"))
        assert excinfo.value.status == 401
        assert "bad key" in excinfo.value.body_excerpt

    def test_malformed_response_rejected(self):
        def handler(request):
            return httpx.Response(200, json={"nope": True})

        provider = HttpChatProvider(
            "https://api.test/v1", model="m",
            transport=httpx.MockTransport(handler),
        )
        with pytest.raises(ProviderError, match="malformed"):
            provider.complete(ChatRequest(prompt="x"))

    def test_concurrent_requests_respect_permit_limit(self):
        active = 0
        peak = 0
        lock = threading.Lock()

        def handler(request):
            nonlocal active, peak
            with lock:
                active += 1
                peak = max(peak, active)
            time.sleep(0.02)
            with lock:
                active -= 1
            return httpx.Response(200, json=chat_response())

        provider = HttpChatProvider(
            "https://api.test/v1", model="m", max_concurrency=2,
            transport=httpx.MockTransport(handler),
        )
        threads = [
            threading.Thread(
                target=lambda: provider.complete(ChatRequest(prompt="x"))
            )
            for _ in range(8)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert peak <= 2


class TestEmbeddingVector:
    def test_dimension_mismatch_rejected(self):
        with pytest.raises(EmbeddingError):
            EmbeddingVector(values=(1.0, 2.0), dimension=3)

    def test_non_finite_rejected(self):
        with pytest.raises(EmbeddingError):
            EmbeddingVector(values=(1.0, float("nan")), dimension=2)


class TestHashEmbedder:
    def test_identical_strings_identical_vectors(self):
        embedder = HashEmbedder()
        a, b = embedder.embed_batch(["same text", "same text"])
        assert a == b

    def test_unit_norm(self):
        embedder = HashEmbedder()
        for vector in embedder.embed_batch(["one", "two words", "three word text"]):
            norm = math.sqrt(sum(v * v for v in vector.values))
            assert abs(norm - 1.0) <= 1e-9

    def test_seed_changes_vectors(self):
        same = HashEmbedder(seed=1).embed_batch(["hello"])[0]
        other = HashEmbedder(seed=2).embed_batch(["hello"])[0]
        assert same != other

    def test_empty_input_rejected(self):
        with pytest.raises(EmbeddingError):
            HashEmbedder().embed_batch([])
        with pytest.raises(EmbeddingError):
            HashEmbedder().embed_batch([""])


class TestFileEmbedder:
    def make_file(self, tmp_path, rows):
        path = tmp_path / "vectors.jsonl"
        path.write_text(
            "".join(json.dumps(row) + "\n" for row in rows), encoding="utf-8"
        )
        return path

    def test_round_trip_in_query_order(self, tmp_path):
        rows = [
            {"text": "q one", "vector": [1.0, 0.0]},
            {"text": "q two", "vector": [0.0, 1.0]},
            {"text": "q three", "vector": [0.6, 0.8]},
        ]
        path = self.make_file(tmp_path, rows)
        embedder = FileEmbedder(path)
        out = embedder.embed_batch(["q three", "q one", "q two"])
        assert [v.values for v in out] == [(0.6, 0.8), (1.0, 0.0), (0.0, 1.0)]

    def test_missing_text_lists_first_missing(self, tmp_path):
        path = self.make_file(tmp_path, [{"text": "known", "vector": [1.0]}])
        with pytest.raises(EmbeddingError, match="'absent one'"):
            FileEmbedder(path).embed_batch(["known", "absent one", "absent two"])

    def test_dimension_mismatch_rejected_at_load(self, tmp_path):
        path = self.make_file(
            tmp_path,
            [{"text": "a", "vector": [1.0, 0.0]}, {"text": "b", "vector": [1.0]}],
        )
        with pytest.raises(EmbeddingError, match="dimension"):
            FileEmbedder(path)


class TestHttpEmbedder:
    def test_batching_and_order(self):
        calls = []

        def handler(request):
            payload = json.loads(request.content)
            calls.append(len(payload["input"]))
            data = [
                {"index": i, "embedding": [float(len(text)), 1.0]}
                for i, text in enumerate(payload["input"])
            ]
            return httpx.Response(200, json={"data": data})

        embedder = HttpEmbedder(
            "https://api.test/v1", model="e", batch_size=2,
            transport=httpx.MockTransport(handler),
        )
        out = embedder.embed_batch(["a", "bb", "ccc"])
        assert calls == [2, 1]
        assert [v.values[0] for v in out] == [1.0, 2.0, 3.0]
