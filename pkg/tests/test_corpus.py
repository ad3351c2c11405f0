import json
from collections import Counter

import pytest

from qaforge.corpus import Corpus, Document, corpus_digest, load_corpus, make_sampling_plan
from qaforge.errors import CorpusError, PlanError


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def small_corpus(n=5):
    return Corpus(
        documents=tuple(
            Document(id=f"d{i}", text=f"document {i} body") for i in range(n)
        )
    )


class TestLoadJsonl:
    def test_single_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id":"d1","text":"hello"}\n', encoding="utf-8")
        corpus = load_corpus(path)
        assert len(corpus) == 1
        assert corpus.documents[0].id == "d1"
        assert corpus.documents[0].text == "hello"

    def test_many_records(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": f"a{i}", "text": f"text {i}"} for i in range(147)])
        assert len(load_corpus(path)) == 147

    def test_duplicate_id_reports_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "x"}, {"id": "d1", "text": "y"}])
        with pytest.raises(CorpusError, match=":2: duplicate id 'd1'"):
            load_corpus(path)

    def test_missing_text_reports_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "x"}, {"id": "d2"}])
        with pytest.raises(CorpusError, match=":2: missing 'text'"):
            load_corpus(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(CorpusError, match="no documents"):
            load_corpus(path)

    def test_missing_path_rejected(self, tmp_path):
        with pytest.raises(CorpusError, match="does not exist"):
            load_corpus(tmp_path / "nope.jsonl")

    def test_metadata_kept(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "x", "metadata": {"source": "unit"}}])
        assert load_corpus(path).documents[0].metadata == {"source": "unit"}

    def test_non_string_metadata_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "x", "metadata": {"n": 3}}])
        with pytest.raises(CorpusError, match="metadata"):
            load_corpus(path)

    def test_long_document_truncated_at_whitespace(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        text = "word " * 200
        write_jsonl(path, [{"id": "d1", "text": text}])
        corpus = load_corpus(path, max_chars=53)
        doc = corpus.documents[0]
        assert doc.truncated
        assert len(doc.text) <= 53
        assert not doc.text.endswith(" ")
        assert doc.text.split() == ["word"] * len(doc.text.split())


class TestLoadPlainDir:
    def test_ids_are_relative_paths(self, tmp_path):
        (tmp_path / "sub").mkdir()
        (tmp_path / "a.txt").write_text("alpha body", encoding="utf-8")
        (tmp_path / "sub" / "b.txt").write_text("beta body", encoding="utf-8")
        corpus = load_corpus(tmp_path, format="plain_dir")
        assert corpus.ids() == ["a.txt", "sub/b.txt"]

    def test_empty_file_rejected(self, tmp_path):
        (tmp_path / "a.txt").write_text("   ", encoding="utf-8")
        with pytest.raises(CorpusError, match="empty"):
            load_corpus(tmp_path, format="plain_dir")


class TestSamplingPlan:
    def test_uniform_zero_total_rejected(self):
        with pytest.raises(PlanError):
            make_sampling_plan(small_corpus(), seed=1, total=0)

    def test_uniform_draws_with_replacement(self):
        corpus = small_corpus(3)
        plan = make_sampling_plan(corpus, seed=9, total=50)
        assert len(plan) == 50
        assert set(plan) <= set(corpus.ids())

    def test_per_document_counts_exact(self):
        corpus = small_corpus(4)
        counts = {"d0": 2, "d1": 0, "d2": 5, "d3": 1}
        plan = make_sampling_plan(corpus, seed=3, counts=counts)
        assert len(plan) == 8
        assert Counter(plan) == {"d0": 2, "d2": 5, "d3": 1}

    def test_single_document_many_repetitions(self):
        corpus = small_corpus(1)
        plan = make_sampling_plan(corpus, seed=0, counts={"d0": 125})
        assert plan == ["d0"] * 125

    def test_one_question_per_passage(self):
        corpus = Corpus(
            documents=tuple(Document(id=f"p{i}", text="body") for i in range(2682))
        )
        plan = make_sampling_plan(corpus, seed=4, counts={d: 1 for d in corpus.ids()})
        assert len(plan) == 2682
        assert Counter(plan) == {d: 1 for d in corpus.ids()}

    def test_unknown_id_rejected(self):
        with pytest.raises(PlanError, match="unknown document id 'zz'"):
            make_sampling_plan(small_corpus(), seed=1, counts={"zz": 1})

    def test_negative_count_rejected(self):
        with pytest.raises(PlanError, match="negative"):
            make_sampling_plan(small_corpus(), seed=1, counts={"d0": -1})

    def test_zero_sum_rejected(self):
        with pytest.raises(PlanError, match="sum to zero"):
            make_sampling_plan(small_corpus(), seed=1, counts={"d0": 0})

    def test_exactly_one_mode(self):
        with pytest.raises(PlanError):
            make_sampling_plan(small_corpus(), seed=1)
        with pytest.raises(PlanError):
            make_sampling_plan(small_corpus(), seed=1, total=3, counts={"d0": 1})

    def test_reproducible(self):
        corpus = small_corpus(6)
        counts = {d: 3 for d in corpus.ids()}
        first = make_sampling_plan(corpus, seed=42, counts=counts)
        second = make_sampling_plan(corpus, seed=42, counts=counts)
        assert first == second
        assert make_sampling_plan(corpus, seed=43, counts=counts) != first
        assert make_sampling_plan(corpus, seed=42, total=30) == make_sampling_plan(
            corpus, seed=42, total=30
        )


class TestDigest:
    def test_digest_sensitive_to_text(self):
        a = Corpus(documents=(Document(id="d", text="one"),))
        b = Corpus(documents=(Document(id="d", text="two"),))
        assert corpus_digest(a) != corpus_digest(b)
        assert corpus_digest(a) == corpus_digest(
            Corpus(documents=(Document(id="d", text="one"),))
        )
