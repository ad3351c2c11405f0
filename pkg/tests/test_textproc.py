import gzip
import json
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaforge.errors import TagAlignmentError, TaggerError
from qaforge.textproc import (
    PTB_TAGSET,
    ExternalProcessTagger,
    PerceptronTagger,
    get_default_tagger,
    ngrams,
    pos_tag,
    template_of,
    tokenize,
)

DATA_DIR = Path(__file__).parent / "data"


class TestTokenize:
    def test_question_mark_split(self):
        assert tokenize("What is MERS?").tokens == ("what", "is", "mers", "?")

    def test_contraction_and_proper_noun(self):
        # hand-application of the rules: contraction splits, case folds,
        # trailing punctuation is its own token
        seq = tokenize("what's the weather like in Paris now?")
        assert seq.tokens == (
            "what", "'s", "the", "weather", "like", "in", "paris", "now", "?",
        )
        assert len(seq.tokens) == 9

    def test_empty_text(self):
        assert tokenize("").tokens == ()
        assert tokenize("   ").tokens == ()

    def test_hyphenated_words_stay_whole(self):
        assert tokenize("co-infections rise").tokens == ("co-infections", "rise")

    def test_negation_contraction(self):
        assert tokenize("don't stop").tokens == ("do", "n't", "stop")

    def test_leading_and_trailing_punctuation(self):
        assert tokenize('"hello," she said.').tokens == (
            '"', "hello", ",", '"', "she", "said", ".",
        )

    def test_source_is_preserved(self):
        assert tokenize("Hi there").source == "Hi there"


class TestNgrams:
    def test_bigrams(self):
        counter = ngrams(tokenize("a b c"), 2)
        assert counter == {("a", "b"): 1, ("b", "c"): 1}

    def test_window_longer_than_sequence(self):
        assert ngrams(tokenize("a b c"), 4) == {}

    def test_repeated_window_multiplicity(self):
        counter = ngrams(tokenize("a a a"), 2)
        assert counter == {("a", "a"): 2}
        assert len(counter) == 1

    def test_n_must_be_positive(self):
        with pytest.raises(ValueError):
            ngrams(tokenize("a b"), 0)

    @given(st.lists(st.sampled_from("abcde"), max_size=30), st.integers(1, 6))
    def test_total_count_identity(self, letters, n):
        seq = tokenize(" ".join(letters))
        counter = ngrams(seq, n)
        assert sum(counter.values()) == max(0, len(seq.tokens) - n + 1)


class TestBuiltinTagger:
    def test_difference_pattern(self):
        seq = pos_tag("What is the difference between X and Y")
        assert seq.tags[:5] == ("WP", "VBZ", "DT", "NN", "IN")

    def test_plural_pattern(self):
        seq = pos_tag("What are the main symptoms today")
        assert seq.tags[:5] == ("WP", "VBP", "DT", "JJ", "NNS")

    def test_example_pattern(self):
        seq = pos_tag("What is an example of this?")
        assert seq.tags[:5] == ("WP", "VBZ", "DT", "NN", "IN")

    def test_bare_why(self):
        seq = pos_tag("Why?")
        assert len(seq) == 2
        assert seq.tags == ("WRB", ".")

    def test_empty_text(self):
        assert pos_tag("").tags == ()

    def test_tags_are_ptb(self):
        seq = pos_tag("Can children get the new vaccine quickly?")
        assert all(tag in PTB_TAGSET for tag in seq.tags)

    @given(st.lists(st.text(alphabet="abcdeXY-19'", min_size=1, max_size=8), min_size=1, max_size=12))
    @settings(max_examples=50, deadline=None)
    def test_arity_matches_tokens(self, words):
        text = " ".join(words)
        seq = pos_tag(text)
        assert len(seq.tags) == len(seq.tokens)

    def test_validation_accuracy_bar(self):
        sentences = []
        with open(DATA_DIR / "pos_validation.jsonl", encoding="utf-8") as fh:
            for line in fh:
                obj = json.loads(line)
                sentences.append((obj["tokens"], obj["tags"]))
        assert len(sentences) >= 400
        accuracy = get_default_tagger().evaluate(sentences)
        assert accuracy >= 0.90

    def test_corrupted_weights_rejected(self, tmp_path):
        target = tmp_path / "weights.json.gz"
        tagger = get_default_tagger()
        tagger.save(target)
        envelope = json.loads(gzip.decompress(target.read_bytes()))
        envelope["tagdict"]["Why"] = "NN"
        target.write_bytes(gzip.compress(json.dumps(envelope).encode()))
        with pytest.raises(TaggerError, match="checksum"):
            PerceptronTagger.load(target)

    def test_save_load_round_trip(self, tmp_path):
        target = tmp_path / "weights.json.gz"
        tagger = get_default_tagger()
        tagger.save(target)
        reloaded = PerceptronTagger.load(target)
        text = "How many cases were reported in China?"
        assert reloaded.tag(text.split()) == tagger.tag(text.split())


class TestTemplateOf:
    def test_truncates_to_five(self):
        seq = pos_tag("What are the main symptoms of the new disease?")
        assert len(seq.tags) > 5
        assert template_of(seq).tags == seq.tags[:5]

    def test_short_question_keeps_all_tags(self):
        seq = pos_tag("Why not?")
        assert len(seq.tags) == 3
        assert template_of(seq).tags == seq.tags

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValueError):
            template_of(pos_tag(""))


EXTERNAL_UPPER = [
    sys.executable,
    "-c",
    (
        "import sys\n"
        "for line in sys.stdin:\n"
        "    toks = line.rstrip('\\n').split('\\t')\n"
        "    print('\\t'.join('NNP' if t[:1].isupper() else 'NN' for t in toks))\n"
    ),
]

EXTERNAL_DROPS_ONE = [
    sys.executable,
    "-c",
    (
        "import sys\n"
        "for line in sys.stdin:\n"
        "    toks = line.rstrip('\\n').split('\\t')\n"
        "    print('\\t'.join('NN' for t in toks[:-1]))\n"
    ),
]


class TestExternalTagger:
    def test_round_trip(self):
        tagger = ExternalProcessTagger(EXTERNAL_UPPER)
        assert tagger.tag(["Paris", "weather"]) == ["NNP", "NN"]

    def test_batch_is_line_aligned(self):
        tagger = ExternalProcessTagger(EXTERNAL_UPPER)
        out = tagger.tag_many([["a", "b"], ["C"]])
        assert out == [["NN", "NN"], ["NNP"]]

    def test_wrong_arity_raises(self):
        tagger = ExternalProcessTagger(EXTERNAL_DROPS_ONE)
        with pytest.raises(TagAlignmentError):
            tagger.tag(["one", "two", "three"])

    def test_usable_through_pos_tag(self):
        seq = pos_tag("Paris weather", tagger=ExternalProcessTagger(EXTERNAL_UPPER))
        assert seq.tags == ("NNP", "NN")

    def test_non_ptb_tag_rejected(self):
        bad = [sys.executable, "-c",
               "import sys\nfor line in sys.stdin:\n    print('\\t'.join('XX' for t in line.rstrip().split('\\t')))\n"]
        with pytest.raises(TaggerError, match="non-PTB"):
            ExternalProcessTagger(bad).tag(["hello"])
