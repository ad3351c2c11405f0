"""Part-of-speech tagging for the syntactic diversity metrics.

Two backends:

* a built-in greedy averaged-perceptron tagger whose weights ship with
  the package as a gzipped, checksummed data file (see tools/train_tagger.py
  for how they are produced), and
* an external tagger subprocess that reads tab-separated tokens on stdin,
  one sentence per line, and writes tab-separated tags on stdout.

Both emit Penn Treebank tags. A question's "syntactic template" is the
first five tags of its sequence (fewer for shorter questions).
"""

from __future__ import annotations

import gzip
import hashlib
import json
import random
import subprocess
from collections import Counter, defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import TagAlignmentError, TaggerError
from .tokenizer import cased_tokens

PTB_TAGSET = frozenset(
    """
    CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$
    RB RBR RBS RP SYM TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB
    """.split()
) | frozenset([".", ",", ":", "``", "''", "(", ")", "$", "#", "-LRB-", "-RRB-"])

TEMPLATE_LENGTH = 5

WEIGHTS_RESOURCE = "pos_tagger_weights.json.gz"

_START = ("-START-", "-START2-")
_END = ("-END-", "-END2-")


@dataclass(frozen=True)
class PosSequence:
    tags: tuple[str, ...]
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tags)


@dataclass(frozen=True, order=True)
class PosTemplate:
    tags: tuple[str, ...]

    def __str__(self) -> str:
        return " ".join(self.tags)


def template_of(seq: PosSequence) -> PosTemplate:
    """First five tags (all of them for shorter questions, never padded)."""
    if not seq.tags:
        raise ValueError("cannot take the template of an empty tag sequence")
    return PosTemplate(tags=seq.tags[:TEMPLATE_LENGTH])


def _normalize(word: str) -> str:
    if "-" in word[1:]:
        return "!HYPHEN"
    if word.isdigit() and len(word) == 4:
        return "!YEAR"
    if word[:1].isdigit():
        return "!DIGITS"
    return word.lower()


class _AveragedWeights:
    """Sparse perceptron weights with lazy averaging over update steps."""

    def __init__(self):
        self.weights: dict[str, dict[str, float]] = {}
        self.classes: set[str] = set()
        self._totals: dict[tuple[str, str], float] = defaultdict(float)
        self._stamps: dict[tuple[str, str], int] = defaultdict(int)
        self.step = 0

    def score(self, features) -> str:
        scores: dict[str, float] = defaultdict(float)
        for feat in features:
            feat_weights = self.weights.get(feat)
            if not feat_weights:
                continue
            for label, weight in feat_weights.items():
                scores[label] += weight
        return max(self.classes, key=lambda label: (scores[label], label))

    def update(self, truth: str, guess: str, features) -> None:
        self.step += 1
        if truth == guess:
            return
        for feat in features:
            feat_weights = self.weights.setdefault(feat, {})
            for label, delta in ((truth, 1.0), (guess, -1.0)):
                key = (feat, label)
                current = feat_weights.get(label, 0.0)
                self._totals[key] += (self.step - self._stamps[key]) * current
                self._stamps[key] = self.step
                feat_weights[label] = current + delta

    def average(self) -> None:
        for feat, feat_weights in self.weights.items():
            for label, weight in list(feat_weights.items()):
                key = (feat, label)
                total = self._totals[key] + (self.step - self._stamps[key]) * weight
                averaged = round(total / self.step, 6)
                if averaged:
                    feat_weights[label] = averaged
                else:
                    del feat_weights[label]
        self._totals.clear()
        self._stamps.clear()


class PerceptronTagger:
    """Greedy left-to-right averaged perceptron over PTB tags."""

    def __init__(self):
        self.model = _AveragedWeights()
        self.tagdict: dict[str, str] = {}

    # -- inference ----------------------------------------------------

    def tag(self, tokens: list[str]) -> list[str]:
        prev, prev2 = _START
        context = (
            list(_START)
            + [_normalize(t) for t in tokens]
            + list(_END)
        )
        tags = []
        for i, token in enumerate(tokens):
            tag = self.tagdict.get(token)
            if tag is None:
                features = self._features(i, token, context, prev, prev2)
                tag = self.model.score(features)
            tags.append(tag)
            prev2, prev = prev, tag
        return tags

    def tag_many(self, sentences: list[list[str]]) -> list[list[str]]:
        return [self.tag(tokens) for tokens in sentences]

    @staticmethod
    def _features(i, word, context, prev, prev2) -> list[str]:
        j = i + len(_START)
        lowered = word.lower()
        feats = [
            "b",
            f"s2|{lowered[-2:]}",
            f"s3|{lowered[-3:]}",
            f"s4|{lowered[-4:]}",
            f"p1|{lowered[:1]}",
            f"t-1|{prev}",
            f"t-2|{prev2}",
            f"t-1,t-2|{prev}|{prev2}",
            f"w|{context[j]}",
            f"t-1,w|{prev}|{context[j]}",
            f"w-1|{context[j - 1]}",
            f"s-1|{context[j - 1][-3:]}",
            f"w-2|{context[j - 2]}",
            f"w+1|{context[j + 1]}",
            f"s+1|{context[j + 1][-3:]}",
            f"w+2|{context[j + 2]}",
        ]
        if word.istitle():
            feats.append("title")
        if word.isupper() and len(word) > 1:
            feats.append("upper")
        if any(c.isdigit() for c in word):
            feats.append("digit")
        if "-" in word[1:]:
            feats.append("hyphen")
            if word[:1].isupper():
                feats.append("hyphen-cap")
        if i == 0:
            feats.append("first")
        return feats

    # -- training (used offline by tools/train_tagger.py) --------------

    def train(self, sentences, iterations: int = 5, seed: int = 0) -> None:
        """Train on (tokens, tags) pairs; gold tags must be PTB tags.

        The tagdict is built for inference, but training always predicts
        and updates, so the suffix/shape features learn from easy words
        too; that is what carries unknown words at inference time.
        """
        self._build_tagdict(sentences)
        self.model.classes = {tag for _, tags in sentences for tag in tags}
        rng = random.Random(seed)
        data = list(sentences)
        for _ in range(iterations):
            rng.shuffle(data)
            for tokens, gold in data:
                prev, prev2 = _START
                context = list(_START) + [_normalize(t) for t in tokens] + list(_END)
                for i, token in enumerate(tokens):
                    features = self._features(i, token, context, prev, prev2)
                    guess = self.model.score(features)
                    self.model.update(gold[i], guess, features)
                    prev2, prev = prev, guess
        self.model.average()

    def _build_tagdict(self, sentences, min_freq: int = 20, ambiguity: float = 0.99) -> None:
        counts: dict[str, Counter] = defaultdict(Counter)
        for tokens, tags in sentences:
            for token, tag in zip(tokens, tags):
                counts[token][tag] += 1
        self.tagdict = {}
        for token, tag_counts in counts.items():
            tag, mode = tag_counts.most_common(1)[0]
            total = sum(tag_counts.values())
            if total >= min_freq and mode / total >= ambiguity:
                self.tagdict[token] = tag

    def evaluate(self, sentences) -> float:
        """Token accuracy against gold (tokens, tags) pairs."""
        correct = total = 0
        for tokens, gold in sentences:
            for predicted, expected in zip(self.tag(tokens), gold):
                correct += predicted == expected
                total += 1
        return correct / total if total else 0.0

    # -- persistence ----------------------------------------------------

    def save(self, path) -> None:
        payload = {
            "classes": sorted(self.model.classes),
            "tagdict": self.tagdict,
            "weights": self.model.weights,
        }
        envelope = {
            "format_version": 1,
            "checksum": _payload_checksum(payload),
            **payload,
        }
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            json.dump(envelope, fh, separators=(",", ":"), sort_keys=True)

    @classmethod
    def load(cls, path) -> "PerceptronTagger":
        try:
            with gzip.open(path, "rt", encoding="utf-8") as fh:
                envelope = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise TaggerError(f"cannot read tagger weights from {path}: {exc}") from exc
        if envelope.get("format_version") != 1:
            raise TaggerError(f"unsupported tagger weights version in {path}")
        payload = {key: envelope[key] for key in ("classes", "tagdict", "weights")}
        if _payload_checksum(payload) != envelope.get("checksum"):
            raise TaggerError(f"tagger weights checksum mismatch in {path}")
        tagger = cls()
        tagger.model.classes = set(payload["classes"])
        tagger.model.weights = payload["weights"]
        tagger.tagdict = payload["tagdict"]
        return tagger


def _payload_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ExternalProcessTagger:
    """Adapter for a tagger subprocess.

    Protocol: one sentence per line on stdin, tokens tab-separated; the
    process writes one line of tab-separated PTB tags per sentence.
    """

    def __init__(self, command: list[str]):
        if not command:
            raise TaggerError("external tagger command is empty")
        self.command = list(command)

    def tag(self, tokens: list[str]) -> list[str]:
        return self.tag_many([tokens])[0]

    def tag_many(self, sentences: list[list[str]]) -> list[list[str]]:
        if not sentences:
            return []
        payload = "\n".join("\t".join(tokens) for tokens in sentences) + "\n"
        try:
            proc = subprocess.run(
                self.command,
                input=payload,
                capture_output=True,
                text=True,
                check=False,
            )
        except OSError as exc:
            raise TaggerError(f"cannot run external tagger {self.command[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            raise TaggerError(
                f"external tagger exited with {proc.returncode}: {proc.stderr.strip()[:200]}"
            )
        lines = proc.stdout.splitlines()
        if len(lines) != len(sentences):
            raise TagAlignmentError(
                f"external tagger returned {len(lines)} lines for {len(sentences)} sentences"
            )
        out = []
        for tokens, line in zip(sentences, lines):
            tags = line.split("\t") if line else []
            if len(tags) != len(tokens):
                raise TagAlignmentError(
                    f"external tagger returned {len(tags)} tags for {len(tokens)} tokens"
                )
            for tag in tags:
                if tag not in PTB_TAGSET:
                    raise TaggerError(f"external tagger emitted non-PTB tag {tag!r}")
            out.append(tags)
        return out


_default_tagger: PerceptronTagger | None = None


def get_default_tagger() -> PerceptronTagger:
    """The built-in tagger, loaded once from the bundled weights file."""
    global _default_tagger
    if _default_tagger is None:
        with resources.as_file(
            resources.files("qaforge.data").joinpath(WEIGHTS_RESOURCE)
        ) as path:
            _default_tagger = PerceptronTagger.load(Path(path))
    return _default_tagger


def pos_tag(text: str, tagger=None) -> PosSequence:
    """Tag one question; empty text yields an empty sequence."""
    tokens = cased_tokens(text)
    if not tokens:
        return PosSequence(tags=(), tokens=())
    if tagger is None:
        tagger = get_default_tagger()
    tags = tagger.tag(tokens)
    return PosSequence(tags=tuple(tags), tokens=tuple(tokens))
