#!/usr/bin/env python3
"""Train the built-in PoS tagger and ship its weights.

Run from the repo root with the package installed (pip install -e .):

    python tools/train_tagger.py [--train N] [--holdout N] [--seed S]

Writes src/qaforge/data/pos_tagger_weights.json.gz and the held-out
validation file tests/data/pos_validation.jsonl (one {"tokens": [...],
"tags": [...]} object per line), then prints the held-out accuracy.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "tools"))

from question_grammar import generate_tagged  # noqa: E402

from qaforge.textproc.tagging import PerceptronTagger  # noqa: E402

# Tags whose words are an open class: real inputs will contain words the
# grammar lexicon has never seen, so training data gets nonce variants
# that keep only the suffix and capitalization of the original word.
_OPEN_CLASSES = {"NN", "NNS", "NNP", "JJ", "VB", "VBZ", "VBP", "VBD", "VBN", "VBG", "RB"}
_CONSONANTS = "bcdfglmnprst"
_VOWELS = "aeiou"


def _nonce(word, rng):
    prefix = "".join(
        rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(rng.randrange(1, 3))
    )
    keep = min(4, max(3, len(word) - 2))
    stem = prefix + word[-keep:].lower()
    if word.isupper():
        return stem.upper()
    if word[:1].isupper():
        return stem.capitalize()
    return stem


def oov_augment(sentences, rng, rate=0.35):
    """Extra copies of sentences with open-class words turned into nonces."""
    augmented = []
    for tokens, tags in sentences:
        if rng.random() > 0.5:
            continue
        new_tokens = [
            _nonce(tok, rng)
            if tag in _OPEN_CLASSES and len(tok) >= 4 and tok.isalpha() and rng.random() < rate
            else tok
            for tok, tag in zip(tokens, tags)
        ]
        if new_tokens != tokens:
            augmented.append((new_tokens, tags))
    return augmented

SMOKE_SENTENCES = [
    (["What", "is", "the", "difference", "between", "X", "and", "Y"],
     ["WP", "VBZ", "DT", "NN", "IN"]),
    (["What", "are", "the", "main", "symptoms", "today"],
     ["WP", "VBP", "DT", "JJ", "NNS"]),
    (["What", "is", "an", "example", "of", "this", "?"],
     ["WP", "VBZ", "DT", "NN", "IN"]),
    (["Why", "?"], ["WRB", "."]),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--train", type=int, default=14000)
    parser.add_argument("--holdout", type=int, default=600)
    parser.add_argument("--iterations", type=int, default=6)
    parser.add_argument("--seed", type=int, default=20240901)
    args = parser.parse_args()

    import random

    train = generate_tagged(args.train, seed=args.seed)
    train += oov_augment(train, random.Random(args.seed + 2))
    holdout = generate_tagged(args.holdout, seed=args.seed + 1)

    tagger = PerceptronTagger()
    tagger.train(train, iterations=args.iterations, seed=args.seed)

    accuracy = tagger.evaluate(holdout)
    print(f"held-out token accuracy: {accuracy:.4f} over {args.holdout} sentences")

    for tokens, expected_prefix in SMOKE_SENTENCES:
        tags = tagger.tag(tokens)
        status = "ok " if tags[: len(expected_prefix)] == expected_prefix else "FAIL"
        print(f"  [{status}] {' '.join(tokens)!r} -> {' '.join(tags)}")

    weights_path = REPO_ROOT / "src" / "qaforge" / "data" / "pos_tagger_weights.json.gz"
    tagger.save(weights_path)
    print(f"wrote {weights_path} ({weights_path.stat().st_size} bytes)")

    validation_path = REPO_ROOT / "tests" / "data" / "pos_validation.jsonl"
    validation_path.parent.mkdir(parents=True, exist_ok=True)
    with open(validation_path, "w", encoding="utf-8") as fh:
        for tokens, tags in holdout:
            fh.write(json.dumps({"tokens": tokens, "tags": tags}) + "\n")
    print(f"wrote {validation_path} ({args.holdout} sentences)")

    return 0 if accuracy >= 0.90 else 1


if __name__ == "__main__":
    raise SystemExit(main())
