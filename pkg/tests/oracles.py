"""Brute-force reference implementations the fast metrics are checked against.

These deliberately share nothing with the production code paths beyond
the tokenizer (which defines the metric operand): counting is plain
dicts and explicit loops, self-repetition is a quadratic window scan,
and homogenization is the literal double loop over ordered pairs.
"""

from __future__ import annotations

import math

from qaforge.textproc.tokenizer import tokenize


def _windows(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def brute_ngd(questions) -> float:
    score = 0.0
    for n in range(1, 5):
        counts: dict[tuple, int] = {}
        for q in questions:
            for gram in _windows(tokenize(q).tokens, n):
                counts[gram] = counts.get(gram, 0) + 1
        total = 0
        for value in counts.values():
            total += value
        if total > 0:
            score += len(counts) / total
    return score


def brute_srs(questions) -> float:
    if len(questions) < 2:
        return 0.0
    token_lists = [tokenize(q).tokens for q in questions]
    gram_lists = [_windows(tokens, 4) for tokens in token_lists]
    gram_sets = [set(grams) for grams in gram_lists]
    flagged = 0
    for i, grams in enumerate(gram_lists):
        hit = False
        for j, other in enumerate(gram_sets):
            if i == j:
                continue
            for gram in grams:
                if gram in other:
                    hit = True
                    break
            if hit:
                break
        flagged += hit
    return flagged / len(questions)


def brute_homogenization(vectors) -> float:
    n = len(vectors)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            total += _cosine(vectors[i], vectors[j])
    return total / (n * (n - 1))


def _cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    return dot / (na * nb)
