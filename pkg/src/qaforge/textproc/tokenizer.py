"""Unicode-aware word tokenization and n-gram extraction.

Rules: split on whitespace; peel leading/trailing punctuation off each
chunk as separate tokens; keep hyphenated words whole; split common
English contractions so the suffix keeps its apostrophe ("what's" ->
"what", "'s"). N-gram counting lowercases; tagging uses the cased view.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass

# Longest first so "n't" wins over "'t".
_CONTRACTION_SUFFIXES = ("n't", "'ll", "'re", "'ve", "'s", "'d", "'m")


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]  # lowercased
    source: str


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_contractions(core: str) -> list[str]:
    lowered = core.lower().replace("’", "'")
    for suffix in _CONTRACTION_SUFFIXES:
        if lowered.endswith(suffix) and len(core) > len(suffix):
            cut = len(core) - len(suffix)
            return [core[:cut], core[cut:]]
    return [core]


def _split_chunk(chunk: str) -> list[str]:
    leading = []
    while chunk and _is_punct(chunk[0]):
        leading.append(chunk[0])
        chunk = chunk[1:]
    trailing = []
    while chunk and _is_punct(chunk[-1]):
        trailing.append(chunk[-1])
        chunk = chunk[:-1]
    trailing.reverse()
    core = _split_contractions(chunk) if chunk else []
    return leading + core + trailing


def cased_tokens(text: str) -> list[str]:
    """Tokenize preserving case (the tagger needs capitalization cues)."""
    out: list[str] = []
    for chunk in text.split():
        out.extend(_split_chunk(chunk))
    return out


def tokenize(text: str) -> TokenSequence:
    """Lowercased token view used by the lexical diversity metrics."""
    return TokenSequence(tokens=tuple(t.lower() for t in cased_tokens(text)), source=text)


def ngrams(seq: TokenSequence, n: int) -> Counter:
    """Multiset of all contiguous n-token windows within one sequence.

    Windows never cross sequence (question) boundaries; callers pool the
    per-question counters themselves.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tokens = seq.tokens
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
