"""Tokenization, n-grams, and part-of-speech tagging."""

from .tagging import (
    PTB_TAGSET,
    ExternalProcessTagger,
    PerceptronTagger,
    PosSequence,
    PosTemplate,
    get_default_tagger,
    pos_tag,
    template_of,
)
from .tokenizer import TokenSequence, cased_tokens, ngrams, tokenize

__all__ = [
    "PTB_TAGSET",
    "ExternalProcessTagger",
    "PerceptronTagger",
    "PosSequence",
    "PosTemplate",
    "TokenSequence",
    "cased_tokens",
    "get_default_tagger",
    "ngrams",
    "pos_tag",
    "template_of",
    "tokenize",
]
