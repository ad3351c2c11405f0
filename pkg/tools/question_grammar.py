"""Deterministic English question grammar with gold PTB tags.

Generates tokenized sentences whose tags are correct by construction:
every slot in a template is tied to one tag, and every lexicon word is
listed only under tags it genuinely carries in that position. The mix is
weighted toward the question styles the tagger will actually see (wh-
questions, polar questions, search-style keyword queries, premise
openers), with some declaratives for context balance.

Used by train_tagger.py to build the shipped weights and the held-out
validation file.
"""

from __future__ import annotations

import random

LEXICON = {
    "WP": ["What", "Who"],
    "WRB": ["How", "When", "Where", "Why"],
    "WDT": ["Which"],
    "MD": ["can", "could", "should", "will", "would", "may", "might", "must"],
    "DT": ["the", "a", "this", "that", "these", "those", "some", "any", "each", "no"],
    "VBZ_LEX": [
        "causes", "affects", "works", "spreads", "helps", "occurs", "remains",
        "differs", "makes", "happens", "protects", "reduces", "increases",
        "shows", "means", "takes", "lasts", "kills", "infects", "starts",
    ],
    "VBP_LEX": [
        "cause", "affect", "work", "spread", "help", "occur", "remain",
        "differ", "make", "happen", "protect", "reduce", "increase", "show",
        "mean", "take", "last", "infect", "know", "need", "use", "get",
        "recommend", "develop",
    ],
    "VBD_LEX": [
        "caused", "started", "began", "happened", "emerged", "appeared",
        "occurred", "led", "found", "reported", "showed", "became", "ended",
        "killed", "discovered", "identified", "introduced", "studied",
    ],
    "VBN": [
        "caused", "known", "used", "found", "reported", "linked", "associated",
        "transmitted", "discovered", "approved", "developed", "confirmed",
        "identified", "compared", "related", "infected", "tested", "treated",
        "vaccinated", "observed", "described", "studied", "detected",
        "diagnosed", "managed", "prevented", "spread",
    ],
    "VBG": [
        "causing", "treating", "using", "spreading", "testing", "comparing",
        "developing", "increasing", "wearing", "taking", "getting", "managing",
        "tracking", "preventing",
    ],
    "VB": [
        "be", "cause", "affect", "treat", "prevent", "spread", "compare",
        "reduce", "happen", "get", "take", "know", "help", "avoid", "expect",
        "make", "improve", "protect", "stop", "start", "catch", "develop",
        "occur", "differ", "work", "last", "visit", "apply", "begin",
        "originate", "recover", "do", "mean", "spot", "manage",
    ],
    "JJ": [
        "main", "common", "typical", "severe", "new", "early", "different",
        "specific", "current", "major", "primary", "clinical", "safe",
        "effective", "possible", "important", "recent", "global", "human",
        "viral", "seasonal", "average", "serious", "mild", "high", "low",
        "normal", "rapid", "standard", "tropical", "medical", "respiratory",
        "infectious", "airborne", "protective", "elderly", "young", "healthy",
        "sick", "dangerous", "deadly", "likely", "useful", "reliable",
        "first", "natural", "long", "short",
    ],
    "JJR": ["better", "worse", "higher", "lower", "faster", "larger", "smaller", "safer", "stronger", "easier"],
    "JJS": ["best", "worst", "highest", "lowest", "safest", "largest"],
    "NN": [
        "virus", "vaccine", "disease", "infection", "treatment", "symptom",
        "outbreak", "risk", "rate", "transmission", "mortality", "study",
        "patient", "doctor", "researcher", "protein", "cell", "drug", "fever",
        "cough", "immunity", "pandemic", "difference", "structure", "example",
        "cause", "effect", "impact", "role", "number", "percentage", "period",
        "incubation", "diagnosis", "therapy", "dose", "strain", "sample",
        "test", "result", "evidence", "mechanism", "response", "system",
        "population", "region", "country", "hospital", "death", "recovery",
        "mask", "quarantine", "spread", "care", "health", "weather", "time",
        "year", "way", "area", "water", "surface", "contact", "exposure",
        "protection", "medicine", "flu", "person", "body", "blood", "lung",
        "hand", "air", "food", "travel", "winter", "summer", "home", "work",
        "school", "city", "world", "information", "research", "antibody",
        "screening", "distancing", "variant", "booster", "today", "question",
        "answer", "source", "origin", "comparison", "definition", "history",
    ],
    "NNS": [
        "viruses", "vaccines", "diseases", "infections", "treatments",
        "symptoms", "outbreaks", "risks", "rates", "studies", "patients",
        "doctors", "researchers", "proteins", "cells", "drugs", "antibodies",
        "measures", "guidelines", "complications", "factors", "effects",
        "differences", "examples", "cases", "deaths", "masks", "tests",
        "results", "regions", "countries", "hospitals", "children", "adults",
        "people", "ways", "years", "questions", "answers", "signs", "types",
        "stages", "doses", "strains", "samples", "experts", "workers",
        "animals", "humans", "bats", "birds", "hands", "surfaces", "droplets",
        "precautions", "restrictions", "benefits", "challenges", "options",
        "methods", "approaches", "steps", "weeks", "days", "months", "variants",
    ],
    "NNP": [
        "COVID-19", "SARS", "MERS", "Ebola", "Zika", "Wuhan", "China", "Italy",
        "France", "Paris", "Europe", "Asia", "America", "WHO", "CDC",
        "December", "January", "March", "August", "H1N1", "HIV", "London",
        "Africa", "India", "Brazil", "Germany", "Spain", "Napoleon",
        "SARS-CoV-2", "MERS-CoV", "H5N1", "Delta", "Omicron",
    ],
    "IN": [
        "of", "in", "on", "for", "with", "from", "between", "during", "after",
        "before", "about", "against", "by", "at", "through", "among", "within",
        "without", "than",
    ],
    "CC": ["and", "or", "but"],
    "PRP": ["I", "you", "it", "they", "we"],
    "PRP$": ["my", "your", "its", "their", "our"],
    "RB": [
        "not", "also", "often", "usually", "typically", "quickly", "recently",
        "currently", "mostly", "now", "still", "already", "directly", "really",
        "again", "soon", "first", "worldwide", "exactly",
    ],
    "CD": ["1918", "2003", "2019", "2020", "147", "50", "25", "10", "100",
           "two", "three", "five", "seven", "2889", "125"],
}

_VOWELS = "aeiouAEIOU"


def _lex(rng, key):
    return rng.choice(LEXICON[key])


def _article(noun_tokens, rng):
    """Pick a determiner, fixing a/an against the following word."""
    det = rng.choice(["the", "the", "a", "this", "that"])
    if det == "a" and noun_tokens[0][0] in _VOWELS:
        det = "an"
    return det


def np_singular(rng):
    """(tokens, tags) for a singular noun phrase."""
    form = rng.randrange(6)
    if form == 0:
        noun = _lex(rng, "NN")
        return [_article([noun], rng), noun], ["DT", "NN"]
    if form == 1:
        adj, noun = _lex(rng, "JJ"), _lex(rng, "NN")
        return [_article([adj], rng), adj, noun], ["DT", "JJ", "NN"]
    if form == 2:
        return [_lex(rng, "NNP")], ["NNP"]
    if form == 3:
        mod, noun = _lex(rng, "NN"), _lex(rng, "NN")
        return ["the", mod, noun], ["DT", "NN", "NN"]
    if form == 4:
        prop, noun = _lex(rng, "NNP"), _lex(rng, "NN")
        return ["the", prop, noun], ["DT", "NNP", "NN"]
    return [_lex(rng, "PRP$"), _lex(rng, "NN")], ["PRP$", "NN"]


def np_plural(rng):
    form = rng.randrange(7)
    if form == 0:
        return [_lex(rng, "NNS")], ["NNS"]
    if form == 1:
        return [_lex(rng, "JJ"), _lex(rng, "NNS")], ["JJ", "NNS"]
    if form == 2:
        return ["the", _lex(rng, "NNS")], ["DT", "NNS"]
    if form == 3:
        return ["the", _lex(rng, "JJ"), _lex(rng, "NNS")], ["DT", "JJ", "NNS"]
    if form == 4:
        return [_lex(rng, "NNP"), _lex(rng, "NNS")], ["NNP", "NNS"]
    if form == 5:
        return [_lex(rng, "PRP$"), _lex(rng, "NNS")], ["PRP$", "NNS"]
    return [_lex(rng, "CD"), _lex(rng, "NNS")], ["CD", "NNS"]


def _pp(rng):
    """Prepositional phrase attached to a noun."""
    prep = _lex(rng, "IN")
    if rng.random() < 0.5:
        tokens, tags = np_singular(rng)
    else:
        tokens, tags = np_plural(rng)
    return [prep] + tokens, ["IN"] + tags


# Each builder returns (tokens, tags) including final punctuation.

def q_what_is(rng):
    head = rng.choice(
        [("difference", "between"), ("cause", "of"), ("role", "of"),
         ("structure", "of"), ("impact", "of"), ("risk", "of"),
         ("origin", "of"), ("definition", "of"), ("source", "of")]
    )
    noun, prep = head
    if noun == "difference" and rng.random() < 0.25:
        # placeholder-variable style: "the difference between X and Y"
        a, b = rng.sample(["X", "Y", "A", "B", "Z"], 2)
        return (
            ["What", "is", "the", noun, prep, a, "and", b, "?"],
            ["WP", "VBZ", "DT", "NN", "IN", "NNP", "CC", "NNP", "."],
        )
    obj_tokens, obj_tags = np_singular(rng)
    tokens = ["What", "is", "the", noun, prep] + obj_tokens
    tags = ["WP", "VBZ", "DT", "NN", "IN"] + obj_tags
    if noun == "difference":
        other_tokens, other_tags = np_singular(rng)
        tokens += ["and"] + other_tokens
        tags += ["CC"] + other_tags
    return tokens + ["?"], tags + ["."]


def q_what_is_an_example(rng):
    obj = rng.choice(["this", "that"])
    return (
        ["What", "is", "an", "example", "of", obj, "?"],
        ["WP", "VBZ", "DT", "NN", "IN", "DT", "."],
    )


def q_what_are(rng):
    adj = _lex(rng, "JJ")
    nouns = _lex(rng, "NNS")
    pp_tokens, pp_tags = _pp(rng)
    tokens = ["What", "are", "the", adj, nouns] + pp_tokens + ["?"]
    tags = ["WP", "VBP", "DT", "JJ", "NNS"] + pp_tags + ["."]
    return tokens, tags


def q_what_are_plain(rng):
    nouns = _lex(rng, "NNS")
    pp_tokens, pp_tags = _pp(rng)
    return (
        ["What", "are", "the", nouns] + pp_tokens + ["?"],
        ["WP", "VBP", "DT", "NNS"] + pp_tags + ["."],
    )


def q_what_was(rng):
    mod, noun = _lex(rng, "NN"), _lex(rng, "NN")
    pp_tokens, pp_tags = _pp(rng)
    return (
        ["What", "was", "the", mod, noun] + pp_tokens + ["?"],
        ["WP", "VBD", "DT", "NN", "NN"] + pp_tags + ["."],
    )


def q_what_does(rng):
    subj_tokens, subj_tags = np_singular(rng)
    return (
        ["What", "does"] + subj_tokens + [_lex(rng, "VB"), "?"],
        ["WP", "VBZ"] + subj_tags + ["VB", "."],
    )


def q_whats_contraction(rng):
    noun = _lex(rng, "NN")
    place = _lex(rng, "NNP")
    return (
        ["What", "'s", "the", noun, "like", "in", place, "now", "?"],
        ["WP", "VBZ", "DT", "NN", "IN", "IN", "NNP", "RB", "."],
    )


def q_possessive(rng):
    owner = _lex(rng, "NN")
    nouns = _lex(rng, "NNS")
    return (
        ["What", "are", "the", owner, "'s", nouns, "?"],
        ["WP", "VBP", "DT", "NN", "POS", "NNS", "."],
    )


def q_how_does(rng):
    subj_tokens, subj_tags = np_singular(rng)
    verb = _lex(rng, "VB")
    tail_tokens, tail_tags = ([], [])
    if rng.random() < 0.5:
        tail_tokens, tail_tags = np_plural(rng)
    return (
        ["How", "does"] + subj_tokens + [verb] + tail_tokens + ["?"],
        ["WRB", "VBZ"] + subj_tags + ["VB"] + tail_tags + ["."],
    )


def q_how_do(rng):
    subj_tokens, subj_tags = np_plural(rng)
    verb = _lex(rng, "VB")
    pp_tokens, pp_tags = _pp(rng) if rng.random() < 0.5 else ([], [])
    return (
        ["How", "do"] + subj_tokens + [verb] + pp_tokens + ["?"],
        ["WRB", "VBP"] + subj_tags + ["VB"] + pp_tags + ["."],
    )


def q_how_is(rng):
    subj_tokens, subj_tags = np_singular(rng)
    return (
        ["How", "is"] + subj_tokens + [_lex(rng, "VBN"), "?"],
        ["WRB", "VBZ"] + subj_tags + ["VBN", "."],
    )


def q_how_are(rng):
    subj_tokens, subj_tags = np_plural(rng)
    return (
        ["How", "are"] + subj_tokens + [_lex(rng, "VBN"), "?"],
        ["WRB", "VBP"] + subj_tags + ["VBN", "."],
    )


def q_how_can(rng):
    subj = rng.choice([("I", "PRP"), ("you", "PRP"), ("we", "PRP"),
                       ("patients", "NNS"), ("doctors", "NNS")])
    obj_tokens, obj_tags = np_plural(rng) if rng.random() < 0.5 else np_singular(rng)
    return (
        ["How", _lex(rng, "MD"), subj[0], _lex(rng, "VB")] + obj_tokens + ["?"],
        ["WRB", "MD", subj[1], "VB"] + obj_tags + ["."],
    )


def q_how_many(rng):
    nouns = _lex(rng, "NNS")
    verb = rng.choice(["were", "are"])
    verb_tag = "VBD" if verb == "were" else "VBP"
    place = _lex(rng, "NNP")
    return (
        ["How", "many", nouns, verb, _lex(rng, "VBN"), "in", place, "?"],
        ["WRB", "JJ", "NNS", verb_tag, "VBN", "IN", "NNP", "."],
    )


def q_how_adj_compared(rng):
    adj = rng.choice(["deadly", "severe", "common", "dangerous", "effective"])
    a, b = _lex(rng, "NNP"), _lex(rng, "NNP")
    return (
        ["How", adj, "was", a, "compared", "to", b, "?"],
        ["WRB", "JJ", "VBD", "NNP", "VBN", "TO", "NNP", "."],
    )


def q_how_long(rng):
    subj_tokens, subj_tags = np_singular(rng)
    return (
        ["How", "long", "does"] + subj_tokens + ["last", "?"],
        ["WRB", "RB", "VBZ"] + subj_tags + ["VB", "."],
    )


def q_when_where(rng):
    wh = rng.choice(["When", "Where"])
    subj_tokens, subj_tags = np_singular(rng)
    return (
        [wh, "did"] + subj_tokens + [rng.choice(["begin", "originate", "start", "happen"]), "?"],
        ["WRB", "VBD"] + subj_tags + ["VB", "."],
    )


def q_why(rng):
    if rng.random() < 0.5:
        subj_tokens, subj_tags = np_plural(rng)
        aux, aux_tag = "do", "VBP"
    else:
        subj_tokens, subj_tags = np_singular(rng)
        aux, aux_tag = "does", "VBZ"
    obj_tokens, obj_tags = np_plural(rng)
    return (
        ["Why", aux] + subj_tokens + [_lex(rng, "VB")] + obj_tokens + ["?"],
        ["WRB", aux_tag] + subj_tags + ["VB"] + obj_tags + ["."],
    )


def q_why_bare(rng):
    return ["Why", "?"], ["WRB", "."]


def q_who(rng):
    obj_tokens, obj_tags = np_singular(rng)
    return (
        ["Who", _lex(rng, "VBD_LEX")] + obj_tokens + ["?"],
        ["WP", "VBD"] + obj_tags + ["."],
    )


def q_which(rng):
    if rng.random() < 0.5:
        return (
            ["Which", _lex(rng, "NN"), "is", _lex(rng, "JJR"), "?"],
            ["WDT", "NN", "VBZ", "JJR", "."],
        )
    return (
        ["Which", _lex(rng, "NNS"), "are", _lex(rng, "JJ"), "?"],
        ["WDT", "NNS", "VBP", "JJ", "."],
    )


def q_polar_is(rng):
    if rng.random() < 0.5:
        subj_tokens, subj_tags = np_singular(rng)
        return (
            ["Is"] + subj_tokens + [_lex(rng, "JJ"), "?"],
            ["VBZ"] + subj_tags + ["JJ", "."],
        )
    subj_tokens, subj_tags = np_plural(rng)
    return (
        ["Are"] + subj_tokens + [_lex(rng, "JJ"), "?"],
        ["VBP"] + subj_tags + ["JJ", "."],
    )


def q_polar_do(rng):
    if rng.random() < 0.5:
        subj_tokens, subj_tags = np_singular(rng)
        aux, aux_tag = "Does", "VBZ"
    else:
        subj_tokens, subj_tags = np_plural(rng)
        aux, aux_tag = "Do", "VBP"
    obj_tokens, obj_tags = np_plural(rng)
    return (
        [aux] + subj_tokens + [_lex(rng, "VB")] + obj_tokens + ["?"],
        [aux_tag] + subj_tags + ["VB"] + obj_tags + ["."],
    )


def q_polar_can(rng):
    md = rng.choice(["Can", "Should", "Could", "Will"])
    subj_tokens, subj_tags = np_plural(rng)
    obj_tokens, obj_tags = np_singular(rng)
    return (
        [md] + subj_tokens + [_lex(rng, "VB")] + obj_tokens + ["?"],
        ["MD"] + subj_tags + ["VB"] + obj_tags + ["."],
    )


def q_exist(rng):
    if rng.random() < 0.5:
        return (
            ["Are", "there", _lex(rng, "JJ"), _lex(rng, "NNS"), "to",
             _lex(rng, "VB"), _lex(rng, "JJR"), _lex(rng, "NNS"), "?"],
            ["VBP", "EX", "JJ", "NNS", "TO", "VB", "JJR", "NNS", "."],
        )
    pp_tokens, pp_tags = _pp(rng)
    return (
        ["Is", "there", "a", _lex(rng, "NN")] + pp_tokens + ["?"],
        ["VBZ", "EX", "DT", "NN"] + pp_tags + ["."],
    )


def q_premise(rng):
    premises = [
        (["I", "live", "in", "a", _lex(rng, "JJ"), _lex(rng, "NN"), "."],
         ["PRP", "VBP", "IN", "DT", "JJ", "NN", "."]),
        (["I", "am", "a", _lex(rng, "NN"), "."],
         ["PRP", "VBP", "DT", "NN", "."]),
        (["My", _lex(rng, "NN"), "is", _lex(rng, "JJ"), "."],
         ["PRP$", "NN", "VBZ", "JJ", "."]),
        (["We", "have", _lex(rng, "CD"), _lex(rng, "NNS"), "."],
         ["PRP", "VBP", "CD", "NNS", "."]),
    ]
    p_tokens, p_tags = rng.choice(premises)
    followups = [q_when_where, q_how_can, q_polar_is, q_what_are, q_polar_can]
    q_tokens, q_tags = rng.choice(followups)(rng)
    return p_tokens + q_tokens, p_tags + q_tags


def q_search_query(rng):
    """Keyword-style query: bare content words, no punctuation."""
    length = rng.randrange(3, 9)
    tokens, tags = [], []
    options = [
        ("NN", "NN"), ("NN", "NN"), ("NNS", "NNS"), ("JJ", "JJ"),
        ("NNP", "NNP"), ("CD", "CD"),
    ]
    for _ in range(length):
        key, tag = rng.choice(options)
        tokens.append(_lex(rng, key))
        tags.append(tag)
    return tokens, tags


def d_declarative(rng):
    form = rng.randrange(4)
    if form == 0:
        subj_tokens, subj_tags = np_singular(rng)
        obj_tokens, obj_tags = np_plural(rng)
        return (
            subj_tokens + [_lex(rng, "VBZ_LEX")] + obj_tokens + ["."],
            subj_tags + ["VBZ"] + obj_tags + ["."],
        )
    if form == 1:
        subj_tokens, subj_tags = np_plural(rng)
        return (
            subj_tokens + ["are", _lex(rng, "JJ"), "."],
            subj_tags + ["VBP", "JJ", "."],
        )
    if form == 2:
        subj_tokens, subj_tags = np_singular(rng)
        return (
            subj_tokens + ["was", _lex(rng, "VBN"), "in", _lex(rng, "NNP"), "."],
            subj_tags + ["VBD", "VBN", "IN", "NNP", "."],
        )
    subj_tokens, subj_tags = np_plural(rng)
    comp_tokens, comp_tags = np_singular(rng)
    return (
        subj_tokens + [_lex(rng, "VBD_LEX"), "that"] + comp_tokens
        + [_lex(rng, "VBZ_LEX"), _lex(rng, "NNS"), "."],
        subj_tags + ["VBD", "IN"] + comp_tags + ["VBZ", "NNS", "."],
    )


def d_adverbial(rng):
    subj_tokens, subj_tags = np_plural(rng)
    return (
        subj_tokens + [_lex(rng, "RB"), _lex(rng, "VBP_LEX"), _lex(rng, "NNS"), "."],
        subj_tags + ["RB", "VBP", "NNS", "."],
    )


# (builder, weight): questions dominate, matching the tagger's workload.
TEMPLATES = [
    (q_what_is, 10),
    (q_what_is_an_example, 2),
    (q_what_are, 10),
    (q_what_are_plain, 5),
    (q_what_was, 6),
    (q_what_does, 4),
    (q_whats_contraction, 2),
    (q_possessive, 2),
    (q_how_does, 6),
    (q_how_do, 5),
    (q_how_is, 4),
    (q_how_are, 3),
    (q_how_can, 5),
    (q_how_many, 3),
    (q_how_adj_compared, 2),
    (q_how_long, 2),
    (q_when_where, 5),
    (q_why, 4),
    (q_why_bare, 1),
    (q_who, 3),
    (q_which, 3),
    (q_polar_is, 4),
    (q_polar_do, 4),
    (q_polar_can, 4),
    (q_exist, 3),
    (q_premise, 5),
    (q_search_query, 8),
    (d_declarative, 6),
    (d_adverbial, 2),
]


def generate_tagged(n: int, seed: int) -> list[tuple[list[str], list[str]]]:
    """n (tokens, tags) sentences, deterministic in the seed."""
    rng = random.Random(seed)
    builders = [b for b, w in TEMPLATES for _ in range(w)]
    out = []
    for _ in range(n):
        tokens, tags = rng.choice(builders)(rng)
        out.append((tokens, tags))
    return out
