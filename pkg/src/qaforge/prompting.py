"""Generation-prompt rendering.

The template ships as a data file with named placeholders so it can be
replaced wholesale via the CLI. Substitution is literal string insertion:
document content is never escaped. Placeholders:

    [num_questions]             how many candidate pairs to ask for
    [document]                  the source document text
    [user_characteristics]      one "- They must be <description>" per user pick
    [question_characteristics]  one "- It must be <description>" per question pick

When a characteristics placeholder has no picks, the whole paragraph
(blank-line delimited block) containing it is dropped, so the vanilla
prompt keeps only the preamble and the document section.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .corpus import Document
from .sampling import CategoryDraw

NUM_QUESTIONS_SLOT = "[num_questions]"
DOCUMENT_SLOT = "[document]"
USER_SLOT = "[user_characteristics]"
QUESTION_SLOT = "[question_characteristics]"

USER_BULLET = "    - They must be {}"
QUESTION_BULLET = "    - It must be {}"


@dataclass(frozen=True)
class PromptInstance:
    text: str
    num_questions: int
    document_id: str
    draw: CategoryDraw


def default_template() -> str:
    return resources.files("qaforge.data").joinpath("generation_prompt.txt").read_text(
        encoding="utf-8"
    )


def render_prompt(
    draw: CategoryDraw,
    doc: Document,
    k: int,
    template: str | None = None,
) -> PromptInstance:
    """Fill the template for one draw/document; rendering is pure."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if template is None:
        template = default_template()

    user_bullets = "\n".join(USER_BULLET.format(cat.description) for _, cat in draw.user_picks)
    question_bullets = "\n".join(
        QUESTION_BULLET.format(cat.description) for _, cat in draw.question_picks
    )

    paragraphs = template.split("\n\n")
    kept = []
    for paragraph in paragraphs:
        if USER_SLOT in paragraph and not draw.user_picks:
            continue
        if QUESTION_SLOT in paragraph and not draw.question_picks:
            continue
        kept.append(paragraph)

    text = "\n\n".join(kept)
    text = text.replace(NUM_QUESTIONS_SLOT, str(k))
    text = text.replace(USER_SLOT, user_bullets)
    text = text.replace(QUESTION_SLOT, question_bullets)
    # document goes last: its content is inserted as-is, never re-substituted
    text = text.replace(DOCUMENT_SLOT, doc.text)
    text = text.rstrip("\n") + "\n"

    return PromptInstance(text=text, num_questions=k, document_id=doc.id, draw=draw)
