"""Category drawing: one category per categorization, per configured odds.

All randomness in a generation run flows from one seeded ``random.Random``
stream. For each record the stream is consumed in a fixed, documented
order (see pipeline.materialize_assignments): first the category draws in
config order (users, then questions), then one 63-bit substream seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .config import Category, Categorization, GenerationConfig


@dataclass(frozen=True)
class CategoryDraw:
    """One sampled category per configured categorization, in config order."""

    user_picks: tuple[tuple[str, Category], ...] = ()
    question_picks: tuple[tuple[str, Category], ...] = ()

    @property
    def picks(self) -> tuple[tuple[str, Category], ...]:
        return self.user_picks + self.question_picks

    def is_empty(self) -> bool:
        return not self.user_picks and not self.question_picks

    def user_names(self) -> dict[str, str]:
        return {categorization: cat.name for categorization, cat in self.user_picks}

    def question_names(self) -> dict[str, str]:
        return {categorization: cat.name for categorization, cat in self.question_picks}


def draw_categories(cfg: GenerationConfig, rng: random.Random) -> CategoryDraw:
    """Draw independently from every categorization; empty config, empty draw."""
    users = tuple(
        (c.name, _weighted_choice(c, rng)) for c in cfg.user_categorizations
    )
    questions = tuple(
        (c.name, _weighted_choice(c, rng)) for c in cfg.question_categorizations
    )
    return CategoryDraw(user_picks=users, question_picks=questions)


def _weighted_choice(categorization: Categorization, rng: random.Random) -> Category:
    r = rng.random()
    acc = 0.0
    for category in categorization.categories:
        acc += category.probability
        if r < acc:
            return category
    # Float round-off can leave acc a hair under 1.0; the tail belongs
    # to the last category.
    return categorization.categories[-1]
