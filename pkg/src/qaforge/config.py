"""Generation configuration: categorizations, categories, and their parsing.

A configuration is a JSON file of the form

    {
      "user_categorizations": [...],
      "question_categorizations": [...],
      "num_candidates": 3,
      "seed": 42
    }

where each categorization is {"name": str, "categories": [...]} and each
category is {"name": str, "probability": number?, "description": str}.
Probabilities within one categorization must sum to 1; categories that
omit theirs split the remaining mass uniformly. An empty file ``{}`` is
the "vanilla" configuration: no categorizations at all, which makes the
generation prompt carry only the document.

Configs are immutable after validation and safe to share across workers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigError

PROBABILITY_SUM_TOLERANCE = 1e-6

KIND_USER = "user"
KIND_QUESTION = "question"

_TOP_LEVEL_KEYS = {"user_categorizations", "question_categorizations", "num_candidates", "seed"}
_CATEGORIZATION_KEYS = {"name", "categories"}
_CATEGORY_KEYS = {"name", "probability", "description"}


@dataclass(frozen=True)
class Category:
    """One option inside a categorization.

    The description is inserted verbatim into generation prompts; the
    name never is, it only appears in records and reports.
    """

    name: str
    description: str
    probability: float


@dataclass(frozen=True)
class Categorization:
    name: str
    kind: str  # "user" or "question"
    categories: tuple[Category, ...]

    def category_names(self) -> list[str]:
        return [c.name for c in self.categories]


@dataclass(frozen=True)
class GenerationConfig:
    user_categorizations: tuple[Categorization, ...] = ()
    question_categorizations: tuple[Categorization, ...] = ()
    num_candidates_k: int = 3
    seed: int | None = None

    @property
    def categorizations(self) -> tuple[Categorization, ...]:
        """All categorizations in draw order: users first, then questions."""
        return self.user_categorizations + self.question_categorizations

    def is_vanilla(self) -> bool:
        return not self.user_categorizations and not self.question_categorizations


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; severity is "error" or "warning"."""

    severity: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.message}"


def parse_config(raw: bytes | str) -> GenerationConfig:
    """Parse and validate a JSON configuration.

    Raises ConfigError on malformed JSON (with position), on unknown
    fields (naming the field), and on any validation failure.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not valid UTF-8: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")

    unknown = sorted(set(data) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"unknown config field: {unknown[0]!r}")

    num_candidates = data.get("num_candidates", 3)
    if not isinstance(num_candidates, int) or isinstance(num_candidates, bool):
        raise ConfigError("num_candidates must be an integer")

    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ConfigError("seed must be an integer")

    users = _parse_categorizations(data.get("user_categorizations", []), KIND_USER)
    questions = _parse_categorizations(data.get("question_categorizations", []), KIND_QUESTION)

    cfg = GenerationConfig(
        user_categorizations=tuple(users),
        question_categorizations=tuple(questions),
        num_candidates_k=num_candidates,
        seed=seed,
    )
    diagnostics = validate_config(cfg)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise ConfigError("; ".join(str(d) for d in errors), diagnostics=diagnostics)
    return cfg


def _parse_categorizations(items, kind) -> list[Categorization]:
    list_key = f"{kind}_categorizations"
    if not isinstance(items, list):
        raise ConfigError(f"{list_key} must be a list")
    out = []
    for i, item in enumerate(items):
        path = f"{list_key}[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{path} must be an object")
        unknown = sorted(set(item) - _CATEGORIZATION_KEYS)
        if unknown:
            raise ConfigError(f"unknown field in {path}: {unknown[0]!r}")
        name = item.get("name")
        if not isinstance(name, str):
            raise ConfigError(f"{path}.name must be a string")
        raw_categories = item.get("categories")
        if not isinstance(raw_categories, list):
            raise ConfigError(f"{path}.categories must be a list")
        categories = _parse_categories(raw_categories, path)
        out.append(Categorization(name=name, kind=kind, categories=tuple(categories)))
    return out


def _parse_categories(items, parent_path) -> list[Category]:
    parsed = []
    for j, item in enumerate(items):
        path = f"{parent_path}.categories[{j}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{path} must be an object")
        unknown = sorted(set(item) - _CATEGORY_KEYS)
        if unknown:
            raise ConfigError(f"unknown field in {path}: {unknown[0]!r}")
        name = item.get("name")
        if not isinstance(name, str):
            raise ConfigError(f"{path}.name must be a string")
        description = item.get("description")
        if not isinstance(description, str):
            raise ConfigError(f"{path}.description must be a string")
        probability = item.get("probability")
        if probability is not None and not isinstance(probability, (int, float)):
            raise ConfigError(f"{path}.probability must be a number")
        parsed.append((name, description, probability))

    # Categories with no explicit probability share whatever mass is left,
    # uniformly. The fill is deterministic: same input, same values.
    specified = sum(p for _, _, p in parsed if p is not None)
    missing = [j for j, (_, _, p) in enumerate(parsed) if p is None]
    if missing:
        residual = 1.0 - specified
        if residual < -PROBABILITY_SUM_TOLERANCE:
            raise ConfigError(
                f"{parent_path}: specified probabilities sum to {specified:g}, "
                "leaving no mass for the unspecified categories"
            )
        fill = max(residual, 0.0) / len(missing)
        parsed = [
            (name, desc, fill if p is None else p) for name, desc, p in parsed
        ]

    return [Category(name=n, description=d, probability=float(p)) for n, d, p in parsed]


def validate_config(cfg: GenerationConfig) -> list[Diagnostic]:
    """Check every invariant; empty list means the config is valid."""
    diags: list[Diagnostic] = []

    if cfg.num_candidates_k < 1:
        diags.append(Diagnostic("error", "num_candidates", "must be >= 1"))

    seen_names: dict[str, str] = {}
    for categorization in cfg.categorizations:
        list_key = f"{categorization.kind}_categorizations"
        path = f"{list_key}[{categorization.name!r}]"
        if not categorization.name.strip():
            diags.append(Diagnostic("error", path, "categorization name is empty"))
        if categorization.name in seen_names:
            diags.append(
                Diagnostic(
                    "error",
                    path,
                    f"duplicate categorization name {categorization.name!r} "
                    f"(also in {seen_names[categorization.name]})",
                )
            )
        else:
            seen_names[categorization.name] = list_key

        if not categorization.categories:
            diags.append(Diagnostic("error", path, "categorization has no categories"))
            continue

        seen_cats = set()
        for category in categorization.categories:
            cat_path = f"{path}.categories[{category.name!r}]"
            if not category.name.strip():
                diags.append(Diagnostic("error", cat_path, "category name is empty"))
            if category.name in seen_cats:
                diags.append(
                    Diagnostic("error", cat_path, f"duplicate category name {category.name!r}")
                )
            seen_cats.add(category.name)
            if not category.description.strip():
                diags.append(Diagnostic("error", cat_path, "description is empty"))
            if not (0.0 < category.probability <= 1.0):
                diags.append(
                    Diagnostic(
                        "error",
                        cat_path,
                        f"probability {category.probability:g} outside (0, 1]",
                    )
                )

        total = sum(c.probability for c in categorization.categories)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            diags.append(
                Diagnostic("error", path, f"probabilities sum to {total:g}")
            )

    return diags


def serialize_config(cfg: GenerationConfig) -> str:
    """Inverse of parse_config on validated configs (field-for-field)."""
    return json.dumps(config_to_dict(cfg), indent=2, ensure_ascii=False) + "\n"


def config_to_dict(cfg: GenerationConfig) -> dict:
    data: dict = {
        "user_categorizations": [_categorization_dict(c) for c in cfg.user_categorizations],
        "question_categorizations": [
            _categorization_dict(c) for c in cfg.question_categorizations
        ],
        "num_candidates": cfg.num_candidates_k,
    }
    if cfg.seed is not None:
        data["seed"] = cfg.seed
    return data


def _categorization_dict(categorization: Categorization) -> dict:
    return {
        "name": categorization.name,
        "categories": [
            {
                "name": c.name,
                "probability": c.probability,
                "description": c.description,
            }
            for c in categorization.categories
        ],
    }


def config_digest(cfg: GenerationConfig) -> str:
    """sha256 over the canonical JSON form."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config_file(path) -> GenerationConfig:
    with open(path, "rb") as fh:
        return parse_config(fh.read())


def default_general_purpose_config() -> GenerationConfig:
    """The bundled general-purpose config.

    Four question categorizations (Factuality, Premise, Phrasing,
    Linguistic variation; 2x2x4x2 = 32 joint categories, uniform within
    each) plus one user-expertise categorization (expert/novice).
    """
    data = resources.files("qaforge.data").joinpath("default_config.json").read_bytes()
    return parse_config(data)
