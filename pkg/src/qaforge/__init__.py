"""Synthetic Q&A benchmark generation and question-diversity measurement."""

__version__ = "0.1.0"

from .config import (  # noqa: F401
    GenerationConfig,
    default_general_purpose_config,
    parse_config,
    validate_config,
)
from .corpus import Corpus, Document, load_corpus, make_sampling_plan  # noqa: F401
from .diversity import DiversityReport, analyze  # noqa: F401
from .pipeline import Benchmark, run_generation, write_benchmark_jsonl  # noqa: F401
from .providers import ProviderBundle, mock_bundle  # noqa: F401
from .report import compare, run_sweep  # noqa: F401
