"""Command-line interface.

Subcommands cover the whole admin workflow: ``validate`` a config,
``generate`` a benchmark, ``analyze`` its diversity, ``compare`` several
question sets, and ``sweep`` diversity against scale.

Exit codes are a stable contract: 0 success, 1 validation failure, 2
file/corpus problems, 3 provider failure, 4 run aborted by the
failure-rate policy. All randomness flows from --seed; when the flag is
absent a seed is drawn and printed so the run can be replayed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import shlex
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import (
    default_general_purpose_config,
    load_config_file,
    parse_config,
    validate_config,
)
from .corpus import load_corpus, make_sampling_plan
from .diversity import analyze, format_report_text
from .errors import (
    ConfigError,
    CorpusError,
    EmbeddingError,
    MetricError,
    PlanError,
    ProviderError,
    QaforgeError,
    RunAbortedError,
    TaggerError,
)
from .pipeline import failure_summary, run_generation, write_benchmark_jsonl
from .providers import (
    FileEmbedder,
    HashEmbedder,
    HttpChatProvider,
    HttpEmbedder,
    MockChatGenerator,
    MockJudge,
    ProviderBundle,
)
from .report import (
    AXIS_NUM_DOCUMENTS,
    AXIS_QUESTIONS_PER_DOCUMENT,
    compare,
    format_comparison_text,
    run_sweep,
    sweep_to_dict,
    write_sweep_csv,
)
from .textproc.tagging import ExternalProcessTagger

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_PROVIDER = 3
EXIT_ABORTED = 4


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_VALIDATION
    except (CorpusError, PlanError, MetricError, TaggerError, EmbeddingError) as exc:
        _err(f"input error: {exc}")
        return EXIT_IO
    except OSError as exc:
        _err(f"i/o error: {exc}")
        return EXIT_IO
    except RunAbortedError as exc:
        _err(f"run aborted: {exc}")
        return EXIT_ABORTED
    except ProviderError as exc:
        _err(f"provider error: {exc}")
        return EXIT_PROVIDER
    except QaforgeError as exc:
        _err(f"error: {exc}")
        return EXIT_VALIDATION


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaforge",
        description="Synthetic Q&A benchmark generation and diversity analysis.",
    )
    parser.add_argument("--version", action="version", version=f"qaforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a configuration file")
    p_validate.add_argument("config", help="path to the JSON config")
    p_validate.set_defaults(func=cmd_validate)

    p_generate = sub.add_parser("generate", help="generate a benchmark")
    p_generate.add_argument("--config", help="config JSON; omitted = vanilla mode")
    p_generate.add_argument("--corpus", required=True)
    p_generate.add_argument(
        "--corpus-format", choices=["jsonl", "plain_dir"], default="jsonl"
    )
    plan_group = p_generate.add_mutually_exclusive_group(required=True)
    plan_group.add_argument("--per-doc", type=int, metavar="N",
                            help="N questions for every document")
    plan_group.add_argument("--total", type=int, metavar="N",
                            help="N documents drawn uniformly with replacement")
    plan_group.add_argument("--counts", metavar="FILE",
                            help="JSON file mapping document id -> question count")
    p_generate.add_argument("--out", help="output directory (default: runs/<ts>-seed<seed>)")
    p_generate.add_argument("--seed", type=int)
    p_generate.add_argument("--retries", type=int, default=2,
                            help="extra generation attempts when no candidate passes")
    p_generate.add_argument("--max-failure-rate", type=float, default=0.2)
    p_generate.add_argument("--concurrency", type=int, default=1)
    p_generate.add_argument("--prompt-template", help="override the generation prompt file")
    p_generate.add_argument("--judge-prompt", help="override the judge prompt file")
    _add_provider_flags(p_generate)
    p_generate.set_defaults(func=cmd_generate)

    p_analyze = sub.add_parser("analyze", help="diversity report for one question set")
    p_analyze.add_argument("--input", required=True,
                           help="benchmark JSONL or plain questions file")
    p_analyze.add_argument("--out")
    _add_analysis_flags(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_compare = sub.add_parser("compare", help="side-by-side diversity table")
    p_compare.add_argument("--input", action="append", required=True,
                           metavar="LABEL=PATH", dest="inputs")
    p_compare.add_argument("--out")
    _add_analysis_flags(p_compare)
    p_compare.set_defaults(func=cmd_compare)

    p_sweep = sub.add_parser("sweep", help="diversity vs. scale experiment")
    p_sweep.add_argument("--axis", required=True,
                         choices=["questions-per-document", "num-documents"])
    p_sweep.add_argument("--x", required=True,
                         help="comma-separated x values, e.g. 20,50,100,147")
    p_sweep.add_argument("--total", type=int, default=500,
                         help="fixed question total for the num-documents axis")
    p_sweep.add_argument("--corpus", required=True)
    p_sweep.add_argument("--corpus-format", choices=["jsonl", "plain_dir"],
                         default="jsonl")
    p_sweep.add_argument("--variant", action="append", metavar="LABEL=CONFIG",
                         dest="variants",
                         help="repeatable; CONFIG is a path, 'default', or 'vanilla'")
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--retries", type=int, default=2)
    p_sweep.add_argument("--concurrency", type=int, default=1)
    _add_provider_flags(p_sweep)
    _add_analysis_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def _add_provider_flags(parser) -> None:
    group = parser.add_argument_group("provider")
    group.add_argument("--provider", choices=["mock", "http"], default="mock")
    group.add_argument("--mock-persona", choices=["varied", "templated"],
                       default="varied")
    group.add_argument("--mock-judge", choices=["lenient", "strict", "reject"],
                       default="lenient")
    group.add_argument("--endpoint", help="OpenAI-compatible base URL")
    group.add_argument("--model", default="default")
    group.add_argument("--timeout-ms", type=int, default=60_000)
    group.add_argument("--http-retries", type=int, default=3)


def _add_analysis_flags(parser) -> None:
    group = parser.add_argument_group("analysis")
    group.add_argument("--embedder", choices=["none", "mock", "http", "file"],
                       default="none")
    group.add_argument("--embedder-file", help="precomputed vectors JSONL")
    group.add_argument("--embedder-endpoint")
    group.add_argument("--embedder-model", default="default")
    group.add_argument("--tagger", choices=["builtin", "external"], default="builtin")
    group.add_argument("--tagger-cmd", help="external tagger command line")


# ---------------------------------------------------------------------------
# Command bodies


def cmd_validate(args) -> int:
    try:
        raw = Path(args.config).read_bytes()
    except OSError as exc:
        _err(f"cannot read config: {exc}")
        return EXIT_IO
    try:
        cfg = parse_config(raw)
    except ConfigError as exc:
        for diagnostic in exc.diagnostics or []:
            _err(str(diagnostic))
        if not exc.diagnostics:
            _err(str(exc))
        return EXIT_VALIDATION
    diagnostics = validate_config(cfg)
    for diagnostic in diagnostics:
        _err(str(diagnostic))
    return EXIT_VALIDATION if diagnostics else EXIT_OK


def _resolve_seed(args, config_seed=None) -> int:
    if args.seed is not None:
        return args.seed
    if config_seed is not None:
        _err(f"using seed {config_seed} from the config file")
        return config_seed
    seed = random.SystemRandom().getrandbits(32)
    _err(f"drew seed {seed} (pass --seed {seed} to replay this run)")
    return seed


def _out_dir(args, seed: int) -> Path:
    if args.out:
        path = Path(args.out)
    else:
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
        path = Path("runs") / f"{stamp}-seed{seed}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _build_bundle(args, seed: int) -> ProviderBundle:
    if args.provider == "mock":
        return ProviderBundle(
            generator=MockChatGenerator(seed=seed, persona=args.mock_persona),
            judge=MockJudge(policy=args.mock_judge),
        )
    if not args.endpoint:
        raise ProviderError("--endpoint is required with --provider http")
    chat = HttpChatProvider(
        args.endpoint,
        model=args.model,
        timeout_ms=args.timeout_ms,
        retries=args.http_retries,
        max_concurrency=max(1, getattr(args, "concurrency", 1)),
    )
    return ProviderBundle(generator=chat, judge=chat)


def _build_embedder(args):
    if args.embedder == "none":
        return None
    if args.embedder == "mock":
        return HashEmbedder()
    if args.embedder == "file":
        if not args.embedder_file:
            raise EmbeddingError("--embedder-file is required with --embedder file")
        return FileEmbedder(args.embedder_file)
    if not args.embedder_endpoint:
        raise EmbeddingError("--embedder-endpoint is required with --embedder http")
    return HttpEmbedder(args.embedder_endpoint, model=args.embedder_model)


def _build_tagger(args):
    if args.tagger == "builtin":
        return None  # pos_tag falls back to the bundled weights
    if not args.tagger_cmd:
        raise TaggerError("--tagger-cmd is required with --tagger external")
    return ExternalProcessTagger(shlex.split(args.tagger_cmd))


def _load_cfg(path: str | None):
    if path is None:
        return parse_config("{}")
    return load_config_file(path)


def cmd_generate(args) -> int:
    started = datetime.now(timezone.utc)
    cfg = _load_cfg(args.config)
    corpus = load_corpus(args.corpus, format=args.corpus_format)
    seed = _resolve_seed(args, config_seed=cfg.seed)
    out = _out_dir(args, seed)

    if args.per_doc is not None:
        counts = {doc_id: args.per_doc for doc_id in corpus.ids()}
        plan = make_sampling_plan(corpus, seed=seed, counts=counts)
    elif args.counts is not None:
        with open(args.counts, encoding="utf-8") as fh:
            counts = {str(k): int(v) for k, v in json.load(fh).items()}
        plan = make_sampling_plan(corpus, seed=seed, counts=counts)
    else:
        plan = make_sampling_plan(corpus, seed=seed, total=args.total)

    bundle = _build_bundle(args, seed)
    prompt_template = _read_optional(args.prompt_template)
    judge_template = _read_optional(args.judge_prompt)

    step = max(1, len(plan) // 10)

    def progress(done, total):
        if done % step == 0 or done == total:
            _err(f"progress: {done}/{total}")

    benchmark = run_generation(
        cfg,
        corpus,
        plan,
        bundle,
        seed=seed,
        retries=args.retries,
        max_failure_rate=args.max_failure_rate,
        workers=args.concurrency,
        prompt_template=prompt_template,
        judge_template=judge_template,
        model=args.model,
        progress=progress,
    )

    bench_path = out / "benchmark.jsonl"
    write_benchmark_jsonl(benchmark, bench_path)
    manifest = {
        "command_line": ["qaforge"] + args.argv,
        "tool_version": __version__,
        "seed": seed,
        "digest_algorithm": "sha256",
        "config_digest": benchmark.config_digest,
        "corpus_digest": benchmark.corpus_digest,
        "providers": bundle.names(),
        "provider_stats": {
            "generator": bundle.generator.stats.to_dict()
            if hasattr(bundle.generator, "stats")
            else None,
            "judge": bundle.judge.stats.to_dict()
            if hasattr(bundle.judge, "stats")
            else None,
        },
        "started_utc": started.isoformat(),
        "finished_utc": datetime.now(timezone.utc).isoformat(),
        "failure_summary": failure_summary(benchmark),
    }
    _atomic_write(out / "run_manifest.json", json.dumps(manifest, indent=2) + "\n")
    _err(f"wrote {bench_path} ({len(benchmark.records)} records, "
         f"{len(benchmark.failures)} failures)")
    return EXIT_OK


def _read_optional(path):
    if path is None:
        return None
    return Path(path).read_text(encoding="utf-8")


def cmd_analyze(args) -> int:
    report = analyze(args.input, embedder=_build_embedder(args), tagger=_build_tagger(args))
    out = _out_dir(args, seed=0) if args.out else None
    text = format_report_text(report, label=str(args.input))
    print(text, end="")
    if out:
        _atomic_write(out / "report.json", json.dumps(report.to_dict(), indent=2) + "\n")
        _atomic_write(out / "report.txt", text)
        _err(f"wrote {out / 'report.json'}")
    return EXIT_OK


def _parse_labeled(values, what):
    pairs = []
    for value in values:
        label, sep, path = value.partition("=")
        if not sep or not label or not path:
            raise ValueError(f"{what} must look like LABEL=PATH, got {value!r}")
        pairs.append((label, path))
    return pairs


def cmd_compare(args) -> int:
    inputs = _parse_labeled(args.inputs, "--input")
    if len(inputs) < 2:
        _err("compare needs at least two --input LABEL=PATH values")
        return EXIT_VALIDATION
    table = compare(inputs, embedder=_build_embedder(args), tagger=_build_tagger(args))
    text = format_comparison_text(table)
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _atomic_write(out / "comparison.json", json.dumps(table.to_dict(), indent=2) + "\n")
        _atomic_write(out / "comparison.txt", text)
        _err(f"wrote {out / 'comparison.json'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    axis = (
        AXIS_QUESTIONS_PER_DOCUMENT
        if args.axis == "questions-per-document"
        else AXIS_NUM_DOCUMENTS
    )
    xs = [int(part) for part in args.x.split(",") if part.strip()]
    corpus = load_corpus(args.corpus, format=args.corpus_format)
    seed = _resolve_seed(args)
    out = _out_dir(args, seed)

    variant_specs = args.variants or ["default=default"]
    variants = []
    for label, spec in _parse_labeled(variant_specs, "--variant"):
        if spec == "default":
            variants.append((label, default_general_purpose_config()))
        elif spec == "vanilla":
            variants.append((label, parse_config("{}")))
        else:
            variants.append((label, load_config_file(spec)))

    def bundle_factory():
        return _build_bundle(args, seed)

    result = run_sweep(
        axis,
        variants,
        corpus,
        bundle_factory,
        xs,
        seed=seed,
        total=args.total,
        embedder=_build_embedder(args),
        tagger=_build_tagger(args),
        retries=args.retries,
        workers=args.concurrency,
        model=args.model,
    )
    write_sweep_csv(result, out / "sweep.csv")
    _atomic_write(out / "sweep.json", json.dumps(sweep_to_dict(result), indent=2) + "\n")
    for point in result.points:
        for label, message in point.errors.items():
            _err(f"point x={point.x} variant {label!r} failed: {message}")
    _err(f"wrote {out / 'sweep.csv'}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
