"""Command-line entry point: ``analyze``, ``ngrams`` and ``gen-fixture``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .corpus import dedup, detect_format, ingest, write_csv, write_jsonl
from .errors import PipelineError, ReviewgramError
from .fixture import generate
from .insights import SEGMENTS, segment
from .ngram import build_table, cond_prob_bigram, cond_prob_trigram, top_ngrams
from .report import CONFIG_ENV_VAR, EMIT_FORMATS, RunConfig, run_pipeline, write_outputs
from .textprep import PipelineConfig, load_word_list, preprocess


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _emit_list(text: str) -> tuple:
    items = tuple(dict.fromkeys(p.strip() for p in text.split(",") if p.strip()))
    bad = [i for i in items if i not in EMIT_FORMATS]
    if not items or bad:
        raise argparse.ArgumentTypeError(f"--emit takes a comma list from {EMIT_FORMATS}")
    return items


def _add_input_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", "-i", nargs="+", type=Path, required=required,
                   help="review files (CSV or JSONL)")
    p.add_argument("--format", dest="input_format", choices=("auto", "csv", "jsonl"), default=None,
                   help="input format (default: from file extension)")
    p.add_argument("--no-header", dest="has_header", action="store_const", const=False,
                   help="CSV files have no header row")
    p.add_argument("--stop-words", type=Path, help="stop-word list file, one word per line")
    p.add_argument("--stemmer", choices=("porter", "none"))
    p.add_argument("--min-token-length", type=_positive_int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewgram",
        description="Bigram/trigram opinion mining over star-rated reviews.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the full pipeline and write report.json / report.md")
    _add_input_args(a, required=False)
    a.add_argument("--out", "-o", type=Path, help="output directory (default: ./report)")
    a.add_argument("--emit", type=_emit_list, help="comma list of json,markdown")
    a.add_argument("--dict", dest="topic_dictionary", type=Path, help="topic dictionary JSON")
    a.add_argument("--map", dest="seven_s_mapping", type=Path, help="topic -> 7S element JSON")
    a.add_argument("--k", type=_positive_int, help="top n-grams kept per segment (default 25)")
    a.add_argument("--min-count", type=_positive_int, help="minimum n-gram count (default 3)")
    a.add_argument("--threads", type=_non_negative_int, help="worker threads, 0 = all cores")
    a.add_argument("--config", type=Path,
                   help=f"JSON run config (default: ${CONFIG_ENV_VAR} if set)")

    n = sub.add_parser("ngrams", help="print the top n-grams per rating segment")
    _add_input_args(n)
    n.add_argument("--n", type=int, choices=(2, 3), default=2)
    n.add_argument("--k", type=_positive_int, default=25)
    n.add_argument("--min-count", type=_positive_int, default=3)
    n.add_argument("--segment", choices=("all",) + tuple(c.value for c in SEGMENTS), default="all")

    g = sub.add_parser("gen-fixture", help="write the seeded synthetic review corpus")
    g.add_argument("--out", "-o", type=Path, required=True, help="output .csv or .jsonl file")
    g.add_argument("--seed", type=int, default=7)
    g.add_argument("--format", dest="output_format", choices=("csv", "jsonl"), default=None)
    return parser


def _pipeline_config(args, base: Optional[PipelineConfig] = None) -> PipelineConfig:
    base = base or PipelineConfig()
    kwargs = {}
    if args.stop_words is not None:
        kwargs["stop_words"] = load_word_list(args.stop_words)
    if args.stemmer is not None:
        kwargs["stemmer"] = args.stemmer
    if args.min_token_length is not None:
        kwargs["min_token_length"] = args.min_token_length
    if not kwargs:
        return base
    return PipelineConfig(
        stop_words=kwargs.get("stop_words", base.stop_words),
        stemmer=kwargs.get("stemmer", base.stemmer),
        min_token_length=kwargs.get("min_token_length", base.min_token_length),
        sentence_abbreviations=base.sentence_abbreviations,
    )


def _analyze(args, parser) -> int:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = RunConfig.from_file(config_path) if config_path else RunConfig()
    config = config.with_overrides(
        inputs=tuple(args.input) if args.input else None,
        input_format=args.input_format,
        has_header=args.has_header,
        topic_dictionary=args.topic_dictionary,
        seven_s_mapping=args.seven_s_mapping,
        k=args.k,
        min_count=args.min_count,
        out_dir=args.out,
        emit=args.emit,
        threads=args.threads,
        pipeline=_pipeline_config(args, config.pipeline),
    )
    if not config.inputs:
        parser.error("analyze: --input is required (or set inputs in the config file)")
    report = run_pipeline(config)
    for path in write_outputs(report, config.out_dir, config.emit):
        print(path)
    return 0


def _ngrams(args) -> int:
    pipeline = _pipeline_config(args)
    try:
        corpus = dedup(ingest(args.input, args.input_format or "auto", args.has_header))
    except ReviewgramError as exc:
        raise PipelineError("ingest", exc) from exc
    sentences = [s for r in corpus.records for s in preprocess(r, pipeline)]
    segments = segment(sentences, corpus)
    wanted = [c for c in SEGMENTS if args.segment in ("all", c.value)]
    out = sys.stdout
    out.write("segment\tngram\tcount\tcond_prob\n")
    for cls in wanted:
        table = build_table(segments[cls])
        for gram, count in top_ngrams(table, args.n, args.k, args.min_count):
            if args.n == 2:
                p = cond_prob_bigram(table, *gram)
            else:
                p = cond_prob_trigram(table, *gram)
            out.write(f"{cls.value}\t{' '.join(gram)}\t{count}\t{p:.6f}\n")
    return 0


def _gen_fixture(args) -> int:
    records = generate(seed=args.seed)
    fmt = args.output_format or detect_format(args.out)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    (write_jsonl if fmt == "jsonl" else write_csv)(records, args.out)
    print(f"wrote {len(records)} reviews to {args.out}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _analyze(args, parser)
        if args.command == "ngrams":
            return _ngrams(args)
        return _gen_fixture(args)
    except ReviewgramError as exc:
        print(f"reviewgram: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"reviewgram: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
