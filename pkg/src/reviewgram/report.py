"""Pipeline orchestration and report rendering.

ingest -> dedup -> preprocess -> segment -> count -> topics -> 7S -> Report.
The JSON report is canonical: sorted keys, floats rounded to 6 places, and
nothing in it depends on file paths or the thread count.
"""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from . import __version__
from .corpus import Corpus, dedup, ingest
from .errors import ConfigError, InputError, PipelineError, ReviewgramError
from .insights import (
    SEGMENTS,
    SEVEN_S,
    classify_rating,
    default_seven_s_mapping,
    default_topic_dictionary,
    extract_topics,
    load_seven_s_mapping,
    load_topic_dictionary,
    map_7s,
    segment,
)
from .ngram import NgramTable, build_table_parallel, cond_prob_bigram, cond_prob_trigram, top_ngrams
from .textprep import PipelineConfig, load_word_list, preprocess

CONFIG_ENV_VAR = "REVIEWGRAM_CONFIG"
EMIT_FORMATS = ("json", "markdown")
DECIMALS = 6

STRUCTURE_SYSTEMS_CAVEAT = (
    "Structure and Systems are management-side elements. Customer reviews speak to them only "
    "indirectly (for example through booking and scheduling), so verdicts for these two "
    "elements are weaker evidence than those for the soft elements."
)
METHOD_CAVEAT = (
    "Topics are assigned by matching dictionary seed phrases against the top-ranked n-grams of "
    "each segment; n-grams below min_count or outside the top k are not considered."
)


def _r(x: float) -> float:
    return round(float(x), DECIMALS)


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunConfig:
    inputs: tuple = ()
    input_format: str = "auto"
    has_header: Optional[bool] = None
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    topic_dictionary: Optional[Path] = None
    seven_s_mapping: Optional[Path] = None
    k: int = 25
    min_count: int = 3
    out_dir: Path = Path("report")
    emit: tuple = EMIT_FORMATS
    threads: int = 0
    strength_threshold: float = 0.2
    weakness_threshold: float = -0.2

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "emit", tuple(self.emit))
        object.__setattr__(self, "out_dir", Path(self.out_dir))

    def validate(self) -> "RunConfig":
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.min_count < 1:
            raise ConfigError("min_count must be >= 1")
        if not self.emit or any(e not in EMIT_FORMATS for e in self.emit):
            raise ConfigError(f"emit must be a non-empty subset of {EMIT_FORMATS}")
        if self.input_format not in ("auto", "csv", "jsonl"):
            raise ConfigError(f"unknown input format {self.input_format!r}")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0")
        if not self.inputs:
            raise ConfigError("no input files given")
        return self

    @property
    def workers(self) -> int:
        return self.threads or os.cpu_count() or 1

    @classmethod
    def from_dict(cls, data: dict, base: Optional[Path] = None) -> "RunConfig":
        """Build from a JSON config object. Relative paths resolve against ``base``."""
        data = dict(data)
        base = base or Path(".")

        def path(v):
            return None if v is None else base / Path(v)

        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key == "inputs":
                value = tuple(path(v) for v in value)
            elif key in ("topic_dictionary", "seven_s_mapping", "out_dir"):
                value = path(value)
            elif key == "pipeline":
                value = pipeline_from_dict(value, base)
            kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad config: {exc}") from None

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot load config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(data, base=path.parent)

    def with_overrides(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def pipeline_from_dict(data: dict, base: Path = Path(".")) -> PipelineConfig:
    kwargs = {}
    for key, value in data.items():
        if key == "stop_words_file":
            kwargs["stop_words"] = load_word_list(base / value)
        elif key == "abbreviations_file":
            kwargs["sentence_abbreviations"] = load_word_list(base / value)
        elif key == "stop_words":
            kwargs["stop_words"] = frozenset(value)
        elif key == "sentence_abbreviations":
            kwargs["sentence_abbreviations"] = frozenset(value)
        elif key in ("stemmer", "min_token_length"):
            kwargs[key] = value
        else:
            raise ConfigError(f"unknown pipeline key {key!r}")
    return PipelineConfig(**kwargs)


@dataclass
class Report:
    tool: dict
    input_digest: str
    config: dict
    corpus: dict
    ngrams: dict
    topics: list
    seven_s: dict
    caveats: list

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(**{f.name: data[f.name] for f in fields(cls)})

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except ReviewgramError as exc:
        raise PipelineError(name, exc) from exc


def corpus_digest(corpus: Corpus) -> str:
    lines = [json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True) for r in corpus.records]
    return _sha256("\n".join(lines))


def _ngram_rows(table: NgramTable, n: int, k: int, min_count: int) -> list[dict]:
    rows = []
    for gram, count in top_ngrams(table, n, k, min_count):
        if n == 2:
            p = cond_prob_bigram(table, gram[0], gram[1])
        else:
            p = cond_prob_trigram(table, gram[0], gram[1], gram[2])
        rows.append({"ngram": list(gram), "count": count, "cond_prob": _r(p)})
    return rows


def run_pipeline(config: RunConfig) -> Report:
    with _stage("config"):
        config.validate()
        pipeline = config.pipeline
        dictionary = (
            load_topic_dictionary(config.topic_dictionary)
            if config.topic_dictionary
            else default_topic_dictionary()
        )
        mapping = (
            load_seven_s_mapping(config.seven_s_mapping)
            if config.seven_s_mapping
            else default_seven_s_mapping()
        )

    with _stage("ingest"):
        loaded = ingest(config.inputs, config.input_format, config.has_header)
    with _stage("dedup"):
        corpus = dedup(loaded)

    workers = config.workers
    with _stage("preprocess"):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_review = list(pool.map(lambda r: preprocess(r, pipeline), corpus.records))
        sentences = [s for group in per_review for s in group]

    with _stage("segment"):
        segments = segment(sentences, corpus)
    with _stage("count"):
        tables = {cls: build_table_parallel(segments[cls], workers) for cls in SEGMENTS}
    with _stage("topics"):
        profiles = extract_topics(tables, dictionary, pipeline, config.k, config.min_count)
    with _stage("7s"):
        assessment = map_7s(
            profiles, mapping, dictionary, config.strength_threshold, config.weakness_threshold
        )

    reviews_per_segment = {cls.value: 0 for cls in SEGMENTS}
    for record in corpus.records:
        reviews_per_segment[classify_rating(record.rating).value] += 1

    corpus_summary = {
        "input_rows": loaded.input_rows,
        "records_loaded": len(loaded.records),
        "records_kept": len(corpus.records),
        "rejected_total": len(corpus.rejected),
        "rejected_by_reason": corpus.rejected_by_reason(),
        "reviews_per_segment": reviews_per_segment,
        "sentences_per_segment": {cls.value: len(segments[cls]) for cls in SEGMENTS},
        "total_sentences": len(sentences),
    }

    ngrams = {}
    for cls in SEGMENTS:
        t = tables[cls]
        ngrams[cls.value] = {
            "sentence_count": t.sentence_count,
            "total_tokens": t.total_tokens,
            "vocabulary_size": len(t.unigram_counts),
            "bigrams": _ngram_rows(t, 2, config.k, config.min_count),
            "trigrams": _ngram_rows(t, 3, config.k, config.min_count),
        }

    seg_order = {cls: i for i, cls in enumerate(SEGMENTS)}
    topics = []
    for p in profiles:
        matched = sorted(p.matched_ngrams, key=lambda m: (seg_order[m[1]], -m[2], m[0]))
        topics.append(
            {
                "topic": p.topic,
                "description": p.description,
                "freq_per_kilosentence": {c.value: _r(p.freq_per_kilosentence[c]) for c in SEGMENTS},
                "polarity": _r(p.polarity),
                "dominant_class": p.dominant_class.value,
                "matched_ngrams": [
                    {"ngram": list(g), "segment": seg.value, "count": c} for g, seg, c in matched
                ],
            }
        )

    seven_s = {
        "elements": [
            {
                "name": el.name,
                "kind": el.kind,
                "verdict": el.verdict,
                "topics": list(el.topics),
                "polarities": [_r(x) for x in el.polarities],
            }
            for el in (assessment.elements[name] for name in SEVEN_S)
        ],
        "unmapped_topics": list(assessment.unmapped_topics),
        "thresholds": {
            "strength": _r(assessment.strength_threshold),
            "weakness": _r(assessment.weakness_threshold),
        },
    }

    caveats = [METHOD_CAVEAT]
    if any(el in ("Structure", "Systems") for el in mapping.values()):
        caveats.append(STRUCTURE_SYSTEMS_CAVEAT)

    config_echo = {
        "k": config.k,
        "min_count": config.min_count,
        "pipeline": {
            "stemmer": pipeline.stemmer,
            "min_token_length": pipeline.min_token_length,
            "stop_words_count": len(pipeline.stop_words),
            "stop_words_sha256": _sha256("\n".join(sorted(pipeline.stop_words))),
            "abbreviations_sha256": _sha256("\n".join(sorted(pipeline.sentence_abbreviations))),
        },
        "topic_dictionary": {
            "source": "custom" if config.topic_dictionary else "default",
            "sha256": _sha256(json.dumps(dictionary.to_dict(), sort_keys=True, ensure_ascii=False)),
            "topics": sorted(dictionary.topics),
        },
        "seven_s_mapping": dict(sorted(mapping.items())),
    }

    return Report(
        tool={"name": "reviewgram", "version": __version__},
        input_digest=corpus_digest(loaded),
        config=config_echo,
        corpus=corpus_summary,
        ngrams=ngrams,
        topics=topics,
        seven_s=seven_s,
        caveats=caveats,
    )


# --- markdown ---------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    out = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    out += ["| " + " | ".join(r) + " |" for r in rows]
    return out


def _esc(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


def render_markdown(report: Report) -> str:
    segs = [cls.value for cls in SEGMENTS]
    c = report.corpus
    lines = ["# Review Analysis Report", ""]
    lines += [f"Generated by {report.tool['name']} {report.tool['version']}. "
              f"Input digest `{report.input_digest[:16]}`.", ""]

    lines += ["## Corpus Summary", ""]
    rows = [
        ["Input rows", str(c["input_rows"])],
        ["Records kept", str(c["records_kept"])],
        ["Records rejected", str(c["rejected_total"])],
    ]
    rows += [[f"Rejected: {reason}", str(n)] for reason, n in c["rejected_by_reason"].items()]
    rows += [["Total sentences", str(c["total_sentences"])]]
    lines += _table(["Item", "Value"], rows) + [""]
    lines += _table(
        ["Segment", "Reviews", "Sentences"],
        [[s, str(c["reviews_per_segment"][s]), str(c["sentences_per_segment"][s])] for s in segs],
    ) + [""]

    lines += ["## Top N-grams per Segment", ""]
    k, min_count = report.config["k"], report.config["min_count"]
    lines += [f"Top {k} by count, minimum count {min_count}. P is the MLE probability of the "
              "last token given the preceding ones.", ""]
    for s in segs:
        seg = report.ngrams[s]
        lines += [f"### {s} ({seg['sentence_count']} sentences, {seg['total_tokens']} tokens)", ""]
        for label in ("bigrams", "trigrams"):
            rows = [[" ".join(r["ngram"]), str(r["count"]), f"{r['cond_prob']:.3f}"] for r in seg[label]]
            if rows:
                lines += _table([label[:-1].capitalize(), "Count", "P"], rows) + [""]
            else:
                lines += [f"No {label} reach the minimum count.", ""]

    lines += ["## Key Topics", ""]
    if report.topics:
        rows = [
            [
                t["topic"],
                *(_fmt(t["freq_per_kilosentence"][s]) for s in segs),
                f"{t['polarity']:+.3f}",
                t["dominant_class"],
                _esc(t["description"]),
            ]
            for t in report.topics
        ]
        lines += _table(
            ["Topic", "Negative /1k", "Neutral /1k", "Positive /1k", "Polarity", "Dominant", "Description"],
            rows,
        )
    else:
        lines += ["No topic was matched in the positive or negative segment."]
    lines += [""]

    lines += ["## 7S Assessment", ""]
    th = report.seven_s["thresholds"]
    lines += [f"Strength: every supporting topic polarity > {th['strength']:+.2f}. "
              f"Weakness: every polarity < {th['weakness']:+.2f}. Otherwise mixed.", ""]
    rows = [
        [el["name"], el["kind"], el["verdict"], ", ".join(el["topics"]) or "-"]
        for el in report.seven_s["elements"]
    ]
    lines += _table(["Element", "Kind", "Verdict", "Supporting topics"], rows) + [""]

    lines += ["## Unmapped Topics", ""]
    unmapped = report.seven_s["unmapped_topics"]
    lines += ([f"- {t}" for t in unmapped] if unmapped else ["None."]) + [""]

    lines += ["## Caveats", ""]
    lines += [f"- {text}" for text in report.caveats] + [""]
    return "\n".join(lines)


def write_outputs(report: Report, out_dir, emit=EMIT_FORMATS) -> list[Path]:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        if "json" in emit:
            path = out_dir / "report.json"
            path.write_text(report.to_json(), encoding="utf-8", newline="\n")
            written.append(path)
        if "markdown" in emit:
            path = out_dir / "report.md"
            path.write_text(render_markdown(report), encoding="utf-8", newline="\n")
            written.append(path)
    except OSError as exc:
        raise PipelineError("write", InputError(f"cannot write to {out_dir}: {exc}")) from exc
    return written
