"""Sentence splitting, tokenizing, stop-word filtering and stemming."""

from __future__ import annotations

import re
from functools import cache
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .corpus import ReviewRecord
from .errors import ConfigError
from .porter import stem as porter_stem

STEMMERS = ("porter", "none")

# letter/digit runs; an apostrophe survives only between two letters
TOKEN_RE = re.compile(r"[^\W_]+(?:(?<=[^\W\d_])['’](?=[^\W\d_])[^\W_]+)*")
_BOUNDARY_RE = re.compile(r"[.!?](?=\s)")


def load_word_list(path) -> frozenset[str]:
    """One entry per line, ``#`` starts a comment, blank lines ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read word list {path}: {exc}") from exc
    return _parse_word_list(text)


def _parse_word_list(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


def _bundled(name: str) -> frozenset[str]:
    return _parse_word_list(resources.files("reviewgram").joinpath("data").joinpath(name).read_text("utf-8"))


@cache
def default_stop_words() -> frozenset[str]:
    return _bundled("stopwords.txt")


@cache
def default_abbreviations() -> frozenset[str]:
    return _bundled("abbreviations.txt")


@dataclass(frozen=True)
class PipelineConfig:
    stop_words: frozenset = field(default_factory=default_stop_words)
    stemmer: str = "porter"
    min_token_length: int = 2
    sentence_abbreviations: frozenset = field(default_factory=default_abbreviations)

    def __post_init__(self):
        if self.stemmer not in STEMMERS:
            raise ConfigError(f"stemmer must be one of {STEMMERS}, got {self.stemmer!r}")
        if self.min_token_length < 1:
            raise ConfigError("min_token_length must be >= 1")
        if any(w != w.lower() for w in self.stop_words):
            raise ConfigError("stop words must be lowercase")
        object.__setattr__(self, "stop_words", frozenset(self.stop_words))
        object.__setattr__(
            self, "sentence_abbreviations", frozenset(a.lower() for a in self.sentence_abbreviations)
        )

    def stem(self, token: str) -> str:
        return porter_stem(token) if self.stemmer == "porter" else token


@dataclass(frozen=True)
class ProcessedSentence:
    review_id: str
    sentence_index: int
    tokens: tuple[str, ...]
    raw: str


def split_sentences(text: str, config: Optional[PipelineConfig] = None) -> list[str]:
    """Break after ``.``, ``!`` or ``?`` followed by whitespace.

    A period closing a known abbreviation (``p.m.``, ``e.g.``) does not end
    the sentence. Whitespace at each break is dropped; nothing else is.
    """
    abbreviations = (config or PipelineConfig()).sentence_abbreviations
    sentences = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        end = m.end()
        if text[end - 1] == "." and _last_word(text, start, end) in abbreviations:
            continue
        sentences.append(text[start:end])
        start = end
    sentences.append(text[start:])
    return [s.strip() for s in sentences if s.strip()]


def _last_word(text: str, start: int, end: int) -> str:
    word = text[start:end].split()[-1]
    return word.lstrip("\"'([{“‘").lower()


def tokenize(sentence: str) -> list[str]:
    return TOKEN_RE.findall(sentence)


def normalize_tokens(raw_tokens, config: PipelineConfig) -> list[str]:
    """Lowercase, drop stop words and short tokens, stem.

    Stop words and length are checked again after stemming, since a stem can
    land on a stop word ("wills" -> "will") or get shorter ("ies" -> "i").
    A possessive "s" removed by the stemmer leaves a dangling apostrophe
    ("pilot's" -> "pilot'"), which is trimmed.
    """
    out = []
    for tok in raw_tokens:
        tok = tok.lower().replace("’", "'")
        if tok in config.stop_words or len(tok) < config.min_token_length:
            continue
        tok = config.stem(tok).rstrip("'")
        if tok in config.stop_words or len(tok) < config.min_token_length:
            continue
        out.append(tok)
    return out


def normalize_phrase(phrase: str, config: PipelineConfig) -> tuple[str, ...]:
    """Apply the token pipeline to a free-standing phrase such as a topic seed."""
    return tuple(normalize_tokens(tokenize(phrase), config))


def preprocess(record: ReviewRecord, config: Optional[PipelineConfig] = None) -> list[ProcessedSentence]:
    config = config or PipelineConfig()
    out = []
    seen = set()
    for index, raw in enumerate(split_sentences(record.text, config)):
        tokens = tuple(normalize_tokens(tokenize(raw), config))
        if not tokens or tokens in seen:
            continue
        seen.add(tokens)
        out.append(ProcessedSentence(record.review_id, index, tokens, raw))
    return out


def stem(token: str) -> str:
    return porter_stem(token)
