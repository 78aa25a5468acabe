"""Exact n-gram counts and unsmoothed maximum-likelihood probabilities.

Counts never span sentence boundaries and no padding symbols are added.
Conditional probabilities divide by the summed counts of all continuations of
the history, so a history that only ever ends a sentence has no defined
conditional and raises ``UnseenHistoryError``.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Sequence

from .errors import UndefinedModelError, UnseenHistoryError

Ngram = tuple  # tuple[str, ...]


def _tokens(sentence) -> Sequence[str]:
    return sentence.tokens if hasattr(sentence, "tokens") else sentence


@dataclass(frozen=True)
class NgramTable:
    unigram_counts: dict = field(default_factory=dict)
    bigram_counts: dict = field(default_factory=dict)
    trigram_counts: dict = field(default_factory=dict)
    total_tokens: int = 0
    total_bigram_positions: int = 0
    total_trigram_positions: int = 0
    sentence_count: int = 0

    def counts(self, n: int) -> dict:
        if n == 1:
            return self.unigram_counts
        if n == 2:
            return self.bigram_counts
        if n == 3:
            return self.trigram_counts
        raise ValueError(f"n must be 1, 2 or 3, got {n}")

    @cached_property
    def _bigram_history_totals(self) -> dict:
        totals: Counter = Counter()
        for (w, _), c in self.bigram_counts.items():
            totals[w] += c
        return dict(totals)

    @cached_property
    def _trigram_history_totals(self) -> dict:
        totals: Counter = Counter()
        for (a, b, _), c in self.trigram_counts.items():
            totals[(a, b)] += c
        return dict(totals)

    def continuation_total(self, history: Sequence[str]) -> int:
        """Sum of counts over every token that follows ``history``."""
        history = tuple(history)
        if len(history) == 1:
            return self._bigram_history_totals.get(history[0], 0)
        if len(history) == 2:
            return self._trigram_history_totals.get(history, 0)
        raise ValueError("history must hold 1 or 2 tokens")

    def continuations(self, history: Sequence[str]) -> list[str]:
        history = tuple(history)
        table = self.counts(len(history) + 1)
        return sorted(g[-1] for g in table if g[:-1] == history)

    def to_dict(self) -> dict:
        def entries(counts, key):
            return [[list(g) if isinstance(g, tuple) else g, c] for g, c in sorted(counts.items(), key=key)]

        return {
            "sentence_count": self.sentence_count,
            "total_tokens": self.total_tokens,
            "total_bigram_positions": self.total_bigram_positions,
            "total_trigram_positions": self.total_trigram_positions,
            "unigrams": entries(self.unigram_counts, lambda kv: kv[0]),
            "bigrams": entries(self.bigram_counts, lambda kv: kv[0]),
            "trigrams": entries(self.trigram_counts, lambda kv: kv[0]),
        }

    def to_json(self) -> str:
        """Canonical form: byte-equal for equal tables."""
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "NgramTable":
        return cls(
            unigram_counts={g: c for g, c in data["unigrams"]},
            bigram_counts={tuple(g): c for g, c in data["bigrams"]},
            trigram_counts={tuple(g): c for g, c in data["trigrams"]},
            total_tokens=data["total_tokens"],
            total_bigram_positions=data["total_bigram_positions"],
            total_trigram_positions=data["total_trigram_positions"],
            sentence_count=data["sentence_count"],
        )

    @classmethod
    def from_json(cls, text: str) -> "NgramTable":
        return cls.from_dict(json.loads(text))


def build_table(sentences: Iterable) -> NgramTable:
    """Count every within-sentence 1-, 2- and 3-gram.

    Accepts ``ProcessedSentence`` objects or plain token sequences.
    """
    uni: Counter = Counter()
    bi: Counter = Counter()
    tri: Counter = Counter()
    n_sent = 0
    for sentence in sentences:
        toks = tuple(_tokens(sentence))
        n_sent += 1
        uni.update(toks)
        bi.update(zip(toks, toks[1:]))
        tri.update(zip(toks, toks[1:], toks[2:]))
    return NgramTable(
        unigram_counts=dict(uni),
        bigram_counts=dict(bi),
        trigram_counts=dict(tri),
        total_tokens=sum(uni.values()),
        total_bigram_positions=sum(bi.values()),
        total_trigram_positions=sum(tri.values()),
        sentence_count=n_sent,
    )


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def merge(a: NgramTable, b: NgramTable) -> NgramTable:
    """Pointwise sum of two tables built from disjoint sentence sets."""
    return NgramTable(
        unigram_counts=_add(a.unigram_counts, b.unigram_counts),
        bigram_counts=_add(a.bigram_counts, b.bigram_counts),
        trigram_counts=_add(a.trigram_counts, b.trigram_counts),
        total_tokens=a.total_tokens + b.total_tokens,
        total_bigram_positions=a.total_bigram_positions + b.total_bigram_positions,
        total_trigram_positions=a.total_trigram_positions + b.total_trigram_positions,
        sentence_count=a.sentence_count + b.sentence_count,
    )


def build_table_parallel(sentences: Sequence, workers: int = 1, shards: int | None = None) -> NgramTable:
    """Count shards concurrently and fold them with ``merge``.

    The result equals ``build_table(sentences)`` whatever the worker or shard count.
    """
    sentences = list(sentences)
    shards = shards or max(1, workers)
    if shards <= 1 or len(sentences) < 2:
        return build_table(sentences)
    size = -(-len(sentences) // shards)
    chunks = [sentences[i : i + size] for i in range(0, len(sentences), size)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        tables = list(pool.map(build_table, chunks))
    return reduce(merge, tables, NgramTable())


def prob_unigram(table: NgramTable, w: str) -> float:
    if table.total_tokens == 0:
        raise UndefinedModelError("unigram probability requested from an empty table")
    return table.unigram_counts.get(w, 0) / table.total_tokens


def cond_prob_bigram(table: NgramTable, w_prev: str, w: str) -> float:
    """P(w | w_prev) = c(w_prev w) / sum_x c(w_prev x)."""
    total = table.continuation_total((w_prev,))
    if total == 0:
        raise UnseenHistoryError((w_prev,))
    return table.bigram_counts.get((w_prev, w), 0) / total


def cond_prob_trigram(table: NgramTable, w_2: str, w_1: str, w: str) -> float:
    """P(w | w_2 w_1) = c(w_2 w_1 w) / sum_x c(w_2 w_1 x)."""
    total = table.continuation_total((w_2, w_1))
    if total == 0:
        raise UnseenHistoryError((w_2, w_1))
    return table.trigram_counts.get((w_2, w_1, w), 0) / total


def joint_prob(table: NgramTable, words: Sequence[str], order: str = "bigram") -> float:
    """Chain-rule probability of a token sequence under a Markov approximation.

    ``order="bigram"`` conditions each word on its predecessor; ``"trigram"``
    uses P(w1) P(w2|w1) and then two-word histories.
    """
    words = list(words)
    if not words:
        raise ValueError("need at least one word")
    if order not in ("bigram", "trigram"):
        raise ValueError(f"order must be 'bigram' or 'trigram', got {order!r}")
    p = prob_unigram(table, words[0])
    for i in range(1, len(words)):
        try:
            if order == "trigram" and i >= 2:
                p *= cond_prob_trigram(table, words[i - 2], words[i - 1], words[i])
            else:
                p *= cond_prob_bigram(table, words[i - 1], words[i])
        except UnseenHistoryError as exc:
            raise UnseenHistoryError(exc.history, position=i) from None
    return p


def top_ngrams(table: NgramTable, n: int, k: int, min_count: int = 1) -> list[tuple[Ngram, int]]:
    """The ``k`` most frequent n-grams with count >= ``min_count``.

    Ties are broken by the token sequence, lexicographically.
    """
    if n not in (2, 3):
        raise ValueError("n must be 2 or 3")
    if k < 1 or min_count < 1:
        raise ValueError("k and min_count must be positive")
    ranked = sorted(
        ((g, c) for g, c in table.counts(n).items() if c >= min_count),
        key=lambda gc: (-gc[1], gc[0]),
    )
    return ranked[:k]
