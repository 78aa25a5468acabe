"""Rating segmentation, key-topic extraction and the 7S assessment."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .corpus import Corpus
from .errors import ConfigError, ConsistencyError
from .ngram import NgramTable, top_ngrams
from .textprep import PipelineConfig, ProcessedSentence, normalize_phrase, tokenize


class SentimentClass(str, Enum):
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    POSITIVE = "Positive"


SEGMENTS = (SentimentClass.NEGATIVE, SentimentClass.NEUTRAL, SentimentClass.POSITIVE)


def classify_rating(rating: int) -> SentimentClass:
    """1-2 stars negative, 3 neutral, 4-5 positive."""
    if isinstance(rating, bool) or not isinstance(rating, int) or not 1 <= rating <= 5:
        raise ValueError(f"rating must be an integer in 1..5, got {rating!r}")
    if rating <= 2:
        return SentimentClass.NEGATIVE
    if rating == 3:
        return SentimentClass.NEUTRAL
    return SentimentClass.POSITIVE


def segment(
    sentences: Iterable[ProcessedSentence], corpus: Corpus
) -> dict[SentimentClass, list[ProcessedSentence]]:
    ratings = {r.review_id: r.rating for r in corpus.records}
    out: dict[SentimentClass, list[ProcessedSentence]] = {c: [] for c in SEGMENTS}
    for s in sentences:
        try:
            rating = ratings[s.review_id]
        except KeyError:
            raise ConsistencyError(f"sentence refers to unknown review {s.review_id!r}") from None
        out[classify_rating(rating)].append(s)
    return out


# --- topic dictionary -------------------------------------------------------


@dataclass(frozen=True)
class Topic:
    name: str
    seeds: tuple[str, ...]
    description: str = ""


@dataclass(frozen=True)
class TopicDictionary:
    topics: dict  # name -> Topic

    def __post_init__(self):
        if not self.topics:
            raise ConfigError("topic dictionary is empty")
        for name, topic in self.topics.items():
            if not topic.seeds:
                raise ConfigError(f"topic {name!r} has no seed phrases")
            for seed in topic.seeds:
                if not 1 <= len(tokenize(seed)) <= 3:
                    raise ConfigError(f"seed {seed!r} of topic {name!r} must be 1-3 words")

    @classmethod
    def from_dict(cls, data: Mapping) -> "TopicDictionary":
        try:
            raw = data["topics"]
            topics = {
                name: Topic(name, tuple(spec["seeds"]), spec.get("description", ""))
                for name, spec in raw.items()
            }
        except (KeyError, TypeError, AttributeError) as exc:
            raise ConfigError(f"malformed topic dictionary: {exc!r}") from None
        return cls(topics)

    def to_dict(self) -> dict:
        return {
            "topics": {
                name: {"seeds": list(t.seeds), "description": t.description}
                for name, t in sorted(self.topics.items())
            }
        }

    def normalized_seeds(self, config: PipelineConfig) -> dict[str, tuple[tuple[str, ...], ...]]:
        """Seeds run through the same token pipeline as the corpus."""
        out = {}
        for name, topic in self.topics.items():
            seeds = []
            for seed in topic.seeds:
                norm = normalize_phrase(seed, config)
                if not norm:
                    raise ConfigError(
                        f"seed {seed!r} of topic {name!r} is empty after preprocessing"
                    )
                if norm not in seeds:
                    seeds.append(norm)
            out[name] = tuple(seeds)
        return out


def _load_json(path, what: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load {what} {path}: {exc}") from exc


def load_topic_dictionary(path) -> TopicDictionary:
    return TopicDictionary.from_dict(_load_json(path, "topic dictionary"))


def default_topic_dictionary() -> TopicDictionary:
    text = resources.files("reviewgram").joinpath("data").joinpath("topics.json").read_text("utf-8")
    return TopicDictionary.from_dict(json.loads(text))


# --- topic extraction -------------------------------------------------------


@dataclass(frozen=True)
class TopicProfile:
    topic: str
    matched_ngrams: tuple  # of (ngram tuple, SentimentClass, count)
    freq_per_kilosentence: dict  # SentimentClass -> float
    polarity: float
    dominant_class: SentimentClass
    description: str = ""


def polarity(positive_rate: float, negative_rate: float) -> Optional[float]:
    """(p - n) / (p + n); None when neither segment mentions the topic."""
    total = positive_rate + negative_rate
    if total <= 0:
        return None
    return (positive_rate - negative_rate) / total


def dominant_class(rates: Mapping[SentimentClass, float]) -> SentimentClass:
    best = max(rates.values())
    winners = [c for c in SEGMENTS if rates[c] == best]
    return winners[0] if len(winners) == 1 else SentimentClass.NEUTRAL


def contains_phrase(ngram: tuple, phrase: tuple) -> bool:
    n = len(phrase)
    return any(ngram[i : i + n] == phrase for i in range(len(ngram) - n + 1))


def candidate_ngrams(table: NgramTable, k: int, min_count: int) -> list[tuple[tuple, int]]:
    """Top-k bigrams and trigrams plus every unigram reaching ``min_count``."""
    unigrams = sorted(
        ((w,), c) for w, c in table.unigram_counts.items() if c >= min_count
    )
    return unigrams + top_ngrams(table, 2, k, min_count) + top_ngrams(table, 3, k, min_count)


def extract_topics(
    tables: Mapping[SentimentClass, NgramTable],
    dictionary: TopicDictionary,
    config: Optional[PipelineConfig] = None,
    k: int = 25,
    min_count: int = 3,
) -> list[TopicProfile]:
    """Match each segment's candidate n-grams against the dictionary seeds.

    A candidate matches a topic when it contains one of the topic's normalized
    seeds as a contiguous run. Rates are matched occurrences per thousand
    sentences of the segment. Topics never matched in the positive or
    negative segment are left out. Output is sorted by topic name.
    """
    if dictionary is None or not dictionary.topics:
        raise ConfigError("topic dictionary is empty")
    config = config or PipelineConfig()
    seeds = dictionary.normalized_seeds(config)

    matched: dict[str, list] = {name: [] for name in seeds}
    for cls in SEGMENTS:
        table = tables.get(cls) or NgramTable()
        for gram, count in candidate_ngrams(table, k, min_count):
            for name, phrases in seeds.items():
                if any(contains_phrase(gram, p) for p in phrases):
                    matched[name].append((gram, cls, count))

    profiles = []
    for name in sorted(matched):
        rates = {}
        for cls in SEGMENTS:
            n_sent = (tables.get(cls) or NgramTable()).sentence_count
            hits = sum(c for _, seg, c in matched[name] if seg == cls)
            rates[cls] = hits / n_sent * 1000 if n_sent else 0.0
        pol = polarity(rates[SentimentClass.POSITIVE], rates[SentimentClass.NEGATIVE])
        if pol is None:
            continue
        profiles.append(
            TopicProfile(
                topic=name,
                matched_ngrams=tuple(matched[name]),
                freq_per_kilosentence=rates,
                polarity=pol,
                dominant_class=dominant_class(rates),
                description=dictionary.topics[name].description,
            )
        )
    return profiles


# --- 7S assessment ----------------------------------------------------------

HARD_ELEMENTS = ("Strategy", "Structure", "Systems")
SOFT_ELEMENTS = ("SharedValues", "Skills", "Style", "Staff")
SEVEN_S = HARD_ELEMENTS + SOFT_ELEMENTS

STRENGTH = "strength"
WEAKNESS = "weakness"
MIXED = "mixed"
NO_EVIDENCE = "no-evidence"


def canonical_element(name: str) -> str:
    """Accept "Shared Values"/"shared values" spellings; reject anything else."""
    squashed = "".join(name.split()).lower()
    for element in SEVEN_S:
        if element.lower() == squashed:
            return element
    raise ConfigError(f"{name!r} is not one of the 7S elements {SEVEN_S}")


def load_seven_s_mapping(path) -> dict[str, str]:
    data = _load_json(path, "7S mapping")
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise ConfigError(f"7S mapping {path} must be a JSON object of topic -> element")
    return {topic: canonical_element(el) for topic, el in data.items()}


def default_seven_s_mapping() -> dict[str, str]:
    text = resources.files("reviewgram").joinpath("data").joinpath("seven_s.json").read_text("utf-8")
    return {t: canonical_element(e) for t, e in json.loads(text).items()}


@dataclass(frozen=True)
class ElementAssessment:
    name: str
    kind: str  # "hard" | "soft"
    topics: tuple[str, ...]
    polarities: tuple[float, ...]
    verdict: str


@dataclass(frozen=True)
class SevenSAssessment:
    elements: dict  # element name -> ElementAssessment, canonical order
    unmapped_topics: tuple[str, ...] = ()
    strength_threshold: float = 0.2
    weakness_threshold: float = -0.2


def verdict(polarities: Iterable[float], strength: float = 0.2, weakness: float = -0.2) -> str:
    polarities = list(polarities)
    if not polarities:
        return NO_EVIDENCE
    if all(p > strength for p in polarities):
        return STRENGTH
    if all(p < weakness for p in polarities):
        return WEAKNESS
    return MIXED


def map_7s(
    profiles: Iterable[TopicProfile],
    mapping: Mapping[str, str],
    dictionary: Optional[TopicDictionary] = None,
    strength: float = 0.2,
    weakness: float = -0.2,
) -> SevenSAssessment:
    if weakness > strength:
        raise ConfigError("weakness threshold must not exceed strength threshold")
    mapping = {topic: canonical_element(el) for topic, el in mapping.items()}
    if dictionary is not None:
        unknown = sorted(set(mapping) - set(dictionary.topics))
        if unknown:
            raise ConfigError(f"7S mapping names topics missing from the dictionary: {unknown}")

    members: dict[str, list[TopicProfile]] = {el: [] for el in SEVEN_S}
    unmapped = []
    for profile in sorted(profiles, key=lambda p: p.topic):
        element = mapping.get(profile.topic)
        if element is None:
            unmapped.append(profile.topic)
        else:
            members[element].append(profile)

    elements = {}
    for el in SEVEN_S:
        pols = tuple(p.polarity for p in members[el])
        elements[el] = ElementAssessment(
            name=el,
            kind="hard" if el in HARD_ELEMENTS else "soft",
            topics=tuple(p.topic for p in members[el]),
            polarities=pols,
            verdict=verdict(pols, strength, weakness),
        )
    return SevenSAssessment(elements, tuple(unmapped), strength, weakness)
