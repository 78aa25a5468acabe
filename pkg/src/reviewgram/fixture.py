"""Seeded synthetic review corpus.

The default run emits 200 reviews: 100 positive (4-5 stars), 60 negative
(1-2), 40 neutral (3). Twelve of them are planted duplicates of earlier
reviews (same rating, same text up to case and whitespace) under fresh ids:
6 positive, 4 negative, 2 neutral.

Planting rates, per review of the given class:

    "friendly staff"        positive 0.45
    "great pilot"           positive 0.35
    "long wait"             negative 0.45
    "cancellation refund"   negative 0.25
    staff mentions          negative 0.10 (rude/rushed staff)
    waiting-area praise     positive 0.05
    schedule delays         negative 0.30; on-schedule praise positive 0.10

Every other sentence comes from class-specific filler pools.
"""

from __future__ import annotations

import random
from typing import Optional

from .corpus import ReviewRecord

POSITIVE_PLANTS = (
    (0.45, "Friendly staff made us feel welcome from check-in to landing."),
    (0.35, "Great pilot who pointed out every landmark along the river."),
    (0.05, "The waiting area was comfortable and had cold drinks."),
    (0.10, "We left right on schedule and landed on time."),
)

NEGATIVE_PLANTS = (
    (0.45, "There was a long wait before anyone told us what was happening."),
    (0.25, "The cancellation refund took two months to arrive."),
    (0.10, "Staff seemed rushed and ignored our questions."),
    (0.30, "Our flight was delayed twice with no explanation."),
)

POSITIVE_FILLER = (
    "The views over the city were breathtaking.",
    "Booking online was quick and simple.",
    "The safety briefing was thorough and reassuring.",
    "Smooth takeoff and an even smoother landing.",
    "Worth every penny for a birthday surprise.",
    "The headsets made it easy to hear the commentary.",
    "We got a discount for booking as a group.",
    "My kids still talk about the ride.",
    "The helicopter was spotless inside.",
    "Highly recommend the sunset tour.",
    "Everything was organized perfectly.",
    "An unforgettable experience overall.",
    "Friendly, helpful staff answered every question.",
    "A friendly, helpful pilot kept everyone calm.",
)

NEGATIVE_FILLER = (
    "The windows were scratched and hard to see through.",
    "The ride felt much shorter than advertised.",
    "Nobody answered the phone when we called.",
    "Far too expensive for what you get.",
    "The seats were worn and the cabin smelled of fuel.",
    "Check-in was chaotic and disorganized.",
    "They asked for our weight in front of everyone.",
    "I would not book this again.",
    "Parking was a nightmare.",
    "Noise in the cabin was unbearable.",
)

NEUTRAL_FILLER = (
    "The flight was fine but nothing special.",
    "Average experience for the price.",
    "Short ride over the harbor.",
    "Check-in took about twenty minutes.",
    "The weather was cloudy during our trip.",
    "Decent tour if you have time.",
    "Prices are about what you would expect.",
    "It was okay overall.",
    "We went on a weekday afternoon.",
    "The photos from the ride came out alright.",
)

DETAILS = (
    "We went in {month}.",
    "This was our {nth} trip with them.",
    "Party of {n}.",
    "Flew with them in {month} with {n} friends.",
)
MONTHS = (
    "January", "February", "March", "April", "May", "June", "July",
    "August", "September", "October", "November", "December",
)
NTH = ("first", "second", "third", "fourth", "fifth")

# per-class (unique reviews, planted duplicates)
DEFAULT_PLAN = {"positive": (94, 6), "negative": (56, 4), "neutral": (38, 2)}


def _sentences(rng: random.Random, plants, filler, n_filler: tuple[int, int]) -> list[str]:
    out = [text for rate, text in plants if rng.random() < rate]
    out += rng.sample(filler, rng.randint(*n_filler))
    rng.shuffle(out)
    detail = rng.choice(DETAILS).format(
        month=rng.choice(MONTHS), nth=rng.choice(NTH), n=rng.randint(2, 9)
    )
    out.append(detail)
    return out


def _review_text(rng: random.Random, kind: str) -> str:
    if kind == "positive":
        parts = _sentences(rng, POSITIVE_PLANTS, POSITIVE_FILLER, (1, 3))
    elif kind == "negative":
        parts = _sentences(rng, NEGATIVE_PLANTS, NEGATIVE_FILLER, (1, 3))
    else:
        parts = _sentences(rng, (), NEUTRAL_FILLER, (1, 3))
    return " ".join(parts)


def _rating(rng: random.Random, kind: str) -> int:
    if kind == "positive":
        return rng.choice((4, 5, 5))
    if kind == "negative":
        return rng.choice((1, 1, 2))
    return 3


def _mangle(rng: random.Random, text: str) -> str:
    """A copy that the dedup rule still considers identical."""
    choice = rng.randrange(3)
    if choice == 0:
        return text.upper()
    if choice == 1:
        return "  " + text.replace(" ", "   ", 2) + " "
    return text


def generate(seed: int = 7, plan: Optional[dict] = None) -> list[ReviewRecord]:
    """Deterministic for a given seed and plan."""
    rng = random.Random(seed)
    plan = plan or DEFAULT_PLAN

    unique: list[tuple[str, int, str]] = []
    seen = set()
    for kind, (n_unique, _) in plan.items():
        made = 0
        while made < n_unique:
            text = _review_text(rng, kind)
            rating = _rating(rng, kind)
            key = (rating, " ".join(text.split()).casefold())
            if key in seen:
                continue
            seen.add(key)
            unique.append((kind, rating, text))
            made += 1
    rng.shuffle(unique)

    rows = list(unique)
    for kind, (_, n_dup) in plan.items():
        pool = [row for row in unique if row[0] == kind]
        for original in rng.sample(pool, n_dup):
            at = rng.randint(rows.index(original) + 1, len(rows))
            rows.insert(at, (kind, original[1], _mangle(rng, original[2])))

    return [
        ReviewRecord(f"r{i:04d}", rating, text, source="synthetic")
        for i, (_, rating, text) in enumerate(rows, start=1)
    ]
