"""Loading, validating and de-duplicating star-rated review records.

Both loaders funnel raw rows through the same validator, so a CSV file and a
JSONL file carrying the same data produce equal ``Corpus`` values.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import itertools
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import EmptyCorpusError, InputError

CSV_COLUMNS = ("review_id", "rating", "text", "source", "date")

# rejection reasons
PARSE_ERROR = "parse error"
INVALID_UTF8 = "invalid utf-8"
MISSING_ID = "missing review_id"
MISSING_TEXT = "missing text"
MISSING_RATING = "missing rating"
RATING_NOT_INT = "rating not an integer"
RATING_OUT_OF_RANGE = "rating out of range"
INVALID_DATE = "invalid date"
DUPLICATE_ID = "duplicate id"
DUPLICATE = "duplicate"

_WS = re.compile(r"\s+")
_INT = re.compile(r"[+-]?\d+")


@dataclass(frozen=True)
class ReviewRecord:
    review_id: str
    rating: int
    text: str
    source: Optional[str] = None
    date: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "review_id": self.review_id,
            "rating": self.rating,
            "text": self.text,
            "source": self.source,
            "date": self.date,
        }


@dataclass(frozen=True)
class Rejection:
    """A row that did not become a record.

    ``index`` is the 0-based position of the row among the input rows (header
    excluded). ``raw`` is kept for auditing but ignored by equality, since the
    same bad row looks different in CSV and JSONL.
    """

    index: int
    reason: str
    raw: str = field(default="", compare=False)


@dataclass(frozen=True)
class Corpus:
    records: tuple[ReviewRecord, ...]
    rejected: tuple[Rejection, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    @property
    def input_rows(self) -> int:
        return len(self.records) + len(self.rejected)

    def by_id(self) -> dict[str, ReviewRecord]:
        return {r.review_id: r for r in self.records}

    def rejected_by_reason(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for rej in self.rejected:
            out[rej.reason] = out.get(rej.reason, 0) + 1
        return dict(sorted(out.items()))


def dedup_key(record: ReviewRecord) -> tuple[int, str]:
    """Rating plus text trimmed, whitespace-collapsed and case-folded."""
    return record.rating, _WS.sub(" ", record.text.strip()).casefold()


class _Invalid(Exception):
    def __init__(self, reason: str):
        self.reason = reason


def _has_surrogates(s: str) -> bool:
    # bytes that failed utf-8 decoding survive as lone surrogates (surrogateescape)
    return any("\udc80" <= ch <= "\udcff" for ch in s)


def _optional(value) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str):
        raise _Invalid(PARSE_ERROR)
    value = value.strip()
    return value or None


def _parse_rating(value) -> int:
    if value is None or (isinstance(value, str) and not value.strip()):
        raise _Invalid(MISSING_RATING)
    if isinstance(value, bool):
        raise _Invalid(RATING_NOT_INT)
    if isinstance(value, int):
        rating = value
    elif isinstance(value, str) and _INT.fullmatch(value.strip()):
        rating = int(value.strip())
    else:
        raise _Invalid(RATING_NOT_INT)
    if not 1 <= rating <= 5:
        raise _Invalid(RATING_OUT_OF_RANGE)
    return rating


def _validate(row: dict) -> ReviewRecord:
    for v in row.values():
        if isinstance(v, str) and _has_surrogates(v):
            raise _Invalid(INVALID_UTF8)
    review_id = row.get("review_id")
    if isinstance(review_id, int) and not isinstance(review_id, bool):
        review_id = str(review_id)
    if not isinstance(review_id, str) or not review_id.strip():
        raise _Invalid(MISSING_ID)
    text = row.get("text")
    if text is not None and not isinstance(text, str):
        raise _Invalid(PARSE_ERROR)
    if text is None or not text.strip():
        raise _Invalid(MISSING_TEXT)
    rating = _parse_rating(row.get("rating"))
    source = _optional(row.get("source"))
    date = _optional(row.get("date"))
    if date is not None:
        try:
            dt.date.fromisoformat(date)
        except ValueError:
            raise _Invalid(INVALID_DATE) from None
    return ReviewRecord(review_id.strip(), rating, text, source, date)


class _Builder:
    """Accumulates rows in input order.

    Rejects content duplicates (first occurrence wins) and id clashes as it
    goes, so every loaded corpus already satisfies the dedup rule.
    """

    def __init__(self) -> None:
        self.records: list[ReviewRecord] = []
        self.rejected: list[Rejection] = []
        self._ids: set[str] = set()
        self._keys: set[tuple[int, str]] = set()
        self._index = 0

    def add(self, row: Optional[dict], raw: str, reason: Optional[str] = None) -> None:
        index = self._index
        self._index += 1
        if reason is None:
            try:
                record = _validate(row or {})
            except _Invalid as exc:
                reason = exc.reason
            else:
                key = dedup_key(record)
                if key in self._keys:
                    reason = DUPLICATE
                elif record.review_id in self._ids:
                    reason = DUPLICATE_ID
                else:
                    self._ids.add(record.review_id)
                    self._keys.add(key)
                    self.records.append(record)
                    return
        self.rejected.append(Rejection(index, reason, raw))

    def build(self) -> Corpus:
        return Corpus(tuple(self.records), tuple(self.rejected))


def _read_text(path: Path) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return data.decode("utf-8", errors="surrogateescape").removeprefix("\ufeff")


def _csv_rows(builder: _Builder, path: Path, has_header: Optional[bool]) -> None:
    reader = csv.reader(io.StringIO(_read_text(path), newline=""))
    first = True
    for fields in reader:
        if not fields or all(not f.strip() for f in fields):
            continue
        if first:
            first = False
            looks_like_header = fields[0].strip().lower() == "review_id"
            if has_header or (has_header is None and looks_like_header):
                continue
        raw = _format_csv_row(fields)
        if len(fields) > len(CSV_COLUMNS) or len(fields) < 2:
            builder.add(None, raw, PARSE_ERROR)
        else:
            builder.add(dict(zip(CSV_COLUMNS, fields)), raw)


def _format_csv_row(fields: list[str]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(fields)
    return buf.getvalue()


def _jsonl_rows(builder: _Builder, path: Path) -> None:
    text = _read_text(path)
    # split on \n only: str.splitlines() would also break on U+2028 inside strings
    for line in text.split("\n"):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        if _has_surrogates(line):
            builder.add(None, line, INVALID_UTF8)
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            builder.add(None, line, PARSE_ERROR)
            continue
        if not isinstance(obj, dict):
            builder.add(None, line, PARSE_ERROR)
            continue
        builder.add(obj, line)


def _finish(builder: _Builder, label: str) -> Corpus:
    corpus = builder.build()
    if not corpus.records:
        raise EmptyCorpusError(f"no valid review records in {label}")
    return corpus


def ingest_csv(path, has_header: Optional[bool] = None) -> Corpus:
    """Load ``review_id,rating,text[,source[,date]]`` rows.

    ``has_header=None`` skips the first row only if its first cell is
    ``review_id``.
    """
    builder = _Builder()
    _csv_rows(builder, Path(path), has_header)
    return _finish(builder, str(path))


def ingest_jsonl(path) -> Corpus:
    builder = _Builder()
    _jsonl_rows(builder, Path(path))
    return _finish(builder, str(path))


def detect_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".ndjson", ".json"):
        return "jsonl"
    return "csv"


def ingest(paths: Iterable, fmt: str = "auto", has_header: Optional[bool] = None) -> Corpus:
    """Load several files into one corpus; ids must be unique across all of them."""
    builder = _Builder()
    labels = []
    for path in paths:
        path = Path(path)
        labels.append(str(path))
        kind = detect_format(path) if fmt == "auto" else fmt
        if kind == "csv":
            _csv_rows(builder, path, has_header)
        elif kind == "jsonl":
            _jsonl_rows(builder, path)
        else:
            raise ValueError(f"unknown input format {kind!r}")
    return _finish(builder, ", ".join(labels) or "<no input>")


def dedup(corpus: Corpus) -> Corpus:
    """Keep the first record of each (rating, normalized text) group."""
    seen = set()
    kept = []
    dropped = []
    positions = _positions(corpus)
    for record in corpus.records:
        key = dedup_key(record)
        if key in seen:
            raw = json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True)
            dropped.append(Rejection(positions[record.review_id], DUPLICATE, raw))
        else:
            seen.add(key)
            kept.append(record)
    if not dropped:
        return corpus
    rejected = sorted(corpus.rejected + tuple(dropped), key=lambda r: r.index)
    return Corpus(tuple(kept), tuple(rejected))


def _positions(corpus: Corpus) -> dict[str, int]:
    """Recover each record's original row index from the gaps left by rejections."""
    taken = {r.index for r in corpus.rejected}
    free = (i for i in itertools.count() if i not in taken)
    return {record.review_id: next(free) for record in corpus.records}


def write_csv(records: Iterable[ReviewRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([r.review_id, r.rating, r.text, r.source or "", r.date or ""])


def write_jsonl(records: Iterable[ReviewRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            obj = {"review_id": r.review_id, "rating": r.rating, "text": r.text}
            if r.source is not None:
                obj["source"] = r.source
            if r.date is not None:
                obj["date"] = r.date
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
