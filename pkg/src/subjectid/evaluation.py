"""Agreement between human indexers and between indexers and the model.

Three analyses are offered: how many subjects each reader picks (mean and
sample standard deviation, per text and per reader), how many readers
share each chosen subject, and how many readers share each subject the
model proposes.
"""

from __future__ import annotations

import json
import statistics
import unicodedata
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Mapping, Sequence


class IdMismatch(ValueError):
    def __init__(self, missing_predictions, missing_gold):
        self.missing_predictions = sorted(missing_predictions)
        self.missing_gold = sorted(missing_gold)
        parts = []
        if self.missing_predictions:
            parts.append("no prediction for: " + ", ".join(self.missing_predictions))
        if self.missing_gold:
            parts.append("no annotation for: " + ", ".join(self.missing_gold))
        super().__init__("; ".join(parts))


def normalize(subject: str) -> str:
    return unicodedata.normalize("NFC", subject).strip()


@dataclass(frozen=True)
class ReaderAnnotations:
    text_id: str
    readers: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        cleaned = {}
        for reader, subjects in self.readers.items():
            subjects = tuple(normalize(s) for s in subjects)
            if len(set(subjects)) != len(subjects):
                raise ValueError(f"{self.text_id}: reader {reader} lists a subject twice")
            cleaned[reader] = subjects
        object.__setattr__(self, "readers", cleaned)

    @property
    def reader_ids(self) -> list[str]:
        return list(self.readers)

    def counts(self) -> list[int]:
        return [len(s) for s in self.readers.values()]

    def votes(self) -> dict[str, int]:
        """Number of readers choosing each subject."""
        tally: dict[str, int] = {}
        for subjects in self.readers.values():
            for s in subjects:
                tally[s] = tally.get(s, 0) + 1
        return tally


@dataclass(frozen=True)
class Summary:
    mean: float
    stdev: float | None  # None when fewer than two values

    def display(self, places: int = 2) -> tuple[str, str]:
        sd = "-" if self.stdev is None else round_half_up(self.stdev, places)
        return round_half_up(self.mean, places), sd


def round_half_up(value: float, places: int = 2) -> str:
    """Decimal rounding as printed in published tables (5.125 -> 5.13)."""
    quantum = Decimal(1).scaleb(-places)
    return str(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def summarize(values: Sequence[float]) -> Summary:
    if not values:
        raise ValueError("cannot summarize an empty list")
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) > 1 else None
    return Summary(mean, sd)


@dataclass(frozen=True)
class CountStats:
    per_text: dict[str, Summary]
    per_reader: dict[str, Summary]
    counts: dict[str, dict[str, int]]  # text -> reader -> count


def count_stats_from_counts(counts: Mapping[str, Mapping[str, int]]) -> CountStats:
    per_text = {t: summarize(list(row.values())) for t, row in counts.items()}
    by_reader: dict[str, list[int]] = {}
    for row in counts.values():
        for reader, n in row.items():
            by_reader.setdefault(reader, []).append(n)
    per_reader = {r: summarize(v) for r, v in by_reader.items()}
    return CountStats(per_text, per_reader, {t: dict(r) for t, r in counts.items()})


def count_stats(annotations: Sequence[ReaderAnnotations]) -> CountStats:
    counts = {a.text_id: {r: len(s) for r, s in a.readers.items()} for a in annotations}
    return count_stats_from_counts(counts)


def repetition_histogram(ann: ReaderAnnotations, n_readers: int | None = None) -> dict[int, int]:
    """``k -> number of distinct subjects chosen by exactly k readers``."""
    n_readers = n_readers or len(ann.readers)
    bins = {k: 0 for k in range(1, n_readers + 1)}
    for votes in ann.votes().values():
        bins[votes] += 1
    return bins


def overlap_histogram(
    ann: ReaderAnnotations, model_subjects: Sequence[str], n_readers: int | None = None
) -> dict[int, int]:
    """``k -> number of model subjects chosen by exactly k readers``; 0 is "None"."""
    n_readers = n_readers or len(ann.readers)
    subjects = [normalize(s) for s in model_subjects]
    if len(set(subjects)) != len(subjects):
        raise ValueError(f"{ann.text_id}: model subjects contain duplicates")
    votes = ann.votes()
    bins = {k: 0 for k in range(0, n_readers + 1)}
    for s in subjects:
        bins[votes.get(s, 0)] += 1
    return bins


def match_predictions(annotations, predictions: Mapping[str, Sequence[str]]):
    gold = {a.text_id for a in annotations}
    pred = set(predictions)
    if gold != pred:
        raise IdMismatch(gold - pred, pred - gold)


# -- files -----------------------------------------------------------------


def _records(path) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return []
    if text.startswith("["):
        return json.loads(text)
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def load_annotations(path) -> list[ReaderAnnotations]:
    """Records ``{text_id, readers: {reader_id: [subject, ...]}}``, as a JSON
    array or one JSON object per line."""
    return [ReaderAnnotations(r["text_id"], dict(r["readers"])) for r in _records(path)]


def load_predictions(path) -> dict[str, list[str]]:
    """Records ``{text_id, subjects}``.  Ranking records written by the
    scorer (``doc_id`` plus subject objects with a ``noun`` key) are
    accepted too."""
    out = {}
    for r in _records(path):
        text_id = r.get("text_id", r.get("doc_id"))
        subjects = [s["noun"] if isinstance(s, dict) else s for s in r["subjects"]]
        out[text_id] = subjects
    return out


# -- reports ---------------------------------------------------------------


def _grid(header, rows) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines = []
    for row in [header, *rows]:
        cells = [str(c).ljust(widths[0]) if i == 0 else str(c).rjust(widths[i])
                 for i, c in enumerate(row)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def _reader_count(annotations) -> int:
    return max((len(a.readers) for a in annotations), default=0)


def table4(stats: CountStats) -> str:
    readers = list(stats.per_reader)
    header = ["", *readers, "AVG", "STDEV"]
    rows = []
    for text, row in stats.counts.items():
        avg, sd = stats.per_text[text].display()
        rows.append([text, *(row.get(r, "") for r in readers), avg, sd])
    rows.append(["AVG", *(round_half_up(stats.per_reader[r].mean, 1) for r in readers), "", ""])
    rows.append(["STDEV", *(stats.per_reader[r].display()[1] for r in readers), "", ""])
    return _grid(header, rows)


def table5(annotations) -> str:
    r = _reader_count(annotations)
    header = ["", *(f"{k} Reader" + ("s" if k > 1 else "") for k in range(1, r + 1))]
    rows, total = [], [0] * r
    for a in annotations:
        bins = repetition_histogram(a, r)
        rows.append([a.text_id, *bins.values()])
        total = [t + b for t, b in zip(total, bins.values())]
    rows.append(["SUM", *total])
    return _grid(header, rows)


def table6(annotations, predictions) -> str:
    r = _reader_count(annotations)
    header = ["", "None", *(f"{k} Reader" + ("s" if k > 1 else "") for k in range(1, r + 1))]
    rows, total = [], [0] * (r + 1)
    for a in annotations:
        bins = overlap_histogram(a, predictions[a.text_id], r)
        rows.append([a.text_id, *bins.values()])
        total = [t + b for t, b in zip(total, bins.values())]
    rows.append(["SUM", *total])
    return _grid(header, rows)


def report_records(annotations, predictions=None, reports=("table4", "table5", "table6")) -> dict:
    r = _reader_count(annotations)
    out: dict = {}
    if "table4" in reports:
        stats = count_stats(annotations)
        out["table4"] = {
            "counts": stats.counts,
            "per_text": {t: {"mean": s.mean, "stdev": s.stdev} for t, s in stats.per_text.items()},
            "per_reader": {t: {"mean": s.mean, "stdev": s.stdev} for t, s in stats.per_reader.items()},
        }
    if "table5" in reports:
        out["table5"] = {a.text_id: repetition_histogram(a, r) for a in annotations}
    if "table6" in reports and predictions is not None:
        out["table6"] = {a.text_id: overlap_histogram(a, predictions[a.text_id], r)
                         for a in annotations}
    return out
