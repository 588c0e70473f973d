"""Lymph-node stage: presentation records, MCAV scores and threshold sweeps."""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

MATURE = "mature"
SEMI_MATURE = "semi-mature"
CONTEXTS = (MATURE, SEMI_MATURE)

ANOMALOUS = "anomalous"
NORMAL = "normal"
LABELS = (ANOMALOUS, NORMAL)

DEFAULT_THRESHOLDS = tuple(round(i / 10, 1) for i in range(11))


@dataclass(frozen=True)
class PresentationRecord:
    cycle: int
    antigen: int
    context: str

    def __post_init__(self) -> None:
        if self.context not in CONTEXTS:
            raise ValueError(f"context must be one of {CONTEXTS}, got {self.context!r}")


class LymphNode:
    """Collects presentation records from migrating cells, in arrival order."""

    def __init__(self) -> None:
        self.records: list[PresentationRecord] = []

    def present(self, record: PresentationRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


@dataclass(frozen=True)
class AntigenScore:
    antigen: int
    presentations: int
    mature: int

    @property
    def semi(self) -> int:
        return self.presentations - self.mature

    @property
    def mcav(self) -> float:
        return self.mature / self.presentations


@dataclass
class McavReport:
    scores: dict[int, AntigenScore] = field(default_factory=dict)
    unpresented: list[int] = field(default_factory=list)

    @property
    def mcav(self) -> dict[int, float]:
        return {a: s.mcav for a, s in self.scores.items()}

    def __getitem__(self, antigen: int) -> float:
        return self.scores[antigen].mcav

    def __contains__(self, antigen: int) -> bool:
        return antigen in self.scores


def compute_mcav(records: Iterable[PresentationRecord], deposited: Iterable[int] = ()) -> McavReport:
    """Per antigen id: the fraction of its presentations made in mature context.

    Ids in ``deposited`` that were never presented are not scored; they are
    listed in ``report.unpresented``.
    """
    total: Counter[int] = Counter()
    mature: Counter[int] = Counter()
    for rec in records:
        total[rec.antigen] += 1
        if rec.context == MATURE:
            mature[rec.antigen] += 1
    scores = {a: AntigenScore(a, total[a], mature[a]) for a in sorted(total)}
    unpresented = sorted(set(deposited) - set(scores))
    return McavReport(scores, unpresented)


def classify(mcav: McavReport | Mapping[int, float], threshold: float) -> dict[int, str]:
    """Label an id anomalous when its MCAV strictly exceeds ``threshold``."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    values = mcav.mcav if isinstance(mcav, McavReport) else mcav
    return {a: ANOMALOUS if v > threshold else NORMAL for a, v in values.items()}


def accuracy_sweep(
    mcav: McavReport | Mapping[int, float],
    truth: Mapping[int, str],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> list[tuple[float, float]]:
    """(threshold, accuracy) rows with accuracy = (TP + TN) / scored ids."""
    values = mcav.mcav if isinstance(mcav, McavReport) else dict(mcav)
    for antigen in values:
        if antigen not in truth:
            raise KeyError(f"no ground-truth label for scored antigen id {antigen}")
    rows = []
    for t in thresholds:
        labels = classify(values, t)
        correct = sum(labels[a] == truth[a] for a in values)
        rows.append((t, correct / len(values) if values else math.nan))
    return rows


def perfect_range(rows: Sequence[tuple[float, float]]) -> tuple[float, float] | None:
    """Widest contiguous run of thresholds with accuracy exactly 1."""
    best = None
    start = None
    for i, (t, acc) in enumerate(rows):
        if acc == 1.0:
            if start is None:
                start = i
            lo, hi = rows[start][0], t
            if best is None or hi - lo > best[1] - best[0]:
                best = (lo, hi)
        else:
            start = None
    return best


def presentation_ratio(records: Iterable[PresentationRecord], deposited: Mapping[int, int]) -> dict[int, float]:
    """Presented / deposited antigen count per id."""
    presented = Counter(r.antigen for r in records)
    ratios = {}
    for antigen in sorted(set(deposited) | set(presented)):
        n_in = deposited.get(antigen, 0)
        n_out = presented.get(antigen, 0)
        if n_out > n_in:
            raise ValueError(
                f"antigen {antigen}: {n_out} presented but only {n_in} deposited (engine accounting error)"
            )
        ratios[antigen] = n_out / n_in if n_in else 0.0
    return ratios


# -- delimited text IO ------------------------------------------------------

def write_presentations(records: Iterable[PresentationRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cycle", "antigen_id", "context"])
        for r in records:
            w.writerow([r.cycle, r.antigen, r.context])


def read_presentations(path: str | Path) -> list[PresentationRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["cycle", "antigen_id", "context"]:
            raise ValueError(f"{path}: expected header 'cycle,antigen_id,context', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                cycle, antigen, context = (x.strip() for x in row)
                records.append(PresentationRecord(int(cycle), int(antigen), context))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed presentation row {row}: {exc}") from None
    return records


def write_mcav(report: McavReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["antigen_id", "presentations", "mature", "mcav"])
        for s in report.scores.values():
            w.writerow([s.antigen, s.presentations, s.mature, repr(s.mcav)])
        for a in report.unpresented:
            w.writerow([a, 0, 0, ""])


def write_accuracy(rows: Iterable[tuple[float, float]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold", "accuracy"])
        for t, acc in rows:
            w.writerow([repr(t), repr(acc)])
