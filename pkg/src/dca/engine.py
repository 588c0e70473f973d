"""DC population and the cell-cycle update stage.

One cell cycle runs per second of virtual time.  Before cycle ``l`` the
engine applies every event with ``floor(timestamp) <= l`` to the tissue, then
each cell in index order:

1. samples ``sample_count`` antigen from the tissue (anything past the
   cell's ``antigen_capacity`` is discarded),
2. copies the tissue signals,
3. adds ``transform(signals)`` to its cumulative output,
4. migrates if cumulative csm exceeds its threshold: every antigen it holds
   is presented in mature context if cumulative mat > semi, else
   semi-mature.  The cell is then reset with a freshly drawn threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Protocol

import numpy as np

from .aggregation import MATURE, SEMI_MATURE, LymphNode, PresentationRecord
from .events import AntigenEvent, Event, SignalEvent
from .model import DEFAULT_WEIGHTS, ZERO_SIGNALS, SignalVector, WeightMatrix, transform
from .tissue import Tissue


class PresentationSink(Protocol):
    def present(self, record: PresentationRecord) -> None: ...


@dataclass(frozen=True)
class EngineConfig:
    population: int = 100
    antigen_capacity: int = 50
    sample_count: int = 1
    tissue_capacity: int = 500
    cycles: int = 120
    threshold_range: tuple[float, float] = (0.3, 0.7)
    weights: WeightMatrix = DEFAULT_WEIGHTS
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "threshold_range", tuple(float(x) for x in self.threshold_range))
        for name in ("population", "antigen_capacity", "sample_count", "tissue_capacity", "cycles"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if len(self.threshold_range) != 2:
            raise ValueError(f"threshold_range must be (lo, hi), got {self.threshold_range!r}")
        lo, hi = self.threshold_range
        if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 < lo <= hi):
            raise ValueError(f"threshold_range must satisfy 0 < lo <= hi, got ({lo}, {hi})")
        if not isinstance(self.weights, WeightMatrix):
            object.__setattr__(self, "weights", WeightMatrix(self.weights))


@dataclass
class DendriticCell:
    threshold: float
    signals: SignalVector = ZERO_SIGNALS
    antigen: list[int] = field(default_factory=list)
    csm: float = 0.0
    semi: float = 0.0
    mat: float = 0.0
    age: int = 0

    @property
    def context(self) -> str:
        # ties go to semi-mature
        return MATURE if self.mat > self.semi else SEMI_MATURE

    def reset(self, threshold: float) -> None:
        self.threshold = threshold
        self.signals = ZERO_SIGNALS
        self.antigen = []
        self.csm = self.semi = self.mat = 0.0
        self.age = 0


def _draw_threshold(cfg: EngineConfig, rng: np.random.Generator) -> float:
    lo, hi = cfg.threshold_range
    return float(rng.uniform(lo, hi))


def init_population(cfg: EngineConfig, rng: np.random.Generator) -> list[DendriticCell]:
    return [DendriticCell(threshold=_draw_threshold(cfg, rng)) for _ in range(cfg.population)]


@dataclass
class CycleSummary:
    migrations: int = 0
    sampled: int = 0
    discarded: int = 0
    presented: int = 0


def cell_cycle(
    population: list[DendriticCell],
    tissue: Tissue,
    cfg: EngineConfig,
    rng: np.random.Generator,
    lymph: PresentationSink,
    cycle: int = 0,
) -> CycleSummary:
    summary = CycleSummary()
    signals = tissue.signals
    # every cell copies the same tissue signals this cycle
    out = transform(signals, cfg.weights)
    for cell in population:
        taken = tissue.sample_antigen(cfg.sample_count, rng)
        summary.sampled += len(taken)
        room = cfg.antigen_capacity - len(cell.antigen)
        if len(taken) > room:
            summary.discarded += len(taken) - max(room, 0)
            taken = taken[: max(room, 0)]
        cell.antigen.extend(taken)

        cell.signals = signals
        cell.csm += out.csm
        cell.semi += out.semi
        cell.mat += out.mat
        cell.age += 1

        if cell.csm > cell.threshold:
            summary.migrations += 1
            context = cell.context
            for antigen in cell.antigen:
                lymph.present(PresentationRecord(cycle, antigen, context))
            summary.presented += len(cell.antigen)
            cell.reset(_draw_threshold(cfg, rng))
    return summary


@dataclass
class RunStats:
    cycles: int = 0
    migrations: int = 0
    presented: int = 0
    drained: int = 0
    deposited: int = 0
    dropped: int = 0
    sampled: int = 0
    discarded: int = 0
    residual_tissue: int = 0
    residual_cells: int = 0
    unconsumed_events: int = 0

    def conserved(self) -> bool:
        """deposited == presented + dropped + discarded + residual."""
        return self.deposited == (
            self.presented + self.dropped + self.discarded + self.residual_tissue + self.residual_cells
        )


def run(
    cfg: EngineConfig,
    events: Iterable[Event],
    lymph: PresentationSink | None = None,
) -> tuple[RunStats, PresentationSink]:
    """Replay ``events`` through a fresh tissue and population for
    ``cfg.cycles`` cycles, then drain cells still holding antigen.

    Events timed at or after ``cfg.cycles`` seconds are never applied and are
    counted in ``unconsumed_events``.  Drained cells present at cycle index
    ``cfg.cycles``; a cell with zero costimulation has no context to present
    and keeps its antigen (counted as ``residual_cells``).
    """
    if lymph is None:
        lymph = LymphNode()
    rng = np.random.default_rng(cfg.seed)
    tissue = Tissue(capacity=cfg.tissue_capacity)
    population = init_population(cfg, rng)
    stats = RunStats()

    stream = iter(events)
    pending = next(stream, None)
    last_key = None

    for cycle in range(cfg.cycles):
        while pending is not None and math.floor(pending.timestamp) <= cycle:
            last_key = _check_order(pending, last_key)
            if isinstance(pending, SignalEvent):
                tissue.update_signals(pending.signals)
            elif isinstance(pending, AntigenEvent):
                tissue.deposit_antigen(pending.antigen)
            else:
                raise TypeError(f"unknown event type {type(pending).__name__}")
            pending = next(stream, None)
        summary = cell_cycle(population, tissue, cfg, rng, lymph, cycle)
        stats.cycles += 1
        stats.migrations += summary.migrations
        stats.presented += summary.presented
        stats.discarded += summary.discarded

    while pending is not None:
        last_key = _check_order(pending, last_key)
        stats.unconsumed_events += 1
        pending = next(stream, None)

    for cell in population:
        if not cell.antigen:
            continue
        if cell.csm > 0.0:
            context = cell.context
            for antigen in cell.antigen:
                lymph.present(PresentationRecord(cfg.cycles, antigen, context))
            stats.presented += len(cell.antigen)
            stats.drained += len(cell.antigen)
        else:
            stats.residual_cells += len(cell.antigen)

    stats.deposited = tissue.stats.deposited
    stats.dropped = tissue.stats.dropped
    stats.sampled = tissue.stats.sampled
    stats.residual_tissue = len(tissue)
    return stats, lymph


def _check_order(event: Event, last_key):
    if event.timestamp < 0 or not math.isfinite(event.timestamp):
        raise ValueError(f"event timestamp must be finite and >= 0, got {event.timestamp}")
    if last_key is not None and event.timestamp < last_key:
        raise ValueError(f"event stream out of order at t={event.timestamp} (previous t={last_key})")
    return event.timestamp
