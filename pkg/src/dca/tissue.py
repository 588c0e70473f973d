"""The tissue compartment shared by the DC population."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ZERO_SIGNALS, SignalVector

ACCEPTED = "accepted"
DROPPED = "dropped"


@dataclass
class TissueStats:
    deposited: int = 0
    dropped: int = 0
    sampled: int = 0


@dataclass
class Tissue:
    """Current signal values plus a bounded antigen store.

    A full store drops new antigen.  Sampling removes antigen, so each
    deposited instance reaches at most one cell.
    """

    capacity: int = 500
    signals: SignalVector = ZERO_SIGNALS
    store: list[int] = field(default_factory=list)
    stats: TissueStats = field(default_factory=TissueStats)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError(f"tissue capacity must be >= 1, got {self.capacity}")

    def update_signals(self, signals: SignalVector) -> None:
        self.signals = signals

    def deposit_antigen(self, antigen: int) -> str:
        self.stats.deposited += 1
        if len(self.store) >= self.capacity:
            self.stats.dropped += 1
            return DROPPED
        self.store.append(antigen)
        return ACCEPTED

    def sample_antigen(self, count: int, rng: np.random.Generator) -> list[int]:
        """Remove and return up to ``count`` antigen chosen uniformly without
        replacement.  Each pick is one ``rng.integers`` draw over what is
        left in the store."""
        if count < 0:
            raise ValueError(f"sample count must be >= 0, got {count}")
        taken = []
        for _ in range(min(count, len(self.store))):
            idx = int(rng.integers(len(self.store)))
            taken.append(self.store.pop(idx))
        self.stats.sampled += len(taken)
        return taken

    def __len__(self) -> int:
        return len(self.store)
