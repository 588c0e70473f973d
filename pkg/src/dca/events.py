"""Time-stamped inputs consumed by the engine."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .model import SignalVector


@dataclass(frozen=True)
class SignalEvent:
    timestamp: float
    signals: SignalVector


@dataclass(frozen=True)
class AntigenEvent:
    timestamp: float
    antigen: int

    def __post_init__(self) -> None:
        if int(self.antigen) != self.antigen or self.antigen < 0:
            raise ValueError(f"antigen id must be a non-negative integer, got {self.antigen!r}")


Event = Union[SignalEvent, AntigenEvent]


def event_order(event: Event) -> tuple[float, int]:
    """Sort key: by time, signal updates ahead of antigen at equal times."""
    return (event.timestamp, 0 if isinstance(event, SignalEvent) else 1)
