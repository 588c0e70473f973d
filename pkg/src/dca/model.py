"""Signal and output types, plus the weighted signal-fusion transform.

A dendritic cell sees four normalised input signals (PAMP, danger, safe,
inflammatory) and turns them into three output cytokines: costimulation
(``csm``), semi-mature and mature.  The first three signals are combined by a
weighted sum normalised by the absolute row weight; the inflammatory signal
only scales the result by ``1 + inflammatory``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SIGNAL_NAMES = ("pamp", "danger", "safe", "inflammatory")
OUTPUT_NAMES = ("csm", "semi", "mat")


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"signal {name!r} is not finite: {value}")
    if value < 0.0 or value > 1.0:
        raise ValueError(f"signal {name!r} outside [0, 1]: {value}")
    return value


@dataclass(frozen=True)
class SignalVector:
    """The four input signal categories at one instant, each in [0, 1]."""

    pamp: float = 0.0
    danger: float = 0.0
    safe: float = 0.0
    inflammatory: float = 0.0

    def __post_init__(self) -> None:
        values = (self.pamp, self.danger, self.safe, self.inflammatory)
        if all(type(v) is float and 0.0 <= v <= 1.0 for v in values):
            return
        for name in SIGNAL_NAMES:
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.pamp, self.danger, self.safe, self.inflammatory)

    def scaled(self, factor: float) -> "SignalVector":
        """Scale PAMP, danger and safe by ``factor``; inflammatory is kept."""
        return SignalVector(self.pamp * factor, self.danger * factor, self.safe * factor, self.inflammatory)


ZERO_SIGNALS = SignalVector()


@dataclass(frozen=True)
class OutputVector:
    csm: float = 0.0
    semi: float = 0.0
    mat: float = 0.0

    def __add__(self, other: "OutputVector") -> "OutputVector":
        return OutputVector(self.csm + other.csm, self.semi + other.semi, self.mat + other.mat)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.csm, self.semi, self.mat)


ZERO_OUTPUT = OutputVector()


class WeightMatrix:
    """Transform weights, one row per output (csm, semi, mat) and one column
    per signal category (pamp, danger, safe).

    The default rows are ``csm=(2, 1, 2)``, ``semi=(0, 0, 3)`` and
    ``mat=(2, 1, -3)``.
    """

    __slots__ = ("_rows", "_norms")

    def __init__(self, rows: Sequence[Sequence[float]] | np.ndarray | None = None):
        if rows is None:
            rows = DEFAULT_ROWS
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (3, 3):
            raise ValueError(f"weight matrix must be 3x3 (outputs x signals), got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("weight matrix contains non-finite values")
        norms = np.abs(arr).sum(axis=1)
        for name, norm in zip(OUTPUT_NAMES, norms):
            if norm <= 0.0:
                raise ValueError(f"weight row {name!r} has zero absolute sum")
        self._rows = tuple(tuple(float(w) for w in row) for row in arr)
        self._norms = tuple(float(n) for n in norms)

    @property
    def rows(self) -> tuple[tuple[float, ...], ...]:
        return self._rows

    @property
    def norms(self) -> tuple[float, ...]:
        return self._norms

    def as_array(self) -> np.ndarray:
        return np.array(self._rows)

    def to_list(self) -> list[list[float]]:
        return [list(row) for row in self._rows]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeightMatrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"WeightMatrix({self.to_list()})"


DEFAULT_ROWS = ((2.0, 1.0, 2.0), (0.0, 0.0, 3.0), (2.0, 1.0, -3.0))
DEFAULT_WEIGHTS = WeightMatrix(DEFAULT_ROWS)


def transform(signals: SignalVector, weights: WeightMatrix = DEFAULT_WEIGHTS) -> OutputVector:
    """Fuse one set of input signals into (csm, semi, mat) outputs.

    ``out_p = sum_j(w_pj * s_j) / sum_j |w_pj| * (1 + inflammatory)`` for
    j over PAMP, danger and safe.  Outputs are not clamped: a negative mature
    value is how the safe signal suppresses maturation.
    """
    s = (signals.pamp, signals.danger, signals.safe)
    for value in (*s, signals.inflammatory):
        if not math.isfinite(value):
            raise ValueError(f"non-finite signal value {value}")
    amp = 1.0 + signals.inflammatory
    out = []
    for row, norm in zip(weights.rows, weights.norms):
        out.append((row[0] * s[0] + row[1] * s[1] + row[2] * s[2]) / norm * amp)
    return OutputVector(*out)


def transform_array(signals: np.ndarray, weights: WeightMatrix = DEFAULT_WEIGHTS) -> np.ndarray:
    """Vectorised :func:`transform` over an ``(n, 4)`` array of signals.

    Returns an ``(n, 3)`` array with columns csm, semi, mat.
    """
    signals = np.atleast_2d(np.asarray(signals, dtype=float))
    if signals.shape[-1] != 4:
        raise ValueError(f"expected 4 signal columns, got {signals.shape[-1]}")
    if not np.all(np.isfinite(signals)):
        raise ValueError("non-finite signal values")
    w = weights.as_array() / np.asarray(weights.norms)[:, None]
    return (signals[:, :3] @ w.T) * (1.0 + signals[:, 3:4])
