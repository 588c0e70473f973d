"""From monitored host counters to signal and antigen event streams.

Signals per one-second sample:

* PAMP: destination-unreachable errors per second over ``max_pamp``
* danger: outbound packets per second over ``max_danger``
* safe: ``1 - |change in packets per second| / max_delta``
* inflammatory: always 0 here

All three are clamped to 1.  Antigen is one process id per system call.
"""
from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .aggregation import ANOMALOUS, LABELS, NORMAL
from .events import AntigenEvent, Event, SignalEvent, event_order
from .model import SignalVector


@dataclass(frozen=True)
class RawSample:
    timestamp: float
    dest_unreachable_per_sec: float
    packets_out_per_sec: float

    def __post_init__(self) -> None:
        for name in ("timestamp", "dest_unreachable_per_sec", "packets_out_per_sec"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} is not finite: {value}")
            object.__setattr__(self, name, value)
        if self.dest_unreachable_per_sec < 0 or self.packets_out_per_sec < 0:
            raise ValueError(f"negative rate in {self}")


@dataclass(frozen=True)
class Maxima:
    """Normalisation constants for the three derived features."""

    pamp: float = 50.0
    danger: float = 500.0
    delta: float = 100.0

    def __post_init__(self) -> None:
        for name in ("pamp", "danger", "delta"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"maximum {name!r} must be finite and > 0, got {value}")
            object.__setattr__(self, name, value)


DEFAULT_MAXIMA = Maxima()


def derive_signals(
    current: RawSample,
    previous: RawSample | None = None,
    maxima: Maxima = DEFAULT_MAXIMA,
) -> SignalVector:
    if previous is not None and current.timestamp < previous.timestamp:
        raise ValueError(
            f"sample timestamps must not decrease: {previous.timestamp} then {current.timestamp}"
        )
    pamp = min(current.dest_unreachable_per_sec / maxima.pamp, 1.0)
    danger = min(current.packets_out_per_sec / maxima.danger, 1.0)
    if previous is None:
        safe = 1.0
    else:
        change = abs(current.packets_out_per_sec - previous.packets_out_per_sec)
        safe = 1.0 - min(change / maxima.delta, 1.0)
    return SignalVector(pamp, danger, safe, 0.0)


def derive_stream(samples: Iterable[RawSample], maxima: Maxima = DEFAULT_MAXIMA) -> list[tuple[float, SignalVector]]:
    out = []
    previous = None
    for sample in samples:
        out.append((sample.timestamp, derive_signals(sample, previous, maxima)))
        previous = sample
    return out


# -- signal mappings --------------------------------------------------------

FEATURES = ("pamp", "danger", "safe")


@dataclass(frozen=True)
class SignalMapping:
    """Which derived feature feeds each signal slot; ``None`` disables a slot."""

    pamp: str | None = "pamp"
    danger: str | None = "danger"
    safe: str | None = "safe"

    def __post_init__(self) -> None:
        used = [src for src in (self.pamp, self.danger, self.safe) if src is not None]
        for src in used:
            if src not in FEATURES:
                raise ValueError(f"unknown feature {src!r}; expected one of {FEATURES}")
        if len(set(used)) != len(used):
            raise ValueError(f"a feature may feed at most one slot: {self}")

    def to_dict(self) -> dict[str, str | None]:
        return {"pamp": self.pamp, "danger": self.danger, "safe": self.safe}


MAPPINGS: dict[str, SignalMapping] = {
    "M1": SignalMapping(),
    "M2": SignalMapping(pamp="danger", danger="pamp", safe="safe"),
    "M3": SignalMapping(pamp="safe", danger="danger", safe="pamp"),
    "M4": SignalMapping(),
    "M5": SignalMapping(pamp="pamp", danger=None, safe=None),
}


def apply_mapping(signals: SignalVector, mapping: SignalMapping) -> SignalVector:
    def pick(src):
        return 0.0 if src is None else getattr(signals, src)

    return SignalVector(pick(mapping.pamp), pick(mapping.danger), pick(mapping.safe), signals.inflammatory)


# -- streams ----------------------------------------------------------------

def _check_sorted(timestamps: Iterable[float], what: str) -> None:
    last = -math.inf
    for i, t in enumerate(timestamps):
        if t < last:
            raise ValueError(f"{what}: timestamp regression at entry {i}: {t} after {last}")
        last = t


def build_stream(
    samples: Sequence[RawSample],
    antigen: Sequence[AntigenEvent],
    maxima: Maxima = DEFAULT_MAXIMA,
    mapping: SignalMapping = MAPPINGS["M1"],
    origin: float = 0.0,
) -> list[Event]:
    """Merge derived signal updates and antigen deposits into one time-ordered
    stream.  Signals go first at equal timestamps.  ``origin`` is subtracted
    from every timestamp."""
    _check_sorted((s.timestamp for s in samples), "signal samples")
    _check_sorted((a.timestamp for a in antigen), "antigen events")
    signal_events = [
        SignalEvent(t - origin, apply_mapping(sv, mapping)) for t, sv in derive_stream(samples, maxima)
    ]
    antigen_events = [a if origin == 0 else AntigenEvent(a.timestamp - origin, a.antigen) for a in antigen]
    return list(heapq.merge(signal_events, antigen_events, key=event_order))


# -- delimited text logs ----------------------------------------------------

SIGNAL_HEADER = ["timestamp", "dest_unreachable_per_sec", "packets_out_per_sec"]
ANTIGEN_HEADER = ["timestamp", "antigen_id"]
TRUTH_HEADER = ["antigen_id", "label"]


def _rows(path: str | Path, header: list[str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first] != header:
            raise ValueError(f"{path}:1: expected header {','.join(header)!r}, got {first}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not x.strip() for x in row):
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            yield lineno, [x.strip() for x in row]


def read_signal_log(path: str | Path) -> list[RawSample]:
    samples = []
    for lineno, (t, errs, pkts) in _rows(path, SIGNAL_HEADER):
        try:
            sample = RawSample(float(t), float(errs), float(pkts))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        if samples and sample.timestamp < samples[-1].timestamp:
            raise ValueError(f"{path}:{lineno}: timestamp {sample.timestamp} before {samples[-1].timestamp}")
        samples.append(sample)
    return samples


def read_antigen_log(path: str | Path) -> list[AntigenEvent]:
    events = []
    for lineno, (t, antigen) in _rows(path, ANTIGEN_HEADER):
        try:
            ts = float(t)
            if not math.isfinite(ts):
                raise ValueError(f"timestamp is not finite: {t}")
            event = AntigenEvent(ts, int(antigen))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        if events and event.timestamp < events[-1].timestamp:
            raise ValueError(f"{path}:{lineno}: timestamp {event.timestamp} before {events[-1].timestamp}")
        events.append(event)
    return events


def read_truth(path: str | Path) -> dict[int, str]:
    truth = {}
    for lineno, (antigen, label) in _rows(path, TRUTH_HEADER):
        if label not in LABELS:
            raise ValueError(f"{path}:{lineno}: label must be one of {LABELS}, got {label!r}")
        try:
            truth[int(antigen)] = label
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad antigen id {antigen!r}") from None
    return truth


def write_signal_log(samples: Iterable[RawSample], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SIGNAL_HEADER)
        for s in samples:
            w.writerow([repr(s.timestamp), repr(s.dest_unreachable_per_sec), repr(s.packets_out_per_sec)])


def write_antigen_log(events: Iterable[AntigenEvent], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ANTIGEN_HEADER)
        for e in events:
            w.writerow([repr(float(e.timestamp)), e.antigen])


def write_truth(truth: Mapping[int, str], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRUTH_HEADER)
        for antigen in sorted(truth):
            w.writerow([antigen, truth[antigen]])


def parse_session(
    signal_path: str | Path,
    antigen_path: str | Path,
    maxima: Maxima = DEFAULT_MAXIMA,
    mapping: SignalMapping = MAPPINGS["M1"],
    rebase: bool = True,
) -> list[Event]:
    """Read a signal log and an antigen log into one engine-ready stream.

    With ``rebase`` the session clock starts at the floor of the earliest
    timestamp in either file, so epoch-stamped logs map to cycle 0.
    """
    samples = read_signal_log(signal_path)
    antigen = read_antigen_log(antigen_path)
    origin = 0.0
    if rebase:
        firsts = [x[0].timestamp for x in (samples, antigen) if x]
        origin = float(math.floor(min(firsts))) if firsts else 0.0
    return build_stream(samples, antigen, maxima, mapping, origin)


# -- synthetic sessions -----------------------------------------------------

SSHD, BASH, PTS, NMAP, SCP = 812, 2231, 2233, 2290, 2302
PROCESS_NAMES = {SSHD: "sshd", BASH: "bash", PTS: "pts", NMAP: "nmap", SCP: "scp"}
KINDS = ("attack", "normal", "control")

# antigen per second while a process is active
BACKGROUND_RATES = {SSHD: 3.0, BASH: 2.0}
SCAN_RATES = {NMAP: 30.0, PTS: 8.0}
TRANSFER_RATES = {SCP: 25.0, PTS: 3.0}

BASE_PACKETS = 20
TRANSFER_PEAK = 300
RAMP_SECONDS = 10


@dataclass
class Session:
    kind: str
    samples: list[RawSample]
    antigen: list[AntigenEvent]
    truth: dict[int, str]
    window: tuple[int, int] | None = None
    maxima: Maxima = DEFAULT_MAXIMA
    names: dict[int, str] = field(default_factory=dict)

    def stream(self, mapping: SignalMapping = MAPPINGS["M1"]) -> list[Event]:
        return build_stream(self.samples, self.antigen, self.maxima, mapping)

    def deposited_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for e in self.antigen:
            counts[e.antigen] = counts.get(e.antigen, 0) + 1
        return counts


def _event_window(duration: int, rng: np.random.Generator) -> tuple[int, int]:
    length = max(1, round(0.3 * duration))
    start = int(math.floor(duration * rng.uniform(0.3, 0.45)))
    start = min(start, duration - length)
    return start, start + length


def _emit(rates: Mapping[int, float], second: int, rng: np.random.Generator) -> list[tuple[float, int]]:
    out = []
    for pid, rate in rates.items():
        n = int(rng.poisson(rate))
        out.extend((second + float(u), pid) for u in rng.random(n))
    return out


def generate_session(
    kind: str,
    duration: int = 120,
    rng: np.random.Generator | int | None = None,
) -> Session:
    """Synthesise one monitored session.

    control: a quiet ssh login, steady low packet rate, no errors.
    normal: adds a file transfer whose packet rate ramps smoothly up and down.
    attack: adds a port scan with bursty packets and destination-unreachable
    errors; the scanner and its terminal are the anomalous antigen.

    Counts are built against ``DEFAULT_MAXIMA``, which the returned session
    carries for signal derivation.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if int(duration) != duration or duration < 1:
        raise ValueError(f"duration must be an integer >= 1, got {duration!r}")
    rng = np.random.default_rng(rng)
    maxima = DEFAULT_MAXIMA
    window = None if kind == "control" else _event_window(duration, rng)

    samples = []
    antigen: list[tuple[float, int]] = []
    high = True
    for t in range(duration):
        errors = 0.0
        packets = BASE_PACKETS + int(rng.integers(-2, 3))
        rates = dict(BACKGROUND_RATES)
        if window is not None and window[0] <= t < window[1]:
            if kind == "attack":
                errors = float(rng.integers(int(0.4 * maxima.pamp), int(maxima.pamp) + 1))
                errors = max(errors, 1.0)
                if high:
                    packets = int(rng.integers(350, 501))
                else:
                    packets = BASE_PACKETS + int(rng.integers(0, 41))
                high = not high
                rates.update(SCAN_RATES)
            else:
                k = t - window[0]
                ramp = min(1.0, (k + 1) / RAMP_SECONDS, (window[1] - t) / RAMP_SECONDS)
                packets = int(round(BASE_PACKETS + (TRANSFER_PEAK - BASE_PACKETS) * ramp)) + int(rng.integers(-3, 4))
                rates.update(TRANSFER_RATES)
        samples.append(RawSample(float(t), errors, float(packets)))
        antigen.extend(_emit(rates, t, rng))

    antigen.sort()
    events = [AntigenEvent(ts, pid) for ts, pid in antigen]
    truth = {SSHD: NORMAL, BASH: NORMAL}
    if kind == "attack":
        truth.update({NMAP: ANOMALOUS, PTS: ANOMALOUS})
    elif kind == "normal":
        truth.update({SCP: NORMAL, PTS: NORMAL})
    names = {pid: PROCESS_NAMES[pid] for pid in truth}
    return Session(kind, samples, events, truth, window, maxima, names)
