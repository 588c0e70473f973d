"""Experiment presets, config IO and the repeated-run experiment driver."""
from __future__ import annotations

import copy
import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .aggregation import (
    DEFAULT_THRESHOLDS,
    LymphNode,
    McavReport,
    PresentationRecord,
    accuracy_sweep,
    compute_mcav,
    write_accuracy,
    write_mcav,
    write_presentations,
)
from .engine import EngineConfig, RunStats, run
from .events import Event
from .ingest import (
    DEFAULT_MAXIMA,
    KINDS,
    MAPPINGS,
    Maxima,
    SignalMapping,
    build_stream,
    generate_session,
    read_antigen_log,
    read_signal_log,
    read_truth,
)
from .model import DEFAULT_ROWS, WeightMatrix

# presets that force a single-antigen DC
SINGLE_ANTIGEN = ("M4", "M5")


class ConfigError(ValueError):
    """Bad experiment configuration; the message starts with the key path."""


DEFAULT_CONFIG: dict[str, Any] = {
    "mapping": "M1",
    "repetitions": 3,
    "seed": 0,
    "engine": {
        "population": 100,
        "antigen_capacity": None,
        "sample_count": 1,
        "tissue_capacity": 500,
        "cycles": 120,
        "threshold_range": [0.3, 0.7],
        "weights": [list(r) for r in DEFAULT_ROWS],
    },
    "session": {
        "source": "generated",
        "kind": "attack",
        "duration": 120,
        "seed": 0,
        "signal": None,
        "antigen": None,
        "truth": None,
        "maxima": {"pamp": DEFAULT_MAXIMA.pamp, "danger": DEFAULT_MAXIMA.danger, "delta": DEFAULT_MAXIMA.delta},
    },
    "output": None,
}


@dataclass(frozen=True)
class SessionSource:
    source: str = "generated"
    kind: str = "attack"
    duration: int = 120
    seed: int = 0
    signal: str | None = None
    antigen: str | None = None
    truth: str | None = None
    maxima: Maxima = DEFAULT_MAXIMA


@dataclass(frozen=True)
class ExperimentSpec:
    mapping: str = "M1"
    signal_mapping: SignalMapping = MAPPINGS["M1"]
    engine: EngineConfig = field(default_factory=EngineConfig)
    repetitions: int = 3
    seed: int = 0
    session: SessionSource = field(default_factory=SessionSource)
    output: str | None = None


# -- config IO --------------------------------------------------------------

def _merge(defaults: Mapping[str, Any], given: Mapping[str, Any], path: str = "") -> dict[str, Any]:
    if not isinstance(given, Mapping):
        raise ConfigError(f"{path or '<root>'}: expected a mapping, got {type(given).__name__}")
    out = copy.deepcopy(dict(defaults))
    for key, value in given.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"{where}: unknown key")
        if isinstance(defaults[key], dict) and key != "mapping":
            out[key] = _merge(defaults[key], value, where)
        else:
            out[key] = value
    return out


def _int(value: Any, where: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value!r}")
    return int(value)


def _real(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _mapping(value: Any) -> tuple[str, SignalMapping]:
    if isinstance(value, str):
        if value not in MAPPINGS:
            raise ConfigError(f"mapping: unknown preset {value!r}; expected one of {sorted(MAPPINGS)} or a slot table")
        return value, MAPPINGS[value]
    if isinstance(value, Mapping):
        unknown = set(value) - {"pamp", "danger", "safe"}
        if unknown:
            raise ConfigError(f"mapping.{sorted(unknown)[0]}: unknown key")
        try:
            return "custom", SignalMapping(**value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"mapping: {exc}") from None
    raise ConfigError(f"mapping: expected a preset name or a slot table, got {value!r}")


def spec_from_dict(config: Mapping[str, Any] | None = None) -> ExperimentSpec:
    """Resolve a (possibly partial) config mapping into a validated spec."""
    cfg = _merge(DEFAULT_CONFIG, config or {})
    name, signal_mapping = _mapping(cfg["mapping"])

    eng = cfg["engine"]
    capacity = eng["antigen_capacity"]
    if name in SINGLE_ANTIGEN:
        if capacity is None:
            capacity = 1
        elif _int(capacity, "engine.antigen_capacity") != 1:
            raise ConfigError(f"engine.antigen_capacity: {name} requires 1, got {capacity!r}")
    elif capacity is None:
        capacity = 50
    tr = eng["threshold_range"]
    if not isinstance(tr, (list, tuple)) or len(tr) != 2:
        raise ConfigError(f"engine.threshold_range: expected [lo, hi], got {tr!r}")
    lo, hi = _real(tr[0], "engine.threshold_range[0]"), _real(tr[1], "engine.threshold_range[1]")
    if not 0 < lo <= hi:
        raise ConfigError(f"engine.threshold_range: must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
    try:
        weights = WeightMatrix(eng["weights"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"engine.weights: {exc}") from None
    engine = EngineConfig(
        population=_int(eng["population"], "engine.population"),
        antigen_capacity=_int(capacity, "engine.antigen_capacity"),
        sample_count=_int(eng["sample_count"], "engine.sample_count"),
        tissue_capacity=_int(eng["tissue_capacity"], "engine.tissue_capacity"),
        cycles=_int(eng["cycles"], "engine.cycles"),
        threshold_range=(lo, hi),
        weights=weights,
    )

    ses = cfg["session"]
    if ses["source"] not in ("generated", "files"):
        raise ConfigError(f"session.source: expected 'generated' or 'files', got {ses['source']!r}")
    if ses["kind"] not in KINDS:
        raise ConfigError(f"session.kind: expected one of {KINDS}, got {ses['kind']!r}")
    if ses["source"] == "files":
        for key in ("signal", "antigen"):
            if not ses[key]:
                raise ConfigError(f"session.{key}: required when session.source is 'files'")
    maxima_cfg = _merge(DEFAULT_CONFIG["session"]["maxima"], ses["maxima"], "session.maxima")
    for key, value in maxima_cfg.items():
        if _real(value, f"session.maxima.{key}") <= 0:
            raise ConfigError(f"session.maxima.{key}: must be > 0, got {value!r}")
    session = SessionSource(
        source=ses["source"],
        kind=ses["kind"],
        duration=_int(ses["duration"], "session.duration"),
        seed=_int(ses["seed"], "session.seed", minimum=0),
        signal=ses["signal"],
        antigen=ses["antigen"],
        truth=ses["truth"],
        maxima=Maxima(**maxima_cfg),
    )
    return ExperimentSpec(
        mapping=name,
        signal_mapping=signal_mapping,
        engine=engine,
        repetitions=_int(cfg["repetitions"], "repetitions"),
        seed=_int(cfg["seed"], "seed", minimum=0),
        session=session,
        output=cfg["output"],
    )


def spec_to_dict(spec: ExperimentSpec) -> dict[str, Any]:
    """Every field materialised, suitable for :func:`spec_from_dict`."""
    e = spec.engine
    s = spec.session
    return {
        "mapping": spec.mapping if spec.mapping != "custom" else spec.signal_mapping.to_dict(),
        "repetitions": spec.repetitions,
        "seed": spec.seed,
        "engine": {
            "population": e.population,
            "antigen_capacity": e.antigen_capacity,
            "sample_count": e.sample_count,
            "tissue_capacity": e.tissue_capacity,
            "cycles": e.cycles,
            "threshold_range": list(e.threshold_range),
            "weights": e.weights.to_list(),
        },
        "session": {
            "source": s.source,
            "kind": s.kind,
            "duration": s.duration,
            "seed": s.seed,
            "signal": s.signal,
            "antigen": s.antigen,
            "truth": s.truth,
            "maxima": {"pamp": s.maxima.pamp, "danger": s.maxima.danger, "delta": s.maxima.delta},
        },
        "output": spec.output,
    }


def load_config(text_or_path: str | Path) -> ExperimentSpec:
    """Parse JSON config text, or the JSON file at ``text_or_path``."""
    if isinstance(text_or_path, Path) or not str(text_or_path).lstrip().startswith("{"):
        text = Path(text_or_path).read_text(encoding="utf-8")
    else:
        text = str(text_or_path)
    data = json.loads(text) if text.strip() else {}
    return spec_from_dict(data)


def dump_config(spec: ExperimentSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


# -- running ----------------------------------------------------------------

def run_seed(master: int, index: int) -> int:
    """Seed for run ``index``, independent of the order runs execute in."""
    return int(np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1)[0])


@dataclass
class LoadedSession:
    stream: list[Event]
    truth: dict[int, str] | None
    deposited: dict[int, int]
    names: dict[int, str] = field(default_factory=dict)


def load_session(spec: ExperimentSpec) -> LoadedSession:
    src = spec.session
    if src.source == "generated":
        session = generate_session(src.kind, src.duration, src.seed)
        samples, antigen, truth, names = session.samples, session.antigen, session.truth, session.names
    else:
        samples = read_signal_log(src.signal)
        antigen = read_antigen_log(src.antigen)
        truth = read_truth(src.truth) if src.truth else None
        names = {}
    firsts = [x[0].timestamp for x in (samples, antigen) if x]
    origin = float(math.floor(min(firsts))) if firsts and src.source == "files" else 0.0
    stream = build_stream(samples, antigen, src.maxima, spec.signal_mapping, origin)
    deposited: dict[int, int] = {}
    for e in antigen:
        deposited[e.antigen] = deposited.get(e.antigen, 0) + 1
    return LoadedSession(stream, truth, deposited, names)


@dataclass
class RunResult:
    index: int
    seed: int
    stats: RunStats
    records: list[PresentationRecord]
    mcav: McavReport
    accuracy: list[tuple[float, float]] | None = None


@dataclass
class AntigenSummary:
    antigen: int
    runs: int
    mean: float
    stdev: float
    label: str | None = None
    name: str | None = None


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    runs: list[RunResult]
    summary: dict[int, AntigenSummary]
    accuracy: list[tuple[float, float]] | None
    truth: dict[int, str] | None

    @property
    def mean_mcav(self) -> dict[int, float]:
        return {a: s.mean for a, s in self.summary.items()}


def _single_run(args) -> RunResult:
    index, seed, engine, stream, deposited, truth = args
    cfg = replace(engine, seed=seed)
    stats, lymph = run(cfg, stream, LymphNode())
    report = compute_mcav(lymph.records, deposited)
    acc = accuracy_sweep(report, truth, DEFAULT_THRESHOLDS) if truth is not None else None
    return RunResult(index, seed, stats, lymph.records, report, acc)


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ExperimentReport:
    """Run ``spec.repetitions`` seeded engine runs over one session and
    aggregate per-antigen MCAV mean and sample standard deviation.

    With ``spec.output`` set, the effective config, per-run logs and the
    summary tables are written there.
    """
    session = load_session(spec)
    tasks = [
        (i, run_seed(spec.seed, i), spec.engine, session.stream, session.deposited, session.truth)
        for i in range(spec.repetitions)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_single_run, tasks))
    else:
        runs = [_single_run(t) for t in tasks]

    per_id: dict[int, list[float]] = {}
    for r in runs:
        for antigen, value in r.mcav.mcav.items():
            per_id.setdefault(antigen, []).append(value)
    summary = {}
    for antigen in sorted(per_id):
        values = np.asarray(per_id[antigen])
        stdev = float(values.std(ddof=1)) if len(values) > 1 else math.nan
        summary[antigen] = AntigenSummary(
            antigen,
            len(values),
            float(values.mean()),
            stdev,
            session.truth.get(antigen) if session.truth else None,
            session.names.get(antigen),
        )
    accuracy = None
    if session.truth is not None:
        accuracy = accuracy_sweep({a: s.mean for a, s in summary.items()}, session.truth)
    report = ExperimentReport(spec, runs, summary, accuracy, session.truth)
    if spec.output:
        write_report(report, spec.output)
    return report


def write_report(report: ExperimentReport, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(dump_config(report.spec), encoding="utf-8")
    for r in report.runs:
        stem = f"run_{r.index:03d}"
        write_presentations(r.records, out / f"{stem}_presentations.csv")
        write_mcav(r.mcav, out / f"{stem}_mcav.csv")
        write_stats(r, out / f"{stem}_stats.csv")
        if r.accuracy is not None:
            write_accuracy(r.accuracy, out / f"{stem}_accuracy.csv")
    with open(out / "mcav_summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["antigen_id", "name", "label", "runs", "mean", "stdev"])
        for s in report.summary.values():
            w.writerow([s.antigen, s.name or "", s.label or "", s.runs, repr(s.mean), repr(s.stdev)])
    if report.accuracy is not None:
        write_accuracy(report.accuracy, out / "accuracy.csv")


def write_stats(result: RunResult, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerow(["seed", result.seed])
        for key, value in result.stats.__dict__.items():
            w.writerow([key, value])
