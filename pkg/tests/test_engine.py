import numpy as np
import pytest

from dca.aggregation import MATURE, SEMI_MATURE, LymphNode, compute_mcav
from dca.engine import DendriticCell, EngineConfig, cell_cycle, init_population, run
from dca.events import AntigenEvent, SignalEvent
from dca.model import SignalVector
from dca.tissue import Tissue
from oracles import hand_simulate, random_micro_stream


def to_events(micro):
    out = []
    for kind, t, payload in micro:
        out.append(SignalEvent(t, SignalVector(*payload)) if kind == "signal" else AntigenEvent(t, payload))
    return out


def test_init_population_thresholds_in_range():
    cells = init_population(EngineConfig(population=100, threshold_range=(0.3, 0.7)), np.random.default_rng(1))
    assert len(cells) == 100
    assert all(0.3 <= c.threshold <= 0.7 for c in cells)
    assert all(c.age == 0 and not c.antigen and c.csm == 0 for c in cells)


def test_degenerate_threshold_range():
    (cell,) = init_population(EngineConfig(population=1, threshold_range=(0.5, 0.5)), np.random.default_rng(1))
    assert cell.threshold == 0.5


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(population=0), "population"),
        (dict(antigen_capacity=0), "antigen_capacity"),
        (dict(sample_count=0), "sample_count"),
        (dict(tissue_capacity=0), "tissue_capacity"),
        (dict(cycles=0), "cycles"),
        (dict(threshold_range=(0.0, 0.5)), "threshold_range"),
        (dict(threshold_range=(0.6, 0.5)), "threshold_range"),
    ],
)
def test_config_rejects(kwargs, field):
    with pytest.raises(ValueError, match=field):
        EngineConfig(**kwargs)


def _two_cycle_trace(signals):
    cfg = EngineConfig(population=1, threshold_range=(0.5, 0.5))
    rng = np.random.default_rng(0)
    pop = init_population(cfg, rng)
    tissue = Tissue()
    tissue.update_signals(signals)
    tissue.deposit_antigen(42)
    lymph = LymphNode()
    first = cell_cycle(pop, tissue, cfg, rng, lymph, cycle=0)
    assert first.migrations == 0
    assert pop[0].csm == pytest.approx(0.4)
    assert pop[0].antigen == [42]
    cell = DendriticCell(**pop[0].__dict__)
    second = cell_cycle(pop, tissue, cfg, rng, lymph, cycle=1)
    assert second.migrations == 1
    return cell, lymph.records, pop[0]


def test_hand_trace_mature():
    before, records, after = _two_cycle_trace(SignalVector(1, 0, 0, 0))
    assert [(r.cycle, r.antigen, r.context) for r in records] == [(1, 42, MATURE)]
    assert after.antigen == [] and after.csm == 0 and after.age == 0


def test_hand_trace_semi_mature():
    _, records, _ = _two_cycle_trace(SignalVector(0, 0, 1, 0))
    assert [(r.antigen, r.context) for r in records] == [(42, SEMI_MATURE)]


def test_zero_signals_never_migrate():
    events = [AntigenEvent(0.5, 1), AntigenEvent(0.7, 2)]
    stats, lymph = run(EngineConfig(population=5, cycles=120), events)
    assert stats.migrations == 0 and len(lymph) == 0
    assert stats.residual_cells == 2
    assert stats.conserved()


def test_empty_stream():
    stats, lymph = run(EngineConfig(), [])
    assert stats.cycles == 120 and stats.migrations == 0 and len(lymph) == 0


def test_safe_only_stream_is_semi_mature():
    events = [SignalEvent(0.0, SignalVector(safe=1.0))] + [AntigenEvent(0.1 * k, 7) for k in range(10)]
    stats, lymph = run(EngineConfig(population=10), events)
    assert len(lymph) == 10
    assert {r.context for r in lymph} == {SEMI_MATURE}
    assert stats.conserved()


def test_capacity_overflow_is_discarded_and_counted():
    events = [SignalEvent(0.0, SignalVector(safe=1.0))] + [AntigenEvent(0.0, k) for k in range(6)]
    cfg = EngineConfig(population=1, antigen_capacity=1, sample_count=3, threshold_range=(10.0, 10.0), cycles=2)
    stats, lymph = run(cfg, events)
    assert stats.sampled == 6 and stats.discarded == 5
    assert stats.drained == 1 and stats.presented == 1
    assert stats.conserved()


def test_events_after_last_cycle_are_unconsumed():
    events = [AntigenEvent(1.0, 1), AntigenEvent(5.0, 2)]
    stats, _ = run(EngineConfig(cycles=3), events)
    assert stats.deposited == 1 and stats.unconsumed_events == 1


def test_out_of_order_stream_rejected():
    with pytest.raises(ValueError, match="out of order"):
        run(EngineConfig(), [AntigenEvent(3.0, 1), AntigenEvent(1.0, 2)])


def test_deterministic():
    rng = np.random.default_rng(3)
    events = [SignalEvent(float(t), SignalVector(*rng.random(3))) for t in range(30)]
    events += [AntigenEvent(t + 0.5, int(rng.integers(5))) for t in range(30)]
    events.sort(key=lambda e: e.timestamp)
    a = run(EngineConfig(seed=9, cycles=40), events)[1].records
    b = run(EngineConfig(seed=9, cycles=40), events)[1].records
    assert a == b and len(a) > 0


def test_matches_hand_simulation():
    rng = np.random.default_rng(2024)
    for trial in range(200):
        micro = random_micro_stream(rng)
        cycles = int(rng.integers(1, 9))
        capacity = int(rng.integers(1, 4))
        lo = float(rng.uniform(0.05, 1.0))
        hi = lo + float(rng.uniform(0, 0.8)) * (trial % 2)
        seed = int(rng.integers(2**31))
        cfg = EngineConfig(
            population=1,
            antigen_capacity=1,
            sample_count=1,
            tissue_capacity=capacity,
            cycles=cycles,
            threshold_range=(lo, hi),
            seed=seed,
        )
        stats, lymph = run(cfg, to_events(micro))
        expected, counts = hand_simulate(micro, cycles, capacity, lo, hi, seed)
        assert [(r.cycle, r.antigen, r.context) for r in lymph] == expected, micro
        assert stats.dropped == counts["dropped"]
        assert stats.discarded == counts["discarded"]
        assert stats.residual_tissue == counts["residual_tissue"]
        assert stats.conserved()


def test_population_conservation_and_reset():
    rng = np.random.default_rng(11)
    events = []
    for t in range(60):
        events.append(SignalEvent(float(t), SignalVector(*rng.random(3))))
        events.extend(AntigenEvent(t + float(u), int(rng.integers(4))) for u in np.sort(rng.random(60)))
    cfg = EngineConfig(population=20, antigen_capacity=5, sample_count=2, tissue_capacity=40, cycles=60, seed=1)
    stats, lymph = run(cfg, events)
    assert stats.dropped > 0 and stats.discarded > 0
    assert stats.conserved()
    report = compute_mcav(lymph.records)
    assert sum(s.presentations for s in report.scores.values()) == len(lymph)
