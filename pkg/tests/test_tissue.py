import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dca.model import SignalVector
from dca.tissue import ACCEPTED, DROPPED, Tissue


def test_update_signals_overwrites():
    t = Tissue()
    t.update_signals(SignalVector(1, 0, 0, 0))
    assert t.signals == SignalVector(1, 0, 0, 0)
    t.update_signals(SignalVector(0, 0.5, 0, 0))
    assert t.signals == SignalVector(0, 0.5, 0, 0)


def test_drop_new_when_full():
    t = Tissue(capacity=2)
    assert [t.deposit_antigen(a) for a in (5, 5, 7)] == [ACCEPTED, ACCEPTED, DROPPED]
    assert t.store == [5, 5]
    assert t.stats.dropped == 1


def test_default_capacity_accepts_ten():
    t = Tissue()
    assert t.capacity == 500
    assert all(t.deposit_antigen(a) == ACCEPTED for a in range(10))
    assert len(t) == 10


def test_sampling_examples():
    rng = np.random.default_rng(0)
    t = Tissue()
    t.deposit_antigen(3)
    assert t.sample_antigen(1, rng) == [3]
    assert len(t) == 0
    assert t.sample_antigen(1, rng) == []

    for a in range(10):
        t.deposit_antigen(a)
    taken = t.sample_antigen(10, rng)
    assert sorted(taken) == list(range(10))
    assert len(t) == 0


def test_capacity_must_be_positive():
    with pytest.raises(ValueError):
        Tissue(capacity=0)


@given(
    st.lists(st.integers(0, 5), max_size=40),
    st.integers(1, 10),
    st.lists(st.integers(0, 4), max_size=20),
    st.integers(0, 2**32 - 1),
)
def test_conservation_and_no_fabrication(deposits, capacity, draws, seed):
    rng = np.random.default_rng(seed)
    t = Tissue(capacity=capacity)
    sampled = []
    it = iter(draws)
    for a in deposits:
        t.deposit_antigen(a)
        q = next(it, None)
        if q is not None:
            sampled.extend(t.sample_antigen(q, rng))
    assert len(t) <= capacity
    assert t.stats.deposited == t.stats.sampled + t.stats.dropped + len(t)
    assert t.stats.sampled == len(sampled)
    for a in set(sampled) | set(t.store):
        assert sampled.count(a) + t.store.count(a) <= deposits.count(a)


def test_sampling_is_deterministic():
    def go(seed):
        t = Tissue()
        for a in range(50):
            t.deposit_antigen(a)
        return t.sample_antigen(20, np.random.default_rng(seed))

    assert go(4) == go(4)
    assert go(4) != go(5)
