import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dca.model import (
    DEFAULT_WEIGHTS,
    OutputVector,
    SignalVector,
    WeightMatrix,
    transform,
    transform_array,
)
from oracles import hand_transform

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@pytest.mark.parametrize(
    "signals, expected",
    [
        ((0, 0, 0, 0), (0.0, 0.0, 0.0)),
        ((1, 0, 0, 0), (2 / 5, 0.0, 2 / 6)),
        ((0, 0, 1, 0), (2 / 5, 1.0, -3 / 6)),
        ((1, 0, 0, 1), (4 / 5, 0.0, 4 / 6)),
    ],
)
def test_worked_examples(signals, expected):
    out = transform(SignalVector(*signals))
    assert out.as_tuple() == pytest.approx(expected, abs=1e-12)


def test_default_weights_rows():
    assert DEFAULT_WEIGHTS.rows == ((2, 1, 2), (0, 0, 3), (2, 1, -3))
    assert DEFAULT_WEIGHTS.norms == (5, 3, 6)


@pytest.mark.parametrize("bad", [-0.1, 1.5, math.nan, math.inf])
def test_signal_vector_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        SignalVector(pamp=bad)


def test_weight_matrix_validation():
    with pytest.raises(ValueError, match="semi"):
        WeightMatrix([[1, 1, 1], [0, 0, 0], [1, 1, 1]])
    with pytest.raises(ValueError, match="3x3"):
        WeightMatrix([[1, 1], [1, 1]])
    with pytest.raises(ValueError, match="non-finite"):
        WeightMatrix([[1, 1, math.nan], [1, 1, 1], [1, 1, 1]])


def test_custom_weights():
    w = WeightMatrix([[1, 0, 0], [0, 1, 0], [0, 0, -1]])
    out = transform(SignalVector(0.5, 0.25, 1.0), w)
    assert out == OutputVector(0.5, 0.25, -1.0)


@given(unit, unit, unit, unit)
def test_matches_hand_formula(p, d, s, i):
    out = transform(SignalVector(p, d, s, i))
    assert out.as_tuple() == pytest.approx(hand_transform(p, d, s, i), abs=1e-12)


@given(unit, unit, unit, unit)
def test_inflammation_scales_every_output(p, d, s, i):
    base = transform(SignalVector(p, d, s, 0.0))
    amped = transform(SignalVector(p, d, s, i))
    for b, a in zip(base.as_tuple(), amped.as_tuple()):
        assert a == pytest.approx(b * (1 + i), abs=1e-12)


@given(unit)
def test_inflammation_alone_does_nothing(i):
    assert transform(SignalVector(inflammatory=i)).as_tuple() == (0.0, 0.0, 0.0)


@given(unit, unit, unit, unit)
def test_bounded(p, d, s, i):
    for v in transform(SignalVector(p, d, s, i)).as_tuple():
        assert -1.0 <= v <= 2.0


@given(unit, unit, unit, unit)
def test_transform_array_agrees(p, d, s, i):
    arr = transform_array(np.array([[p, d, s, i]]))
    assert arr[0] == pytest.approx(transform(SignalVector(p, d, s, i)).as_tuple(), abs=1e-12)


def test_transform_array_rejects_bad_shape():
    with pytest.raises(ValueError):
        transform_array(np.zeros((2, 3)))


@given(unit, unit, unit, st.floats(0.0, 1.0))
def test_linear_without_inflammation(p, d, s, a):
    sv = SignalVector(p, d, s)
    scaled = transform(sv.scaled(a)).as_tuple()
    assert scaled == pytest.approx(tuple(a * v for v in transform(sv).as_tuple()), abs=1e-12)


@given(unit, unit, unit, unit, unit)
def test_monotone_in_each_signal(p, d, s, i, bump):
    out = transform(SignalVector(p, d, s, i))
    up_p = transform(SignalVector(max(p, bump), d, s, i))
    up_d = transform(SignalVector(p, max(d, bump), s, i))
    up_s = transform(SignalVector(p, d, max(s, bump), i))
    for up in (up_p, up_d):
        assert up.csm >= out.csm and up.mat >= out.mat
    assert up_s.semi >= out.semi and up_s.mat <= out.mat
