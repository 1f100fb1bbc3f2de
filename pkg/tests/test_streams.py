import numpy as np
import pytest

from tickwork.errors import ParameterError
from tickwork.streams import RngStream, wiener_increments


def test_same_pair_reproduces_draws():
    a = RngStream(1, 0).generator().standard_normal(1000)
    b = RngStream(1, 0).generator().standard_normal(1000)
    assert np.array_equal(a, b)


def test_distinct_indices_are_uncorrelated():
    n = 100_000
    a = RngStream(7, 0).generator().standard_normal(n)
    b = RngStream(7, 1).generator().standard_normal(n)
    rho = np.corrcoef(a, b)[0, 1]
    assert abs(rho) < 0.05


def test_distinct_seeds_differ():
    a = RngStream(1, 0).generator().standard_normal(8)
    b = RngStream(2, 0).generator().standard_normal(8)
    assert not np.array_equal(a, b)


def test_wiener_moments():
    n, dt = 100_000, 0.01
    dw = wiener_increments(RngStream(1, 0), n, dt)
    assert len(dw) == n
    assert abs(dw.mean()) < 4.0 * np.sqrt(dt / n)
    assert abs(dw.var() - dt) < 0.05 * dt


def test_wiener_determinism():
    a = wiener_increments(RngStream(1, 3), 64, 0.1)
    b = wiener_increments(RngStream(1, 3), 64, 0.1)
    assert np.array_equal(a, b)


def test_wiener_rejects_degenerate_step():
    with pytest.raises(ParameterError):
        wiener_increments(RngStream(1, 0), 1, 0.0)
    with pytest.raises(ParameterError):
        wiener_increments(RngStream(1, 0), 1, -0.1)
    with pytest.raises(ParameterError):
        wiener_increments(RngStream(1, 0), 0, 0.1)


def test_negative_stream_index_rejected():
    with pytest.raises(ParameterError):
        RngStream(1, -1)


def test_substream_is_deterministic_and_distinct():
    s = RngStream(5, 2)
    assert s.substream(3) == s.substream(3)
    assert s.substream(3) != s.substream(4)
