import math

import numpy as np
import pytest

from tickwork.errors import BoundViolationError, ParameterError
from tickwork.processes import (occupancy_fraction, telegraph_sample,
                                thinning_sample)
from tickwork.streams import RngStream


def test_homogeneous_count():
    rec = thinning_sample(lambda t: 2.0, 2.0, 1000.0, RngStream(4, 0))
    assert abs(len(rec) - 2000) < 4.0 * math.sqrt(2000.0)


def test_zero_intensity_is_empty():
    rec = thinning_sample(lambda t: 0.0, 1.0, 100.0, RngStream(4, 0))
    assert len(rec) == 0


def test_modulated_intensity_mean_count_matches_quadrature():
    # lambda(t) = exp(1.2 sin(2 pi t)); oracle: trapezoid integral of the
    # intensity over the horizon
    amp = 4.0 * 0.3  # 4*eta*r with eta=0.3, r=1 -> modulation depth 1.2
    lam = lambda t: math.exp(amp * math.sin(2.0 * math.pi * t))
    horizon = 100.0
    grid = np.linspace(0.0, horizon, 200_001)
    expected = np.trapezoid(np.exp(amp * np.sin(2.0 * np.pi * grid)), grid)
    counts = [len(thinning_sample(lam, math.exp(amp), horizon,
                                  RngStream(9, k))) for k in range(50)]
    assert abs(np.mean(counts) - expected) < 0.05 * expected


def test_bound_violation_detected():
    with pytest.raises(BoundViolationError):
        thinning_sample(lambda t: 2.0, 1.0, 50.0, RngStream(0, 0))


def test_thinning_determinism():
    a = thinning_sample(lambda t: 1.5, 2.0, 200.0, RngStream(5, 1))
    b = thinning_sample(lambda t: 1.5, 2.0, 200.0, RngStream(5, 1))
    assert np.array_equal(a.times, b.times)


def test_telegraph_symmetric_occupancy():
    rec = telegraph_sample(1.0, 1.0, "down", 10_000.0, RngStream(2, 0))
    assert abs(occupancy_fraction(rec, "down") - 0.5) < 0.02 * 0.5 + 0.01


def test_telegraph_thermal_occupancy():
    # rates gamma*nbar up / gamma*(nbar+1) down -> up fraction nbar/(2nbar+1)
    n_bar = 0.9
    rec = telegraph_sample(n_bar, n_bar + 1.0, "down", 20_000.0,
                           RngStream(2, 1))
    expected = n_bar / (2.0 * n_bar + 1.0)
    assert abs(occupancy_fraction(rec, "down") - expected) < 0.02 * expected + 0.005


def test_telegraph_absorbing_states():
    # zero exit rate from the initial state: nothing ever happens
    rec = telegraph_sample(1.0, 0.0, "up", 100.0, RngStream(1, 0))
    assert len(rec) == 0
    rec = telegraph_sample(0.0, 1.0, "down", 100.0, RngStream(1, 0))
    assert len(rec) == 0


def test_telegraph_alternates_labels():
    rec = telegraph_sample(2.0, 3.0, "down", 50.0, RngStream(8, 0))
    assert rec.labels[0] == "up"
    assert all(a != b for a, b in zip(rec.labels, rec.labels[1:]))


def test_telegraph_rejects_bad_rates():
    with pytest.raises(ParameterError):
        telegraph_sample(0.0, 0.0, "down", 10.0, RngStream(0, 0))
    with pytest.raises(ParameterError):
        telegraph_sample(-1.0, 1.0, "down", 10.0, RngStream(0, 0))
    with pytest.raises(ParameterError):
        telegraph_sample(1.0, 1.0, "sideways", 10.0, RngStream(0, 0))


def test_event_record_invariants():
    from tickwork.records import EventRecord

    with pytest.raises(ParameterError):
        EventRecord([2.0, 1.0], ("a", "a"), 10.0)
    with pytest.raises(ParameterError):
        EventRecord([2.0, 11.0], ("a", "a"), 10.0)
    rec = EventRecord([1.0, 2.0, 2.0], ("a", "b", "a"), 10.0)
    assert rec.count("a") == 2
    assert np.array_equal(rec.times_of("b"), [2.0])
