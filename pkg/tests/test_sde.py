import math

import numpy as np
import pytest

from tickwork.errors import NumericalBlowupError, ParameterError
from tickwork.sde import StochasticProcessSpec, ito_step, run_ensemble
from tickwork.streams import RngStream


def test_ito_step_identity():
    x = np.array([1.5, -2.0])
    out = ito_step(x, lambda s: 0.0 * s, lambda s: 0.0 * s, 0.1,
                   np.array([0.3, 0.3]))
    assert np.array_equal(out, x)


def test_ito_step_exponential_decay():
    # dx = -x dt: 1e4 Euler steps of 1e-4 land on e^-1 to ~1e-3
    x = np.array([1.0])
    for _ in range(10_000):
        x = ito_step(x, lambda s: -s, lambda s: 0.0 * s, 1e-4,
                     np.array([0.0]))
    assert abs(x[0] - math.exp(-1.0)) < 1e-3


def test_ito_step_rejects_bad_dt():
    with pytest.raises(ParameterError):
        ito_step(np.ones(1), lambda s: s, lambda s: s, 0.0, np.zeros(1))


def test_ito_step_blowup_detected():
    with pytest.raises(NumericalBlowupError):
        ito_step(np.array([1e308]), lambda s: s * 1e10, lambda s: 0.0 * s,
                 1.0, np.zeros(1))


def _diffusion_spec(Gamma=0.04, dt=0.05):
    return StochasticProcessSpec(
        drift=lambda x: 0.0 * x,
        diffusion=lambda x: np.full_like(x, math.sqrt(Gamma)),
        x0=[0.0], dt=dt, horizon=10.0, labels=("x",),
        params={"Gamma": Gamma}, record_every=100)


def test_pure_diffusion_variance():
    # Var[x(t)] = Gamma * t (Euler is exact for additive noise)
    results = run_ensemble(_diffusion_spec(), 1200, master_seed=11)
    finals = np.array([tr.states[-1, 0] for tr in results])
    assert abs(finals.var() - 0.4) < 0.04


def test_single_trial_equals_stream_zero():
    spec = _diffusion_spec()
    direct = spec.simulate(RngStream(21, 0))
    (via_ensemble,) = run_ensemble(spec, 1, master_seed=21)
    assert np.array_equal(direct.states, via_ensemble.states)


def test_worker_count_does_not_change_results(monkeypatch):
    spec = _diffusion_spec()
    monkeypatch.setenv("TICKWORK_THREADS", "1")
    serial = run_ensemble(spec, 8, master_seed=3)
    monkeypatch.setenv("TICKWORK_THREADS", "4")
    threaded = run_ensemble(spec, 8, master_seed=3)
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.states, b.states)


@pytest.mark.filterwarnings("ignore:overflow")
def test_ensemble_attaches_trial_index_to_failures():
    spec = StochasticProcessSpec(
        drift=lambda x: x * 1e8, diffusion=lambda x: 0.0 * x,
        x0=[1e300], dt=1.0, horizon=3.0, labels=("x",))
    with pytest.raises(NumericalBlowupError) as err:
        run_ensemble(spec, 3, master_seed=0)
    assert err.value.trial is not None


def test_ensemble_rejects_zero_trials():
    with pytest.raises(ParameterError):
        run_ensemble(_diffusion_spec(), 0, master_seed=0)


def test_trajectory_grid_validation():
    from tickwork.records import Trajectory

    with pytest.raises(ParameterError):
        Trajectory([0.0, 0.1, 0.15], np.zeros((3, 1)), ("x",))
    with pytest.raises(ParameterError):
        Trajectory([0.0, 0.1], np.zeros((3, 1)), ("x",))
    tr = Trajectory([0.0, 0.1, 0.2], np.arange(6.0).reshape(3, 2),
                    ("a", "b"))
    assert tr.dt == pytest.approx(0.1)
    assert np.array_equal(tr.component("b"), [1.0, 3.0, 5.0])
