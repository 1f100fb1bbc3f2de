import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tickwork import pendulum as pend
from tickwork.errors import ParameterError, UnsupportedCaseError
from tickwork.kernels import phase_paths
from tickwork.streams import RngStream

SIN01 = math.asin(0.1)
FIG = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=SIN01, sigma=0.0)


def test_kick_force_directions():
    p = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=0.0)
    assert pend.kick_force(0.0, 1.0, p) == pytest.approx(0.1)
    assert pend.kick_force(0.0, -1.0, p) == pytest.approx(-0.1)
    assert pend.kick_force(1.0, 0.0, FIG) == pytest.approx(-0.1)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_kick_force_antisymmetry(x, y):
    assert pend.kick_force(-x, -y, FIG) == -pend.kick_force(x, y, FIG)


def test_limit_cycle_radius_value():
    # 4 mu cos(psi0) / (pi Gamma) at the reference parameters
    assert pend.limit_cycle_radius(FIG) == pytest.approx(1.26686, abs=5e-5)


def test_noisy_radius_reduces_at_zero_noise():
    assert pend.limit_cycle_radius(FIG, with_noise=True) == \
        pend.limit_cycle_radius(FIG)
    noisy = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=SIN01, sigma=0.2)
    assert pend.limit_cycle_radius(noisy, with_noise=True) > \
        pend.limit_cycle_radius(noisy)
    # the two noise-term conventions differ except at Gamma = 2
    assert pend.limit_cycle_radius(noisy, True, quadratic_root=True) != \
        pend.limit_cycle_radius(noisy, True)
    g2 = pend.PendulumParams(Gamma=2.0, mu=0.5, psi0=0.0, sigma=0.3)
    assert pend.limit_cycle_radius(g2, True, True) == \
        pytest.approx(pend.limit_cycle_radius(g2, True), rel=1e-14)


def test_on_cycle_energy_value():
    assert pend.on_cycle_energy(FIG) == pytest.approx(0.80246, abs=5e-5)


def test_param_validation():
    with pytest.raises(ParameterError):
        pend.PendulumParams(Gamma=0.0, mu=0.1)
    with pytest.raises(ParameterError):
        pend.PendulumParams(Gamma=0.1, mu=-0.1)
    with pytest.raises(ParameterError):
        pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=2.0)
    with pytest.raises(ParameterError):
        pend.PendulumParams(Gamma=0.1, mu=0.1, sigma=-1.0)


def test_dimensional_constructor():
    p = pend.PendulumParams.from_dimensional(m=1.0, l=1.0, gamma=0.02,
                                             T=300.0, mu=0.1)
    omega = math.sqrt(9.81)
    kB = 1.380649e-23
    assert p.Dprime == pytest.approx(2 * omega * 0.02 * kB * 300 / 9.81**2)
    assert p.sigma == pytest.approx(math.sqrt(p.Dprime / 2))


def test_deterministic_simulation_settles_on_cycle():
    traj = pend.simulate_pendulum(FIG, 1e-3, 400.0)
    x, y = traj.component("x"), traj.component("y")
    late = traj.times > 200.0
    r = np.sqrt(x[late] ** 2 + y[late] ** 2)
    assert abs(r.mean() / pend.limit_cycle_radius(FIG) - 1.0) < 0.02


def test_deterministic_tick_period():
    traj = pend.simulate_pendulum(FIG, 1e-3, 400.0)
    from tickwork.metrics import extract_ticks

    ticks = extract_ticks(traj, "kick-transition", component="K")
    late = ticks.tick_times[ticks.tick_times > 200.0]
    period = float(np.diff(late).mean())
    assert period == pytest.approx(6.26, abs=0.02)   # regression pin
    assert abs(period - 6.35) <= 0.1                 # reference window


def test_undriven_pendulum_decays_exponentially():
    p = pend.PendulumParams(Gamma=0.1, mu=0.0, psi0=0.0)
    traj = pend.simulate_pendulum(p, 1e-3, 60.0, x0=(1.0, 0.0))
    x, y = traj.component("x"), traj.component("y")
    energy = 0.5 * (x**2 + y**2)
    # compare the energy envelope (amplitude^2) against e^(-Gamma t)
    fit = np.polyfit(traj.times[1:], np.log(energy[1:]), 1)[0]
    assert abs(fit + p.Gamma) < 0.05 * p.Gamma


def test_simulation_rejects_coarse_dt():
    with pytest.raises(ParameterError):
        pend.simulate_pendulum(FIG, 0.5, 10.0)


def test_phase_deterministic_switch_spacing():
    traj = pend.simulate_phase_on_cycle(FIG, 1e-3, 60.0)
    switches = pend.switch_times(traj)
    gaps = np.diff(switches)
    assert np.allclose(gaps, math.pi / FIG.omega_tilde, atol=2e-3)
    # ledger invariant: deterministic entries identical to 1e-6 relative
    led = pend.cycle_ledger(traj, FIG)
    assert np.ptp(led.periods) < 1e-6 * led.periods.mean()
    assert np.ptp(led.works) < 1e-6 * abs(led.works.mean())


def test_phase_noise_requires_stream():
    noisy = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=0.0, sigma=0.1)
    with pytest.raises(ParameterError):
        pend.simulate_phase_on_cycle(noisy, 1e-3, 10.0)


def test_switch_time_variance_grows_linearly():
    # first-passage of drifted Brownian phase: Var(t_n) = (sigma/r*)^2 pi n
    # per switch (drift 1); fit the growth over 500 trials
    params = pend.PendulumParams(Gamma=1.0, mu=1.0, psi0=0.0, sigma=0.1)
    r_star = pend.limit_cycle_radius(params)
    predicted = (params.sigma / r_star) ** 2 * math.pi
    n_switch = 16
    times = np.full((500, n_switch), np.nan)
    for i in range(500):
        tr = pend.simulate_phase_on_cycle(params, 1e-3, 60.0,
                                          RngStream(31, i))
        tk = pend.switch_times(tr)
        take = min(n_switch, len(tk))
        times[i, :take] = tk[:take]
    var = np.nanvar(times, axis=0)
    slope = np.polyfit(np.arange(1, n_switch + 1), var, 1)[0]
    assert abs(slope / predicted - 1.0) < 0.2


def test_mean_kick_signal_limits():
    assert pend.mean_kick_signal(0.0, FIG_PSI0) == 0.0
    # noiseless square-wave value at a quarter period is mu (Leibniz sum)
    val = pend.mean_kick_signal(math.pi / 2.0, FIG_PSI0)
    assert val == pytest.approx(FIG_PSI0.mu, abs=1e-4)
    with pytest.raises(UnsupportedCaseError):
        pend.mean_kick_signal(1.0, FIG)


FIG_PSI0 = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=0.0, sigma=0.0)


def test_mean_kick_signal_matches_ensemble():
    # analytic enveloped series vs 100-trial Monte Carlo mean, 3 sigma
    params = pend.PendulumParams(Gamma=1.0, mu=1.0, psi0=0.0, sigma=0.2)
    trials = 100
    streams = [RngStream(77, k) for k in range(trials)]
    r_star = pend.limit_cycle_radius(params)
    rec = phase_paths(np.zeros(trials), omega=1.0,
                      noise_scale=params.sigma / r_star, mu=params.mu,
                      psi_offset=0.0, dt=1e-3, n_steps=30_000,
                      streams=streams, record_every=100)
    k_mean = rec[:, :, 1].mean(axis=0)
    k_sem = rec[:, :, 1].std(axis=0, ddof=1) / math.sqrt(trials)
    t = (np.arange(1, 301)) * 0.1
    analytic = pend.mean_kick_signal(t, params)
    z = np.abs(k_mean - analytic) / np.maximum(k_sem, 1e-12)
    assert float(z.max()) < 3.0


def test_cycle_ledger_deterministic_work_relation():
    traj = pend.simulate_phase_on_cycle(FIG, 1e-3, 120.0)
    led = pend.cycle_ledger(traj, FIG)
    assert len(led) > 10
    slope = 2 * FIG.mu * pend.limit_cycle_radius(FIG) \
        * math.cos(FIG.psi0) / math.pi
    assert np.allclose(led.works, slope * led.periods, rtol=1e-3)
    assert np.allclose(led.heats, led.works / FIG.Gamma)


def test_cycle_ledger_needs_phase_trajectory():
    traj = pend.simulate_pendulum(FIG, 1e-3, 30.0)
    with pytest.raises(ParameterError):
        pend.cycle_ledger(traj, FIG)


def test_empty_ledger_when_no_full_cycle():
    traj = pend.simulate_phase_on_cycle(FIG, 1e-3, 2.0)
    led = pend.cycle_ledger(traj, FIG)
    assert len(led) == 0


def test_half_cycle_work_slope_brackets_reference():
    # 50 noisy half-cycles: W-vs-T regression slope near
    # 2 mu r* cos(psi0)/pi = 0.0778
    params = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=math.asin(0.2),
                                 sigma=0.1)
    traj = pend.simulate_phase_on_cycle(params, 1e-3, 170.0,
                                        RngStream(5, 0))
    ht, hw = pend.half_cycle_samples(traj, params)
    assert len(ht) >= 50
    slope = float(np.polyfit(ht[:50], hw[:50], 1)[0])
    assert 0.06 <= slope <= 0.10


def test_heat_period_fluctuations_track():
    # quadrature work carries path noise on top of duration noise, so the
    # correlation sits below the proportional-heat identity (exactly 1)
    params = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=math.asin(0.2),
                                 sigma=0.1)
    traj = pend.simulate_phase_on_cycle(params, 1e-3, 3300.0,
                                        RngStream(5, 0))
    led = pend.cycle_ledger(traj, params)
    assert len(led) >= 500
    corr = np.corrcoef(led.heats, led.periods)[0, 1]
    assert corr > 0.8
    slope = np.polyfit(led.periods / led.periods.mean() - 1.0,
                       led.heats / led.heats.mean() - 1.0, 1)[0]
    assert slope == pytest.approx(1.0, abs=0.05)
    prop = np.corrcoef(led.periods * (2 * params.mu / math.pi), led.periods)
    assert prop[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_fixed_point_consistency_across_drive_ratios():
    for mu_over_gamma in (0.5, 2.0, 5.0):
        p = pend.PendulumParams(Gamma=0.1, mu=0.1 * mu_over_gamma,
                                psi0=0.05)
        traj = pend.simulate_pendulum(p, 1e-3, 300.0)
        x, y = traj.component("x"), traj.component("y")
        late = traj.times > 150.0
        r = np.sqrt(x[late] ** 2 + y[late] ** 2).mean()
        assert abs(r / pend.limit_cycle_radius(p) - 1.0) < 0.02


def test_period_variance_scales_inverse_square_of_radius():
    # sweep mu at fixed sigma: log-log slope of Var(T) vs r* is -2
    sigma = 0.1
    rs, vs = [], []
    for mu in (0.05, 0.1, 0.2):
        p = pend.PendulumParams(Gamma=0.1, mu=mu, psi0=0.0, sigma=sigma)
        traj = pend.simulate_phase_on_cycle(p, 1e-3, 1500.0,
                                            RngStream(9, 0))
        led = pend.cycle_ledger(traj, p)
        rs.append(pend.limit_cycle_radius(p))
        vs.append(led.periods.var(ddof=1))
    slope = np.polyfit(np.log(rs), np.log(vs), 1)[0]
    assert abs(slope + 2.0) < 0.3


def test_energy_balance_on_cycle():
    # escapement power in == dissipated power out, deterministic cycle
    traj = pend.simulate_pendulum(FIG, 1e-3, 400.0)
    late = traj.times > 300.0
    y = traj.component("y")[late]
    k = traj.component("K")[late]
    p_in = (k * y).mean()
    p_out = FIG.Gamma * (y * y).mean()
    assert abs(p_in / p_out - 1.0) < 0.02


def test_period_variance_ratio_tracks_sigma_squared():
    variances = {}
    for sigma in (0.05, 0.1, 0.2):
        p = pend.PendulumParams(Gamma=0.1, mu=0.1, psi0=0.0, sigma=sigma)
        traj = pend.simulate_phase_on_cycle(p, 1e-3, 2000.0,
                                            RngStream(6, 0))
        led = pend.cycle_ledger(traj, p)
        variances[sigma] = led.periods.var(ddof=1)
    assert abs(variances[0.1] / variances[0.05] / 4.0 - 1.0) < 0.3
    assert abs(variances[0.2] / variances[0.1] / 4.0 - 1.0) < 0.3
