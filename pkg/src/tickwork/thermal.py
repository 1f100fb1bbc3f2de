"""Non-periodic clocks: counting irreversible events instead of cycles.

Covered here:

* radiocarbon-style decay counting: t_est = N/gamma with relative error
  1/sqrt(N);
* a three-body Newton-cooling clock (temperatures relax to the common
  mean at rate 3k, so a thermometer reading dates the system);
* a two-level system (TLS) in a thermal bath: continuously monitoring its
  energy yields a random telegraph signal whose transition count is a
  clock, with the exact time/temperature duality t_est * T_est = eps N /
  (gamma kB) at fixed count;
* the dispersively measured TLS: the reduced conditional master equation

      drho = -i (Delta + eps/hbar) [sz, rho] dt
             + gamma (Nbar+1) D[s-] rho dt + gamma Nbar D[s+] rho dt
             + Gam D[sz] rho dt + sqrt(eta Gam) H[sz] rho dW

  with homodyne record I dt = <sz> dt + dW/sqrt(eta Gam); quantum jumps
  are visible when Gam >> gamma Nbar and a boxcar filter recovers the
  telegraph;
* the Tolman product T0 sqrt(g44) (equilibrium temperature in a static
  metric) and its special-relativity limit;
* a stochastic-tick evolution map: averaging unitary increments whose
  count is Poisson (rate gamma nbar) gives

      drho/dt = gamma nbar (U rho U+ - rho),  U = exp(-i H/(hbar gamma nbar)),

  which fixes energy-diagonal states, reproduces unitary dynamics in the
  fast-tick limit, and damps coherences at gamma nbar (1 - cos(dE/(hbar
  gamma nbar))) otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import kernels
from .errors import ParameterError, UnreliableDetectionWarning
from .records import EstimateRecord, EventRecord, Trajectory
from .streams import RngStream


# ---------------------------------------------------------------------------
# parameters and states


@dataclass(frozen=True)
class TlsParams:
    """Two-level system in a thermal bath, optionally with dispersive
    readout.

    Either `n_bar` or `beta` fixes the bath occupation (they must agree if
    both are given: n_bar = 1/(exp(beta*eps) - 1)).  The measurement rate
    `Gamma_meas` may be given directly or derived from the readout-cavity
    parameters via Delta = 4 chi E^2/kappa^2 and Gamma = 4 Delta chi/kappa.
    """

    epsilon: float
    gamma: float
    n_bar: float | None = None
    beta: float | None = None
    Gamma_meas: float = 0.0
    Delta: float = 0.0
    chi_disp: float | None = None
    E_drive: float | None = None
    kappa_cav: float | None = None
    eta_det: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0 or self.gamma <= 0:
            raise ParameterError("epsilon and gamma must be positive")
        if not 0 < self.eta_det <= 1:
            raise ParameterError("eta_det must lie in (0, 1]")
        n_bar, beta = self.n_bar, self.beta
        if n_bar is None and beta is None:
            raise ParameterError("give n_bar or beta")
        if beta is not None:
            if beta < 0:
                raise ParameterError("beta must be non-negative")
            derived = 1.0 / math.expm1(beta * self.epsilon) if beta > 0 \
                else math.inf
            if n_bar is None:
                n_bar = derived
            elif not math.isclose(n_bar, derived, rel_tol=1e-9, abs_tol=1e-12):
                raise ParameterError(
                    f"n_bar={n_bar} inconsistent with beta (expect {derived})")
        else:
            if n_bar < 0:
                raise ParameterError("n_bar must be non-negative")
            beta = math.log1p(1.0 / n_bar) / self.epsilon if n_bar > 0 \
                else math.inf
        object.__setattr__(self, "n_bar", n_bar)
        object.__setattr__(self, "beta", beta)
        if self.chi_disp is not None:
            if self.E_drive is None or self.kappa_cav is None:
                raise ParameterError("dispersive readout needs chi, E, kappa")
            delta = 4.0 * self.chi_disp * self.E_drive**2 / self.kappa_cav**2
            gam = 4.0 * delta * self.chi_disp / self.kappa_cav
            for name, given, want in (("Delta", self.Delta, delta),
                                      ("Gamma_meas", self.Gamma_meas, gam)):
                if given and not math.isclose(given, want, rel_tol=1e-9):
                    raise ParameterError(
                        f"{name}={given} inconsistent with readout "
                        f"parameters (expect {want})")
            object.__setattr__(self, "Delta", delta)
            object.__setattr__(self, "Gamma_meas", gam)
        if self.Gamma_meas < 0 or self.Delta < 0:
            raise ParameterError("Gamma_meas and Delta must be non-negative")

    @property
    def rate_up(self) -> float:
        """Thermal excitation rate gamma * n_bar."""
        return self.gamma * self.n_bar

    @property
    def rate_down(self) -> float:
        """Decay rate gamma * (n_bar + 1)."""
        return self.gamma * (self.n_bar + 1.0)


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 (or small d x d) density matrix with eager validation."""

    matrix: np.ndarray
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "meta", dict(self.meta))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError("density matrix must be square")
        if np.linalg.norm(m - m.conj().T) >= 1e-10:
            raise ParameterError("density matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-9:
            raise ParameterError("density matrix must have unit trace")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ParameterError("density matrix must be positive")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def z(self) -> float:
        """<sz> for a 2x2 state in the (excited, ground) basis."""
        if self.dim != 2:
            raise ParameterError("z expectation needs a two-level state")
        return float((self.matrix[0, 0] - self.matrix[1, 1]).real)


def thermal_state(beta: float, epsilon: float) -> DensityMatrix:
    """Thermal TLS state diag(p_e, p_g) with p_e = (1 - tanh(beta eps/2))/2."""
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    th = math.tanh(beta * epsilon / 2.0)
    return DensityMatrix(np.diag([(1.0 - th) / 2.0, (1.0 + th) / 2.0]))


# ---------------------------------------------------------------------------
# counting estimators


def radiocarbon_estimate(N: int, gamma: float) -> EstimateRecord:
    """Elapsed-time estimate from a decay count: t = N/gamma, error 1/sqrt(N)."""
    if N < 0:
        raise ParameterError("count must be non-negative")
    if gamma <= 0:
        raise ParameterError("decay rate must be positive")
    if N == 0:
        return EstimateRecord(0.0, math.nan, {"N": 0, "gamma": gamma},
                              error_defined=False)
    return EstimateRecord(N / gamma, 1.0 / math.sqrt(N),
                          {"N": N, "gamma": gamma})


def tls_time_estimate(N: int, params: TlsParams,
                      high_temperature: bool = False) -> EstimateRecord:
    """Elapsed time from N thermal transitions: t = N/(gamma nbar).

    With `high_temperature`, nbar is replaced by its Rayleigh-Jeans form
    kB T/eps (kB = 1), making the estimate exactly inverse in T.
    """
    if N < 0:
        raise ParameterError("count must be non-negative")
    n_bar = 1.0 / (params.beta * params.epsilon) if high_temperature \
        else params.n_bar
    if n_bar == 0:
        raise ParameterError("no thermal transitions at zero occupation")
    if N == 0:
        return EstimateRecord(0.0, math.nan, {"N": 0}, error_defined=False)
    return EstimateRecord(N / (params.gamma * n_bar), 1.0 / math.sqrt(N),
                          {"N": N, "gamma": params.gamma, "n_bar": n_bar})


def tls_temperature_estimate(N: int, elapsed: float, params: TlsParams,
                             kB: float = 1.0) -> EstimateRecord:
    """Temperature from a count over known elapsed time: kB T = eps N/(gamma t)."""
    if N < 0:
        raise ParameterError("count must be non-negative")
    if elapsed <= 0:
        raise ParameterError("elapsed time must be positive")
    if N == 0:
        return EstimateRecord(0.0, math.nan, {"N": 0}, error_defined=False)
    T = params.epsilon * N / (params.gamma * elapsed * kB)
    return EstimateRecord(T, 1.0 / math.sqrt(N),
                          {"N": N, "elapsed": elapsed})


def duality_product(N: int, params: TlsParams, kB: float = 1.0) -> float:
    """The invariant t_est * T_est = eps N / (gamma kB) at fixed count."""
    return params.epsilon * N / (params.gamma * kB)


def telegraph_record(params: TlsParams, horizon: float, stream: RngStream,
                     initial: str = "down") -> EventRecord:
    """Thermal telegraph of the TLS energy: up at gamma nbar, down at
    gamma (nbar + 1)."""
    from .processes import telegraph_sample

    return telegraph_sample(params.rate_up, params.rate_down, initial,
                            horizon, stream)


# ---------------------------------------------------------------------------
# three-body cooling clock


def mach_temperatures(T_init, k: float, t) -> np.ndarray:
    """Closed-form temperatures: T_i(t) = Tbar + (T_i(0) - Tbar) e^(-3 k t)."""
    if k <= 0:
        raise ParameterError("cooling constant must be positive")
    T_init = np.asarray(T_init, dtype=float)
    if T_init.shape != (3,):
        raise ParameterError("need three initial temperatures")
    t = np.asarray(t, dtype=float)
    tbar = T_init.mean()
    return tbar + (T_init - tbar) * np.exp(-3.0 * k * t)[..., None]


def simulate_mach(T_init, k: float, dt: float, horizon: float,
                  record_every: int = 1) -> Trajectory:
    """RK4 integration of the all-to-all Newton-cooling network."""
    if k <= 0 or dt <= 0 or horizon <= 0:
        raise ParameterError("k, dt, horizon must be positive")
    T = np.asarray(T_init, dtype=float).copy()
    if T.shape != (3,):
        raise ParameterError("need three initial temperatures")

    def f(x):
        return k * (x.sum() - 3.0 * x)

    n_steps = int(round(horizon / dt))
    n_rec = n_steps // record_every
    out = np.empty((n_rec + 1, 3))
    out[0] = T
    r = 0
    for j in range(n_steps):
        k1 = f(T)
        k2 = f(T + 0.5 * dt * k1)
        k3 = f(T + 0.5 * dt * k2)
        k4 = f(T + dt * k3)
        T = T + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (j + 1) % record_every == 0:
            r += 1
            out[r] = T
    times = np.arange(n_rec + 1) * (dt * record_every)
    return Trajectory(times, out[:r + 1], ("T1", "T2", "T3"),
                      {"model": "mach", "k": k, "dt": dt})


def mach_time_estimate(T1_measured: float, T_init, k: float) -> EstimateRecord:
    """Invert the cooling law for elapsed time from a T1 reading."""
    T_init = np.asarray(T_init, dtype=float)
    tbar = T_init.mean()
    A = tbar - T_init[0]
    if A == 0.0:
        return EstimateRecord(0.0, math.nan, {"reason": "equal initial "
                              "temperatures: nothing relaxes"},
                              error_defined=False)
    ratio = (tbar - T1_measured) / A
    if ratio <= 0:
        raise ParameterError("reading is beyond the relaxation range")
    return EstimateRecord(-math.log(ratio) / (3.0 * k), 0.0,
                          {"T1": T1_measured, "k": k})


# ---------------------------------------------------------------------------
# dispersive readout of a single TLS


def _require_readout(params: TlsParams):
    if params.Gamma_meas <= 0:
        raise ParameterError("readout requires a positive measurement rate")


def _check_dt(params: TlsParams, dt: float):
    fastest = max(params.Gamma_meas, params.rate_down)
    if dt * fastest >= 0.01:
        raise ParameterError("dt must satisfy dt*max(Gamma, gamma(N+1)) < 0.01")


def simulate_readout_trajectory(params: TlsParams, dt: float, horizon: float,
                                stream: RngStream,
                                rho0: DensityMatrix | None = None,
                                record_every: int = 1):
    """One conditional trajectory; returns (Trajectory(z, re_c, im_c), current).

    The current is the full-rate homodyne record I_j = <sz>_c + dW_j /
    (sqrt(eta Gam) dt); the state components are subsampled every
    `record_every` steps.
    """
    _require_readout(params)
    _check_dt(params, dt)
    if rho0 is None:
        rho0 = thermal_state(params.beta, params.epsilon)
    if rho0.dim != 2:
        raise ParameterError("readout model is two-level")
    a0 = rho0.matrix[0, 0].real
    c0 = complex(rho0.matrix[0, 1])
    n_steps = int(round(horizon / dt))
    rec, cur = kernels.sme_paths(
        [a0], [c0], omega=params.Delta + params.epsilon,
        gamma_down=params.rate_down, gamma_up=params.rate_up,
        meas_rate=params.Gamma_meas, eta_det=params.eta_det, dt=dt,
        n_steps=n_steps, streams=[stream], record_every=record_every)
    rec = rec[0]
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    states = np.empty((n_rec + 1, 3))
    states[0] = (2.0 * a0 - 1.0, c0.real, c0.imag)
    states[1:] = rec
    meta = {"model": "tls-readout", "gamma": params.gamma,
            "n_bar": params.n_bar, "Gamma": params.Gamma_meas,
            "eta": params.eta_det, "dt": dt,
            "master_seed": stream.master_seed,
            "stream_index": stream.stream_index}
    traj = Trajectory(times, states, ("z", "re_c", "im_c"), meta)
    return traj, cur[0]


def readout_ensemble(params: TlsParams, dt: float, horizon: float,
                     trials: int, master_seed: int, rho0: DensityMatrix,
                     record_every: int = 1, want_current: bool = False):
    """Batched conditional trajectories, trial k on stream k.

    Returns (times, records, currents) with records (trials, n_rec, 3) =
    (<sz>, Re c, Im c).
    """
    _require_readout(params)
    _check_dt(params, dt)
    a0 = rho0.matrix[0, 0].real
    c0 = complex(rho0.matrix[0, 1])
    n_steps = int(round(horizon / dt))
    streams = [RngStream(master_seed, k) for k in range(trials)]
    rec, cur = kernels.sme_paths(
        np.full(trials, a0), np.full(trials, c0, dtype=complex),
        omega=params.Delta + params.epsilon, gamma_down=params.rate_down,
        gamma_up=params.rate_up, meas_rate=params.Gamma_meas,
        eta_det=params.eta_det, dt=dt, n_steps=n_steps, streams=streams,
        record_every=record_every, want_current=want_current)
    times = (np.arange(n_steps // record_every) + 1) * dt * record_every
    return times, rec, cur


def unconditional_solution(params: TlsParams, rho0: DensityMatrix, times):
    """Exact ensemble-average evolution (linear 2x2 master equation).

    Returns (z(t), c(t)): populations relax to the thermal state at
    gamma(2 nbar + 1); the coherence rotates at 2(Delta + eps) and decays
    at gamma(2 nbar + 1)/2 + 2 Gamma.  This is the eta -> 0 (unmonitored)
    limit of the conditional dynamics.
    """
    times = np.asarray(times, dtype=float)
    g_tot = params.rate_up + params.rate_down
    z_ss = (params.rate_up - params.rate_down) / g_tot
    z0 = rho0.z
    z = z_ss + (z0 - z_ss) * np.exp(-g_tot * times)
    c0 = complex(rho0.matrix[0, 1])
    rate = 0.5 * g_tot + 2.0 * params.Gamma_meas
    omega = params.Delta + params.epsilon
    c = c0 * np.exp((-rate - 2.0j * omega) * times)
    return z, c


def _boxcar(current: np.ndarray, w: int) -> np.ndarray:
    """Sliding mean over w samples (cumulative sums, O(N))."""
    s = np.concatenate([[0.0], np.cumsum(current)])
    return (s[w:] - s[:-w]) / w


def detect_jumps(current: np.ndarray, dt: float, filter_window: float,
                 threshold: float = 0.0, hysteresis: float = 0.5):
    """Boxcar-filter a homodyne record and threshold it into a telegraph.

    A state flip is confirmed when the filtered signal reaches
    threshold +- hysteresis on the far side (debouncing the noise floor,
    which for the +-1 telegraph sits at 1/sqrt(eta Gam window)); the
    transition is then timed at the preceding center-threshold crossing,
    so a noiseless square input is recovered exactly.  Returns
    (EventRecord of up/down crossings, filtered signal aligned to window
    centers).  Emits UnreliableDetectionWarning when the detected dwells
    are not long compared to the window.
    """
    current = np.asarray(current, dtype=float)
    w = max(int(round(filter_window / dt)), 1)
    if w > len(current):
        raise ParameterError("filter window longer than the record")
    filt = _boxcar(current, w)
    t0 = 0.5 * w * dt

    def cross_time(i):
        # center-threshold crossing inside [i, i+1]
        f0, f1 = filt[i], filt[i + 1]
        frac = (threshold - f0) / (f1 - f0) if f1 != f0 else 0.5
        return t0 + (i + frac) * dt

    up_now = filt[0] > threshold
    hi, lo = threshold + hysteresis, threshold - hysteresis
    times = []
    labels = []
    above = filt > threshold
    confirm_up = np.where(filt >= hi)[0]
    confirm_dn = np.where(filt <= lo)[0]
    i = 0
    n = len(filt)
    while True:
        pool = confirm_dn if up_now else confirm_up
        j = np.searchsorted(pool, i)
        if j >= len(pool):
            break
        conf = pool[j]
        # last center crossing before the confirmation
        seg = above[:conf + 1]
        want = up_now  # value before the crossing
        idx = np.where(seg[max(i - 1, 0):conf] == want)[0]
        if len(idx) == 0:
            start = max(i - 1, 0)
        else:
            start = max(i - 1, 0) + idx[-1]
        times.append(cross_time(start))
        labels.append("down" if up_now else "up")
        up_now = not up_now
        i = conf + 1
        if i >= n:
            break
    times = np.array(times)
    horizon = t0 + (n - 1) * dt
    initial = "up" if filt[0] > threshold else "down"
    events = EventRecord(times, tuple(labels), horizon,
                         meta={"window": w * dt, "threshold": threshold,
                               "hysteresis": hysteresis,
                               "initial": initial})
    if len(times) > 1:
        mean_dwell = float(np.diff(times).mean())
        if mean_dwell < 2.0 * w * dt:
            warnings.warn(
                f"mean detected dwell {mean_dwell:.3g} is not long compared "
                f"to the filter window {w * dt:.3g}; detection unreliable",
                UnreliableDetectionWarning, stacklevel=2)
    return events, filt


def detected_up_fraction(current: np.ndarray, dt: float,
                         filter_window: float, threshold: float = 0.0,
                         discard: float = 0.0) -> float:
    """Fraction of filtered samples above threshold (after `discard` time)."""
    current = np.asarray(current, dtype=float)
    w = max(int(round(filter_window / dt)), 1)
    if w > len(current):
        raise ParameterError("filter window longer than the record")
    filt = _boxcar(current, w)
    n0 = int(round(discard / dt))
    if n0 >= len(filt):
        raise ParameterError("discard window longer than the record")
    return float((filt[n0:] > threshold).mean())


# ---------------------------------------------------------------------------
# relativity checks


def tolman_product(T0: float, g44: float) -> float:
    """Equilibrium invariant T0 sqrt(g44); equal across shells."""
    if g44 <= 0:
        raise ParameterError("temporal metric component must be positive")
    return T0 * math.sqrt(g44)


def moving_frame_temperature(T0: float, v: float, c: float = 1.0) -> float:
    """Temperature read by an observer moving at speed v: T0 sqrt(1-v^2/c^2)."""
    if abs(v) >= c:
        raise ParameterError("|v| must be below c")
    return T0 * math.sqrt(1.0 - (v / c) ** 2)


# ---------------------------------------------------------------------------
# stochastic-tick evolution map


def thermal_time_step(rho, H, gamma: float, n_bar: float, dt: float,
                      hbar: float = 1.0) -> np.ndarray:
    """Advance rho by dt under the averaged tick map
    drho/dt = gamma nbar (U rho U+ - rho), U = exp(-i H/(hbar gamma nbar)).

    Evaluated exactly: in the H eigenbasis the map is elementwise,
    rho_ij -> rho_ij exp[g dt (e^{-i (E_i - E_j)/(hbar g)} - 1)], g =
    gamma nbar.  Being an average over unitaries, it preserves trace and
    positivity exactly and fixes any state diagonal in H.
    """
    rho = np.asarray(rho, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if rho.shape != H.shape or rho.ndim != 2:
        raise ParameterError("rho and H must be square matrices of equal size")
    if rho.shape[0] > 8:
        raise ParameterError("map is meant for small systems (d <= 8)")
    if np.linalg.norm(H - H.conj().T) > 1e-10 * max(np.linalg.norm(H), 1.0):
        raise ParameterError("H must be Hermitian")
    g = gamma * n_bar
    if g <= 0:
        raise ParameterError("gamma * n_bar must be positive")
    if dt < 0:
        raise ParameterError("dt must be non-negative")
    evals, V = np.linalg.eigh(H)
    rt = V.conj().T @ rho @ V
    diff = (evals[:, None] - evals[None, :]) / (hbar * g)
    factor = np.exp(g * dt * (np.exp(-1j * diff) - 1.0))
    return V @ (rt * factor) @ V.conj().T


def coherence_decay_rate(epsilon: float, gamma: float, n_bar: float,
                         hbar: float = 1.0) -> float:
    """Exact off-diagonal damping rate for a two-level splitting eps."""
    g = gamma * n_bar
    return g * (1.0 - math.cos(epsilon / (hbar * g)))
