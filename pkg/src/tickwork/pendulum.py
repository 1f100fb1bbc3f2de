"""Escapement-driven pendulum clock.

In scaled units (angle x, momentum y, time in units of the free period)
the driven, damped pendulum obeys

    dx = y dt
    dy = (-x - Gamma y + K(x, y)) dt + sqrt(D') dW

with the escapement delivering a constant-magnitude momentum kick twice
per period:

    K(x, y) = -mu * sign(sin(psi0) x - cos(psi0) y).

The kick direction flips when the state crosses a line through the origin
at angle psi0, so the pendulum is pushed along its velocity and settles
onto a limit cycle of radius r* = 4 mu cos(psi0) / (pi Gamma).  On the
cycle, the residual dynamics is phase diffusion:

    dpsi = -omega_tilde dt + (sigma / r*) dW,

which jitters the kick reversal times and thereby the tick period.  The
noise amplitudes are related by D' = 2 sigma^2 (one quadrature's share of
the full-plane diffusion).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import ParameterError, UnsupportedCaseError
from .records import CycleLedger, Trajectory
from .streams import RngStream


@dataclass(frozen=True)
class PendulumParams:
    """Scaled parameters of the kicked pendulum.

    sigma is the on-cycle noise amplitude; the full-plane Langevin noise
    has diffusion constant D' = 2 sigma^2.
    """

    Gamma: float
    mu: float
    psi0: float = 0.0
    sigma: float = 0.0
    omega_tilde: float = 1.0

    def __post_init__(self):
        if self.Gamma <= 0:
            raise ParameterError("Gamma must be positive")
        if self.mu < 0:
            raise ParameterError("mu must be non-negative")
        if abs(self.psi0) >= math.pi / 2:
            raise ParameterError("|psi0| must be below pi/2")
        if self.sigma < 0:
            raise ParameterError("sigma must be non-negative")
        if self.omega_tilde <= 0:
            raise ParameterError("omega_tilde must be positive")

    @property
    def Dprime(self) -> float:
        return 2.0 * self.sigma**2

    @classmethod
    def from_Dprime(cls, Gamma, mu, psi0, Dprime, omega_tilde=1.0):
        if Dprime < 0:
            raise ParameterError("D' must be non-negative")
        return cls(Gamma, mu, psi0, math.sqrt(Dprime / 2.0), omega_tilde)

    @classmethod
    def from_dimensional(cls, *, m, l, gamma, T, mu, psi0=0.0, g=9.81,
                         kB=1.380649e-23):
        """Build scaled parameters from SI quantities.

        Fluctuation-dissipation fixes the momentum diffusion D = 2 m gamma
        kB T; after scaling, D' = 2 omega gamma kB T / (m g^2) with
        omega = sqrt(g / l).
        """
        if min(m, l, gamma, T) < 0 or m == 0 or l == 0:
            raise ParameterError("m, l must be positive; gamma, T >= 0")
        omega = math.sqrt(g / l)
        Gamma = gamma / (m * omega**2 * l)
        Dprime = 2.0 * omega * gamma * kB * T / (m * g**2)
        return cls.from_Dprime(Gamma, mu, psi0, Dprime)


def kick_force(x: float, y: float, params: PendulumParams) -> float:
    """Escapement kick at phase-space point (x, y)."""
    arg = math.sin(params.psi0) * x - math.cos(params.psi0) * y
    if arg > 0:
        return -params.mu
    if arg < 0:
        return params.mu
    return 0.0


def limit_cycle_radius(params: PendulumParams, with_noise: bool = False,
                       quadratic_root: bool = False) -> float:
    """Radius of the limit cycle from the phase-averaged radial flow.

    With noise, the default is the closed form r* = 2 mu c/(pi G) +
    sqrt(4 mu^2 c^2/(pi^2 G^2) + D'/4).  `quadratic_root` instead solves
    the stationarity condition G r/2 = 2 mu c/pi + D'/(4 r) exactly, which
    scales the noise term as D'/(2 G); the two agree only at G = 2.
    """
    c = math.cos(params.psi0)
    base = 4.0 * params.mu * c / (math.pi * params.Gamma)
    if not with_noise:
        return base
    half = base / 2.0
    if quadratic_root:
        return half + math.sqrt(half**2 + params.Dprime / (2.0 * params.Gamma))
    return half + math.sqrt(half**2 + params.Dprime / 4.0)


def on_cycle_energy(params: PendulumParams) -> float:
    """Mean energy r*^2/2 = 8 mu^2 cos^2(psi0) / (Gamma^2 pi^2)."""
    r = limit_cycle_radius(params)
    return 0.5 * r * r


def effective_frequency(params: PendulumParams) -> float:
    """On-cycle frequency including the kick-induced shift."""
    r = limit_cycle_radius(params)
    return 1.0 - 2.0 * params.mu * math.sin(params.psi0) / (r * math.pi)


def simulate_pendulum(params: PendulumParams, dt: float, horizon: float,
                      stream: RngStream | None = None, x0=(0.1, 0.0),
                      record_every: int = 1) -> Trajectory:
    """Integrate the full kicked Langevin dynamics; returns (x, y, K)."""
    if dt <= 0 or horizon <= 0:
        raise ParameterError("dt and horizon must be positive")
    if dt >= 0.01 / max(1.0, params.Gamma, params.mu):
        raise ParameterError("dt too coarse for the fastest time scale")
    noise_amp = math.sqrt(params.Dprime)
    if noise_amp > 0 and stream is None:
        raise ParameterError("noisy simulation requires a stream")
    n_steps = int(round(horizon / dt))
    streams = [stream] if noise_amp > 0 else None
    rec = kernels.pendulum_paths(
        [x0[0]], [x0[1]], gamma=params.Gamma, mu=params.mu,
        sin_psi0=math.sin(params.psi0), cos_psi0=math.cos(params.psi0),
        noise_amp=noise_amp, dt=dt, n_steps=n_steps, streams=streams,
        record_every=record_every)[0]
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    states = np.empty((n_rec + 1, 3))
    states[0] = (x0[0], x0[1], kick_force(x0[0], x0[1], params))
    states[1:] = rec
    meta = {"model": "pendulum", "Gamma": params.Gamma, "mu": params.mu,
            "psi0": params.psi0, "sigma": params.sigma, "dt": dt}
    if stream is not None:
        meta.update(master_seed=stream.master_seed,
                    stream_index=stream.stream_index)
    return Trajectory(times, states, ("x", "y", "K"), meta)


def simulate_phase_on_cycle(params: PendulumParams, dt: float, horizon: float,
                            stream: RngStream | None = None,
                            psi_init: float = 0.0,
                            record_every: int = 1) -> Trajectory:
    """Integrate the on-cycle phase SDE; returns (psi, K)."""
    if dt <= 0 or horizon <= 0:
        raise ParameterError("dt and horizon must be positive")
    r_star = limit_cycle_radius(params)
    if r_star <= 0:
        raise ParameterError("limit cycle has zero radius (mu = 0)")
    scale = params.sigma / r_star
    if scale > 0 and stream is None:
        raise ParameterError("noisy simulation requires a stream")
    n_steps = int(round(horizon / dt))
    streams = [stream] if scale > 0 else None
    rec = kernels.phase_paths(
        [psi_init], omega=params.omega_tilde, noise_scale=scale,
        mu=params.mu, psi_offset=params.psi0, dt=dt, n_steps=n_steps,
        streams=streams, record_every=record_every)[0]
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    states = np.empty((n_rec + 1, 2))
    c0 = math.cos(psi_init + params.psi0)
    k0 = -params.mu if c0 > 0 else (params.mu if c0 < 0 else 0.0)
    states[0] = (psi_init, k0)
    states[1:] = rec
    meta = {"model": "pendulum-phase", "Gamma": params.Gamma,
            "mu": params.mu, "psi0": params.psi0, "sigma": params.sigma,
            "r_star": r_star, "omega_tilde": params.omega_tilde, "dt": dt}
    if stream is not None:
        meta.update(master_seed=stream.master_seed,
                    stream_index=stream.stream_index)
    return Trajectory(times, states, ("psi", "K"), meta)


def mean_kick_signal(t, params: PendulumParams, max_terms: int = 200_000):
    """Ensemble-averaged kick signal on the limit cycle (psi0 = 0 only).

    Fourier series of the dephased square wave; each harmonic (2k-1)
    carries a Gaussian envelope exp(-sigma^2 t (2k-1)^2 / (2 r*^2)).  The
    series is truncated once the envelope falls below 1e-12.

    The ensemble is taken to start at an up-reversal of the kick, i.e.
    paths with psi(0) = -pi/2, so the mean rises from zero like the odd
    square wave mu*sign(sin t).
    """
    if params.psi0 != 0.0:
        raise UnsupportedCaseError("closed form requires psi0 = 0")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    tv = np.atleast_1d(t)
    r_star = limit_cycle_radius(params)
    decay = params.sigma**2 / (2.0 * r_star**2)
    out = np.zeros_like(tv)
    # number of terms needed so the envelope at the smallest positive time
    # has dropped below tolerance
    pos = tv[tv > 0]
    if decay > 0 and len(pos):
        n_needed = int(np.ceil(np.sqrt(np.log(1e12) / (decay * pos.min()))
                               / 2.0)) + 1
    else:
        n_needed = max_terms
    n_terms = min(max(n_needed, 1), max_terms)
    k = 2 * np.arange(1, n_terms + 1) - 1  # odd harmonics
    for i, ti in enumerate(tv):
        env = np.exp(-decay * ti * k.astype(float)**2)
        keep = env >= 1e-12
        if not keep.any():
            continue
        kk = k[keep]
        out[i] = np.sum(env[keep] * np.sin(kk * params.omega_tilde * ti) / kk)
    out *= 4.0 * params.mu / np.pi
    return float(out[0]) if scalar else out


def _first_passage_times(traj: Trajectory, spacing: float):
    """First-passage times of the phase through descending switch levels.

    The kick reverses where cos(psi + psi0) changes sign, i.e. when the
    (net-descending) phase first reaches -pi/2 - psi0 modulo `spacing`
    (2*pi for full cycles, pi for half cycles).  Counting first passages
    rather than raw sign changes of K is chatter-proof: diffusion wiggles
    across a level do not create extra ticks.
    """
    psi = traj.component("psi")
    t = traj.times
    psi0 = float(traj.meta.get("psi0", 0.0))
    # first level strictly below the starting phase
    base = -math.pi / 2.0 - psi0
    k0 = math.ceil((base - psi[0]) / spacing + 1e-12)
    first = base - k0 * spacing
    rmin = np.minimum.accumulate(psi)
    floor = rmin[-1]
    levels = np.arange(first, floor, -spacing)
    if len(levels) == 0:
        return np.empty(0), np.empty(0, dtype=np.intp)
    idx = np.searchsorted(-rmin, -levels, side="left")
    keep = idx > 0
    idx = idx[keep]
    levels = levels[keep]
    prev = psi[idx - 1]
    frac = (prev - levels) / (prev - psi[idx])
    return t[idx - 1] + frac * (t[idx] - t[idx - 1]), idx


def _up_transition_times(traj: Trajectory):
    """Times of -mu -> +mu kick reversals (one per full cycle)."""
    return _first_passage_times(traj, 2.0 * math.pi)


def phase_ticks(traj: Trajectory) -> np.ndarray:
    """Tick times of an on-cycle (psi, K) trajectory, one per kick cycle."""
    return _up_transition_times(traj)[0]


def switch_times(traj: Trajectory) -> np.ndarray:
    """Times of every kick reversal (two per cycle)."""
    return _first_passage_times(traj, math.pi)[0]


def cycle_ledger(traj: Trajectory, params: PendulumParams) -> CycleLedger:
    """Per-cycle period, escapement work, and dissipated heat.

    A cycle runs between consecutive -mu -> +mu kick reversals.  The work
    is the integral of kick power K(t) y(t) with the on-cycle velocity
    y = -r* cos(psi); the heat follows the fixed ratio Q = W / Gamma.
    """
    if "psi" not in traj.labels:
        raise ParameterError("cycle ledger needs an on-cycle (psi, K) trajectory")
    times, idx = _up_transition_times(traj)
    if len(times) < 2:
        return CycleLedger(np.empty(0), np.empty(0), np.empty(0),
                           meta=dict(traj.meta))
    psi = traj.component("psi")
    k = traj.component("K")
    t = traj.times
    r_star = limit_cycle_radius(params)
    power = k * (-r_star * np.cos(psi))
    cum = np.concatenate([[0.0], np.cumsum(
        0.5 * (power[1:] + power[:-1]) * np.diff(t))])
    # cumulative work interpolated to the reversal times
    w_at = np.interp(times, t, cum)
    periods = np.diff(times)
    works = np.diff(w_at)
    heats = works / params.Gamma
    return CycleLedger(periods, works, heats, meta=dict(traj.meta))


def half_cycle_samples(traj: Trajectory, params: PendulumParams):
    """(duration, work) pairs for every half cycle (interval between
    consecutive kick reversals of either sign)."""
    times, _ = _first_passage_times(traj, math.pi)
    if len(times) < 2:
        return np.empty(0), np.empty(0)
    psi = traj.component("psi")
    k = traj.component("K")
    t = traj.times
    r_star = limit_cycle_radius(params)
    power = k * (-r_star * np.cos(psi))
    cum = np.concatenate([[0.0], np.cumsum(
        0.5 * (power[1:] + power[:-1]) * np.diff(t))])
    w_at = np.interp(times, t, cum)
    return np.diff(times), np.diff(w_at)
