"""Single-mode laser as a periodic clock.

Photon-number (diagonal) dynamics: with small-signal gain G, saturation
photon number n_s and cavity decay kappa, the occupation probabilities
obey the birth-death equation

    dp_n/dt = G n_s [ n/(n+n_s) p_{n-1} - (n+1)/(n+1+n_s) p_n ]
              + kappa (n+1) p_{n+1} - kappa n p_n

whose detailed-balance steady state is p_n ~ (G n_s/kappa)^(n+n_s)/(n+n_s)!.
Below threshold (G < kappa, n_s large) this is near-geometric with
nbar = G/(kappa - G); well above threshold it is a Poisson-shaped peak
near G n_s/kappa.

Above threshold, the only residual noise is phase diffusion at the rate
Gamma = kappa/(2 nbar), giving the field coherence g1(tau) =
exp(-kappa tau/(4 nbar)); a conditioned (continuously monitored) field
performs plain Brownian phase motion d(phi) = sqrt(Gamma) dW.

The mean field follows the saturable-gain flow

    da/dt = -i eps - i (delta + chi |a|^2) a
            - (kappa a/2) (1 - G n_s / (kappa (|a|^2 + n_s)))

where the optional intensity-dependent detuning chi |a|^2 (an intracavity
Kerr medium, normalized so the self-pulsing runs at chi * |a|^2) turns the
fixed-intensity state into a self-pulsing limit cycle; the tiny injected
eps is only needed to push the flow off the unstable origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln, logsumexp

from . import kernels
from .errors import ParameterError
from .records import Trajectory
from .streams import RngStream


@dataclass(frozen=True)
class LaserParams:
    G: float                 # small-signal gain
    n_sat: float             # saturation photon number
    kappa: float             # cavity decay rate
    eps: float = 0.0         # injected signal amplitude
    delta: float = 0.0       # injection detuning
    chi_kerr: float = 0.0    # Kerr coefficient (self-pulsing at chi*nbar)
    eta_det: float = 1.0     # detection efficiency

    def __post_init__(self):
        if self.G <= 0 or self.n_sat <= 0 or self.kappa <= 0:
            raise ParameterError("G, n_sat, kappa must be positive")
        if not 0 < self.eta_det <= 1:
            raise ParameterError("eta_det must lie in (0, 1]")

    @property
    def nbar_above(self) -> float:
        """Above-threshold mean photon number G n_s / kappa."""
        return self.G * self.n_sat / self.kappa

    @property
    def nbar_below(self) -> float:
        """Below-threshold (G < kappa) thermal-like mean G/(kappa - G)."""
        if self.G >= self.kappa:
            raise ParameterError("below-threshold form needs G < kappa")
        return self.G / (self.kappa - self.G)

    def fixed_intensity(self) -> float:
        """Nonzero fixed point of the amplitude flow: n_s (G/kappa - 1)."""
        if self.G <= self.kappa:
            raise ParameterError("no bright fixed point for G <= kappa")
        return self.n_sat * (self.G / self.kappa - 1.0)


def default_n_max(n_bar: float) -> int:
    return int(math.ceil(n_bar + 10.0 * math.sqrt(max(n_bar, 1.0)) + 20.0))


@dataclass(frozen=True)
class PhotonDistribution:
    """Probability vector over photon numbers 0..n_max."""

    p: np.ndarray
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "meta", dict(self.meta))
        if p.ndim != 1 or len(p) < 2:
            raise ParameterError("need a 1-D probability vector")
        if np.any(p < -1e-15):
            raise ParameterError("negative probabilities")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ParameterError("probabilities must sum to 1 within 1e-9")

    @property
    def n_max(self) -> int:
        return len(self.p) - 1

    def mean(self) -> float:
        return float(np.arange(len(self.p)) @ self.p)

    def variance(self) -> float:
        n = np.arange(len(self.p))
        m = self.mean()
        return float(((n - m) ** 2) @ self.p)

    def fano(self) -> float:
        return self.variance() / self.mean()


def steady_state_distribution(params: LaserParams,
                              n_max: int | None = None) -> PhotonDistribution:
    """Detailed-balance steady state, evaluated in log space."""
    if n_max is None:
        n_max = default_n_max(params.nbar_above)
    n = np.arange(n_max + 1, dtype=float)
    lam = params.G * params.n_sat / params.kappa
    logp = (n + params.n_sat) * math.log(lam) - gammaln(n + params.n_sat + 1.0)
    logp -= logsumexp(logp)
    p = np.exp(logp)
    if p[-1] >= 1e-12:
        raise ParameterError(
            f"n_max={n_max} truncates the distribution (tail {p[-1]:.2e})")
    return PhotonDistribution(p / p.sum(), meta={"G": params.G,
                                                 "n_sat": params.n_sat,
                                                 "kappa": params.kappa})


def _rates(params: LaserParams, n_max: int):
    n = np.arange(n_max + 1, dtype=float)
    gain = params.G * params.n_sat * (n + 1.0) / (n + 1.0 + params.n_sat)
    gain[-1] = 0.0  # reflecting top boundary keeps probability conserved
    decay = params.kappa * n
    return gain, decay


def evolve_photon_distribution(dist: PhotonDistribution, params: LaserParams,
                               dt: float, steps: int) -> PhotonDistribution:
    """Forward-Euler evolution of the photon-number birth-death equation."""
    n_max = dist.n_max
    if dt * (params.G * params.n_sat + params.kappa * n_max) >= 0.1:
        raise ParameterError("dt too large for a stable birth-death step")
    gain, decay = _rates(params, n_max)
    p = dist.p.astype(float).copy()
    for _ in range(steps):
        up = gain * p      # flux n -> n+1
        down = decay * p   # flux n -> n-1
        p[0] += dt * (down[1] - up[0])
        p[1:-1] += dt * (up[:-2] - up[1:-1] + down[2:] - down[1:-1])
        p[-1] += dt * (up[-2] - down[-1])
    drift = abs(p.sum() - 1.0)
    if drift > 1e-6:
        raise ParameterError(f"normalization drifted by {drift:.2e}")
    return PhotonDistribution(p / p.sum(), meta=dict(dist.meta))


def relax_to_steady_state(params: LaserParams, n_max: int | None = None,
                          dt: float | None = None, l1_tol: float = 1e-6,
                          max_time: float = 200.0):
    """Evolve from vacuum until within `l1_tol` (L1) of the steady state.

    Returns (distribution, l1_distance, elapsed_time).
    """
    target = steady_state_distribution(params, n_max)
    n_max = target.n_max
    if dt is None:
        dt = 0.05 / (params.G * params.n_sat + params.kappa * n_max)
    p0 = np.zeros(n_max + 1)
    p0[0] = 1.0
    dist = PhotonDistribution(p0)
    block = max(int(round(1.0 / dt)) // 10, 1)
    t = 0.0
    while t < max_time:
        dist = evolve_photon_distribution(dist, params, dt, block)
        t += block * dt
        l1 = float(np.abs(dist.p - target.p).sum())
        if l1 < l1_tol:
            return dist, l1, t
    return dist, float(np.abs(dist.p - target.p).sum()), t


def phase_diffusion_rate(kappa: float, n_bar: float) -> float:
    """Above-threshold phase diffusion rate kappa/(2 nbar)."""
    if n_bar <= 0:
        raise ParameterError("n_bar must be positive")
    return kappa / (2.0 * n_bar)


def g1_correlation(tau, kappa: float, n_bar: float):
    """First-order field coherence exp(-kappa tau / (4 nbar))."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ParameterError("tau must be non-negative")
    out = np.exp(-kappa * tau / (4.0 * n_bar))
    return float(out) if out.ndim == 0 else out


def simulate_phase(Gamma: float, dt: float, horizon: float,
                   stream: RngStream | None = None, Omega: float = 0.0,
                   phi0: float = 0.0, record_every: int = 1) -> Trajectory:
    """Conditional phase path d(phi) = -Omega dt + sqrt(Gamma) dW."""
    if Gamma < 0:
        raise ParameterError("Gamma must be non-negative")
    if dt <= 0 or horizon <= 0:
        raise ParameterError("dt and horizon must be positive")
    scale = math.sqrt(Gamma)
    if scale > 0 and stream is None:
        raise ParameterError("noisy simulation requires a stream")
    n_steps = int(round(horizon / dt))
    rec = kernels.phase_paths(
        [phi0], omega=Omega, noise_scale=scale, mu=0.0, psi_offset=0.0,
        dt=dt, n_steps=n_steps, streams=[stream] if scale > 0 else None,
        record_every=record_every)[0]
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    phis = np.concatenate([[phi0], rec[:, 0]])
    meta = {"model": "laser-phase", "Gamma": Gamma, "Omega": Omega, "dt": dt}
    if stream is not None:
        meta.update(master_seed=stream.master_seed,
                    stream_index=stream.stream_index)
    return Trajectory(times, phis[:, None], ("phi",), meta)


def phase_ensemble(Gamma: float, dt: float, horizon: float, trials: int,
                   master_seed: int, Omega: float = 0.0,
                   record_every: int = 1) -> np.ndarray:
    """Batched phase paths, trial k on stream k; returns (trials, n_rec)."""
    if Gamma < 0:
        raise ParameterError("Gamma must be non-negative")
    n_steps = int(round(horizon / dt))
    streams = [RngStream(master_seed, k) for k in range(trials)]
    rec = kernels.phase_paths(
        np.zeros(trials), omega=Omega, noise_scale=math.sqrt(Gamma), mu=0.0,
        psi_offset=0.0, dt=dt, n_steps=n_steps, streams=streams,
        record_every=record_every)
    return rec[:, :, 0]


def simulate_semiclassical(params: LaserParams, dt: float, horizon: float,
                           stream: RngStream | None = None,
                           kerr: bool = False, dither: float = 0.0,
                           a0: complex = 0.1 + 0.0j,
                           record_every: int = 1) -> Trajectory:
    """Integrate the mean-field amplitude flow; returns (re, im).

    With `kerr`, the intensity-dependent detuning chi_kerr |a|^2 is
    active and either a nonzero injection eps or a displaced start is
    required (the origin is an unstable fixed point of the noiseless
    flow).  `dither` adds a zero-mean complex Gaussian drive of that
    amplitude.
    """
    if dt <= 0 or horizon <= 0:
        raise ParameterError("dt and horizon must be positive")
    if kerr and params.eps == 0.0 and abs(a0) == 0.0 and dither == 0.0:
        raise ParameterError(
            "self-pulsing needs eps > 0, dither, or a displaced start")
    if dither > 0 and stream is None:
        raise ParameterError("dither requires a stream")
    n_steps = int(round(horizon / dt))
    rec = kernels.semiclassical_paths(
        [a0], eps=params.eps, delta=params.delta,
        chi_kerr=params.chi_kerr if kerr else 0.0, gain=params.G,
        n_sat=params.n_sat, kappa=params.kappa, dither=dither, dt=dt,
        n_steps=n_steps, streams=[stream] if dither > 0 else None,
        record_every=record_every)[0]
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    states = np.empty((n_rec + 1, 2))
    states[0] = (a0.real, a0.imag)
    states[1:] = rec
    meta = {"model": "laser-kerr" if kerr else "laser", "G": params.G,
            "n_sat": params.n_sat, "kappa": params.kappa, "eps": params.eps,
            "delta": params.delta,
            "chi_kerr": params.chi_kerr if kerr else 0.0, "dt": dt}
    if stream is not None:
        meta.update(master_seed=stream.master_seed,
                    stream_index=stream.stream_index)
    return Trajectory(times, states, ("re", "im"), meta)


def energy_balance_rate(E: float, kappa: float, n_bar: float) -> float:
    """Energy flow on the bright state: -kappa E + kappa nbar."""
    if E < 0:
        raise ParameterError("energy must be non-negative")
    return -kappa * E + kappa * n_bar
