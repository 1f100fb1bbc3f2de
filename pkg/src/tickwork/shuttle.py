"""Single-electron nanomechanical shuttle clock.

An oscillator (frequency nu, damping kappa, complex amplitude
alpha = X + iY) carries a single-electron island between two leads.  The
bare tunnelling rates gamma_L (onto the island, active when empty) and
gamma_R (off the island, active when occupied) are exponentially
modulated by the displacement, and the electrostatic field pushes the
occupied island:

    dn/dt     = gamma_L (1 - n) e^(-4 eta X) - gamma_R n e^(4 eta X)
    dalpha/dt = -i nu alpha - (kappa/2) alpha + i chi n

(zero-temperature limit: loading from the left only, unloading to the
right only).  In trajectory mode n is binary and the two tunnelling
point processes fire with intensities gamma_L e^(-4 eta X) and
gamma_R e^(4 eta X); in ensemble mode n is the mean occupation.

On a prescribed limit cycle X(t) = r* sin(Omega t) the intensities are
periodic, the inter-jump waiting times follow exp(-integral of the
intensity), and the phase-averaged energy balance puts the cycle
amplitude at the root of exp(mu x^2) = cosh(x), x = eta r*,
mu = kappa pi/(4 eta chi).

Work/heat bookkeeping per cycle: W_k = 2 chi r* T_k / pi.  Two heat
conventions are carried side by side: "paper" (Q_k = W_k/kappa) and
"balance" (Q_k = W_k, heat equal to the work dissipated on the cycle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import (NoLimitCycleError, NumericalBlowupError, ParameterError,
                     UnsupportedCaseError)
from .records import CycleLedger, EventRecord, Trajectory
from .streams import RngStream

LABEL_ON = "tunnel-left"    # electron loads onto the island
LABEL_OFF = "tunnel-right"  # electron unloads into the drain


@dataclass(frozen=True)
class ShuttleParams:
    gamma_L: float
    gamma_R: float
    nu: float = 1.0
    eta: float = 1.0
    chi: float = 1.0
    kappa: float = 0.1

    def __post_init__(self):
        if self.gamma_L < 0 or self.gamma_R < 0:
            raise ParameterError("tunnelling rates must be non-negative")
        if self.nu <= 0 or self.kappa <= 0:
            raise ParameterError("nu and kappa must be positive")
        if self.eta < 0 or self.chi < 0:
            raise ParameterError("eta and chi must be non-negative")

    @property
    def symmetric_rate(self) -> float:
        if self.gamma_L != self.gamma_R:
            raise UnsupportedCaseError("requires symmetric rates")
        return self.gamma_L


def shuttle_drift(n: float, alpha: complex, params: ShuttleParams):
    """Right-hand side (dn/dt, dalpha/dt) of the mean-field equations."""
    w = 4.0 * params.eta * alpha.real
    if abs(w) > 700.0:
        raise NumericalBlowupError("tunnelling exponent overflow",
                                   state=(n, alpha))
    dn = params.gamma_L * (1.0 - n) * math.exp(-w) \
        - params.gamma_R * n * math.exp(w)
    dalpha = (-1j * params.nu - 0.5 * params.kappa) * alpha \
        + 1j * params.chi * n
    return dn, dalpha


def mean_current(n, x, params: ShuttleParams):
    """Average charge flow (e = 1): half the sum of both tunnelling fluxes.

    Reduces to (gamma/2)(e^(-4 eta X)(1-n) + e^(4 eta X) n) for symmetric
    rates; the empty-island term enters with weight (1-n), i.e. as the
    magnitude of the loading flux.
    """
    w = 4.0 * params.eta * np.asarray(x)
    n = np.asarray(n)
    return 0.5 * (params.gamma_L * np.exp(-w) * (1.0 - n)
                  + params.gamma_R * np.exp(w) * n)


def simulate_shuttle_ensemble(params: ShuttleParams, dt: float, horizon: float,
                              x0=(0.3, 0.05 + 0.0j),
                              record_every: int = 1) -> Trajectory:
    """Deterministic mean-field trajectory; returns (n, X, Y, I).

    The stiff charge equation is advanced by its exact exponential
    relaxation at frozen displacement, the oscillator by an Euler step.
    """
    if dt <= 0 or horizon <= 0:
        raise ParameterError("dt and horizon must be positive")
    n0, alpha0 = float(x0[0]), complex(x0[1])
    if not 0.0 <= n0 <= 1.0:
        raise ParameterError("occupation must lie in [0, 1]")
    n_steps = int(round(horizon / dt))
    rec = kernels.shuttle_ode_paths(
        [n0], [alpha0.real], [alpha0.imag], gamma_l=params.gamma_L,
        gamma_r=params.gamma_R, eta=params.eta, nu=params.nu, chi=params.chi,
        kappa=params.kappa, dt=dt, n_steps=n_steps,
        record_every=record_every)[0]
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    states = np.empty((n_rec + 1, 4))
    states[0, :3] = (n0, alpha0.real, alpha0.imag)
    states[1:, :3] = rec
    states[:, 3] = mean_current(states[:, 0], states[:, 1], params)
    meta = {"model": "shuttle-ensemble", "gamma_L": params.gamma_L,
            "gamma_R": params.gamma_R, "nu": params.nu, "eta": params.eta,
            "chi": params.chi, "kappa": params.kappa, "dt": dt}
    return Trajectory(times, states, ("n", "X", "Y", "I"), meta)


def simulate_shuttle_trajectory(params: ShuttleParams, dt: float,
                                horizon: float, stream: RngStream,
                                n0: int = 0, alpha0: complex = 0.05 + 0.0j,
                                record_every: int = 1):
    """Single-charge trajectory (jumps + oscillator); returns
    (Trajectory(n, X, Y), EventRecord)."""
    if dt <= 0 or horizon <= 0:
        raise ParameterError("dt and horizon must be positive")
    if n0 not in (0, 1):
        raise ParameterError("trajectory mode needs binary occupation")
    n_steps = int(round(horizon / dt))
    rec, ev_t, ev_k = kernels.pdmp_path(
        n0=n0, x0=alpha0.real, y0=alpha0.imag, gamma_l=params.gamma_L,
        gamma_r=params.gamma_R, eta=params.eta, nu=params.nu,
        chi=params.chi, kappa=params.kappa, dt=dt, n_steps=n_steps,
        stream=stream, record_every=record_every)
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    states = np.empty((n_rec + 1, 3))
    states[0] = (n0, alpha0.real, alpha0.imag)
    states[1:] = rec
    meta = {"model": "shuttle-trajectory", "gamma_L": params.gamma_L,
            "gamma_R": params.gamma_R, "nu": params.nu, "eta": params.eta,
            "chi": params.chi, "kappa": params.kappa, "dt": dt,
            "master_seed": stream.master_seed,
            "stream_index": stream.stream_index}
    traj = Trajectory(times, states, ("n", "X", "Y"), meta)
    labels = tuple(LABEL_ON if k == 0 else LABEL_OFF for k in ev_k)
    events = EventRecord(ev_t, labels, horizon, meta=meta)
    return traj, events


def _log_cosh(x: float) -> float:
    ax = abs(x)
    return ax - math.log(2.0) + math.log1p(math.exp(-2.0 * ax))


def amplitude_equation_mu(params: ShuttleParams) -> float:
    if params.eta == 0 or params.chi == 0:
        raise ParameterError("eta and chi must be positive for a cycle")
    return params.kappa * math.pi / (4.0 * params.eta * params.chi)


def limit_cycle_amplitude(params: ShuttleParams) -> float:
    """Cycle amplitude r* from the root of exp(mu x^2) = cosh(x).

    For 0 < mu < 1/2 the equation has exactly one nonzero root (cosh wins
    near the origin, the Gaussian wins at large x); it is found by
    bracketed root solving on mu x^2 - log cosh x and returned as x/eta.
    """
    mu = amplitude_equation_mu(params)
    if mu >= 0.5:
        raise NoLimitCycleError(
            f"mu = {mu:.4f} >= 1/2: no nonzero amplitude solves the balance")
    g = lambda x: mu * x * x - _log_cosh(x)
    # bracket: g < 0 just above zero; walk out until it turns positive
    lo = math.sqrt(12.0 * (0.5 - mu)) * 0.5
    while g(lo) > 0:
        lo *= 0.5
    hi = max(2.0 * lo, 2.0 / mu)
    while g(hi) < 0:
        hi *= 2.0
    x = brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16)
    return x / params.eta


def amplitude_diagnostics(params: ShuttleParams) -> dict:
    """Root plus the quadratic (large-x) approximation's root pair."""
    mu = amplitude_equation_mu(params)
    out = {"mu": mu}
    if mu < 0.5:
        x = limit_cycle_amplitude(params) * params.eta
        out["x"] = x
        out["r_star"] = x / params.eta
        out["residual"] = abs(math.exp(mu * x * x) - math.cosh(x))
    disc = 1.0 - 4.0 * mu * math.log(2.0)
    if 0 < mu and disc >= 0:
        s = math.sqrt(disc)
        out["asymptotic_roots"] = ((1.0 - s) / (2.0 * mu),
                                   (1.0 + s) / (2.0 * mu))
    return out


def tunneling_intensities(t, r_star: float, Omega: float,
                          params: ShuttleParams):
    """(lambda_L, lambda_R) on the prescribed cycle X = r* sin(Omega t)."""
    gamma = params.symmetric_rate
    t = np.asarray(t, dtype=float)
    mod = 4.0 * params.eta * r_star * np.sin(Omega * t)
    return gamma * np.exp(-mod), gamma * np.exp(mod)


def waiting_time_survival(t, params: ShuttleParams, r_star: float,
                          Omega: float, grid: int = 4096):
    """P(no unload by t | loaded at 0) = exp(-integral of lambda_R)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("t must be non-negative")
    tmax = float(t.max()) if t.size else 0.0
    if tmax == 0.0:
        return np.ones_like(t) if t.ndim else 1.0
    ts = np.linspace(0.0, tmax, grid)
    _, lam_r = tunneling_intensities(ts, r_star, Omega, params)
    cum = np.concatenate([[0.0], np.cumsum(
        0.5 * (lam_r[1:] + lam_r[:-1]) * np.diff(ts))])
    out = np.exp(-np.interp(t, ts, cum))
    return float(out) if out.ndim == 0 else out


class _PeriodicIntegratedRate:
    """Inverse of the integrated rate of a periodic intensity."""

    def __init__(self, gamma: float, mod_amp: float, Omega: float,
                 grid: int = 8192):
        self.period = 2.0 * math.pi / Omega
        self.ts = np.linspace(0.0, self.period, grid + 1)
        lam = gamma * np.exp(mod_amp * np.sin(Omega * self.ts))
        self.cum = np.concatenate([[0.0], np.cumsum(
            0.5 * (lam[1:] + lam[:-1]) * np.diff(self.ts))])
        self.total = self.cum[-1]

    def advance(self, t0: float, target: float) -> float:
        """Time at which the integral from t0 reaches `target`."""
        k0, phase = divmod(t0, self.period)
        base = np.interp(phase, self.ts, self.cum)
        goal = base + target
        wraps, rem = divmod(goal, self.total)
        t_in = np.interp(rem, self.cum, self.ts)
        return (k0 + wraps) * self.period + t_in


def sample_oncycle_events(params: ShuttleParams, r_star: float, Omega: float,
                          horizon: float, stream: RngStream,
                          start_occupied: bool = True,
                          gated: bool = True) -> EventRecord:
    """Tunnelling events with the displacement pinned to the cycle.

    gated=True alternates load/unload with the occupancy (the physical
    single-electron process); gated=False emits the raw unload point
    process with intensity lambda_R(t), which at r* = 0 is exactly a
    Poisson process at the bare rate.
    """
    gamma = params.symmetric_rate
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    mod = 4.0 * params.eta * r_star
    gen = stream.generator()
    if not gated:
        off = _PeriodicIntegratedRate(gamma, mod, Omega)
        times = []
        t = 0.0
        while True:
            t = off.advance(t, gen.standard_exponential())
            if t > horizon:
                break
            times.append(t)
        return EventRecord(np.array(times), (LABEL_OFF,) * len(times),
                           horizon, meta={"r_star": r_star, "Omega": Omega,
                                          "gated": False})
    off = _PeriodicIntegratedRate(gamma, mod, Omega)
    on = _PeriodicIntegratedRate(gamma, -mod, Omega)
    times = []
    labels = []
    occupied = start_occupied
    t = 0.0
    while True:
        proc = off if occupied else on
        t = proc.advance(t, gen.standard_exponential())
        if t > horizon:
            break
        occupied = not occupied
        times.append(t)
        labels.append(LABEL_OFF if not occupied else LABEL_ON)
    return EventRecord(np.array(times), tuple(labels), horizon,
                       meta={"r_star": r_star, "Omega": Omega, "gated": True})


def cycle_work(T_k: float, params: ShuttleParams, r_star: float):
    """(W_k, Q_paper, Q_balance) for one cycle of duration T_k."""
    if T_k <= 0:
        raise ParameterError("cycle duration must be positive")
    w = 2.0 * params.chi * r_star * T_k / math.pi
    return w, w / params.kappa, w


def average_heat(params: ShuttleParams, r_star: float, tau: float,
                 convention: str = "paper") -> float:
    """Long-run dissipated energy over a horizon tau.

    Scales with the mean occupied fraction gamma_L/(gamma_L + gamma_R).
    """
    frac = params.gamma_L / (params.gamma_L + params.gamma_R)
    q = 2.0 * params.chi * r_star * tau * frac / math.pi
    if convention == "paper":
        return q / params.kappa
    if convention == "balance":
        return q
    raise ParameterError("convention must be 'paper' or 'balance'")


def event_cycle_ledger(events: EventRecord, params: ShuttleParams,
                       r_star: float,
                       convention: str = "paper") -> CycleLedger:
    """Per-cycle ledger from unload events: one cycle per inter-unload gap."""
    t_off = events.times_of(LABEL_OFF)
    if len(t_off) < 2:
        return CycleLedger(np.empty(0), np.empty(0), np.empty(0),
                           meta=dict(events.meta))
    periods = np.diff(t_off)
    works = 2.0 * params.chi * r_star * periods / math.pi
    if convention == "paper":
        heats = works / params.kappa
    elif convention == "balance":
        heats = works.copy()
    else:
        raise ParameterError("convention must be 'paper' or 'balance'")
    meta = dict(events.meta)
    meta["heat_convention"] = convention
    return CycleLedger(periods, works, heats, meta=meta)


def find_hopf_threshold(params: ShuttleParams, chi_lo: float, chi_hi: float,
                        dt: float = 1e-3, horizon: float = 800.0,
                        amp_tol: float = 1e-2, iters: int = 22) -> float:
    """Bisect the electrostatic drive at which the fixed point sheds a
    limit cycle, judged by the late-time oscillation amplitude of X."""
    def sustained(chi: float) -> bool:
        traj = simulate_shuttle_ensemble(replace(params, chi=chi), dt, horizon)
        x = traj.component("X")
        tail = x[int(0.75 * len(x)):]
        return 0.5 * (tail.max() - tail.min()) > amp_tol

    if sustained(chi_lo):
        raise ParameterError("chi_lo is already above threshold")
    if not sustained(chi_hi):
        raise ParameterError("chi_hi is still below threshold")
    for _ in range(iters):
        mid = 0.5 * (chi_lo + chi_hi)
        if sustained(mid):
            chi_hi = mid
        else:
            chi_lo = mid
    return 0.5 * (chi_lo + chi_hi)
