"""Trigger-stabilized crystal oscillator clock.

An astable comparator (Schmitt trigger) drives an LC-equivalent resonator
that feeds its capacitor voltage X back to the trigger input:

    dV = [gamma (1 - g(V)) e^(-eta X) - gamma (1 + g(V)) e^(eta X)] dt
    dX = omega Y dt
    dY = (-omega X - kappa Y + chi V) dt + sqrt(D) dW

with the comparator gain curve g(V) = (V + tanh(beta V))/(1 + V tanh(beta V)).
Above a critical coupling chi the origin loses stability (Hopf) and the
system settles on a relaxation-oscillation limit cycle: V swings between
the saturation rails +-1 (square-ish) while X stays nearly sinusoidal.
For eta >> beta the rail force on the resonator approaches a sign function
of the input, i.e. the same kick structure as the escapement pendulum.

The static analysis works with the steady-state input curve

    X(V) = -(beta/eta) V + ln((1+V)/(1-V)) / (2 eta),

whose turning points V_c = +-sqrt((beta-1)/beta) (present for beta > 1)
bound the bistable region; a quasi-static input sweep follows a stable
branch until it disappears and then jumps, giving the hysteresis loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import DomainError, NoHysteresisError, ParameterError
from .records import Trajectory
from .streams import RngStream


@dataclass(frozen=True)
class QuartzParams:
    gamma: float          # trigger relaxation rate
    eta: float            # trigger input sensitivity
    beta: float           # comparator feedback gain (saturation voltage = 1)
    omega: float = 1.0    # resonator natural frequency
    kappa: float = 1.0    # resonator damping
    chi: float = 0.0      # trigger -> resonator coupling
    D: float = 0.0        # thermal diffusion constant on the flux equation

    def __post_init__(self):
        if self.gamma <= 0 or self.eta <= 0 or self.omega <= 0:
            raise ParameterError("gamma, eta, omega must be positive")
        if self.kappa < 0:
            raise ParameterError("kappa must be non-negative")
        if self.beta < 0 or self.chi < 0 or self.D < 0:
            raise ParameterError("beta, chi, D must be non-negative")


def schmitt_gain(V: float, beta: float) -> float:
    """Comparator gain curve; defined on the open interval |V| < 1."""
    if abs(V) >= 1.0:
        raise DomainError("gain curve is defined for |V| < 1")
    tb = math.tanh(beta * V)
    return (V + tb) / (1.0 + V * tb)


def steady_input_curve(V: float, beta: float, eta: float) -> float:
    """Input X producing steady output V (S-shaped for beta > 1)."""
    if abs(V) >= 1.0:
        raise DomainError("steady response is defined for |V| < 1")
    return -(beta / eta) * V + math.log((1.0 + V) / (1.0 - V)) / (2.0 * eta)


def hysteresis_thresholds(beta: float) -> tuple[float, float]:
    """Turning-point voltages (+V_c, -V_c) of the steady input curve."""
    if beta <= 1.0:
        raise NoHysteresisError("no bistable region for beta <= 1")
    vc = math.sqrt((beta - 1.0) / beta)
    return vc, -vc


def _branch_voltage(x: float, beta: float, eta: float, branch: str) -> float | None:
    """Stable-branch solution of steady_input_curve(V) = x, or None if the
    branch does not reach this input."""
    vc, _ = hysteresis_thresholds(beta)
    lo, hi = (vc, 1.0 - 1e-14) if branch == "upper" else (-1.0 + 1e-14, -vc)
    f = lambda v: steady_input_curve(v, beta, eta) - x
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        return None
    return brentq(f, lo, hi, xtol=1e-13)


def hysteresis_sweep(beta: float, eta: float, x_values) -> np.ndarray:
    """Quasi-static output along an input sweep, following the occupied
    stable branch and jumping where it terminates."""
    if beta <= 1.0:
        raise NoHysteresisError("no bistable region for beta <= 1")
    x_values = np.asarray(x_values, dtype=float)
    # start on whichever branch exists at the first input
    branch = "lower" if _branch_voltage(x_values[0], beta, eta, "lower") is not None else "upper"
    if _branch_voltage(x_values[0], beta, eta, branch) is None:
        raise ParameterError("sweep must start outside the bistable region")
    out = np.empty_like(x_values)
    for i, x in enumerate(x_values):
        v = _branch_voltage(x, beta, eta, branch)
        if v is None:
            branch = "upper" if branch == "lower" else "lower"
            v = _branch_voltage(x, beta, eta, branch)
            if v is None:
                raise ParameterError(f"no stable branch at X={x:.6g}")
        out[i] = v
    return out


def switching_inputs(beta: float, eta: float) -> tuple[float, float]:
    """(up-switch, down-switch) input levels of the quasi-static loop.

    The up-switch is where the lower branch terminates, X(-V_c); the
    down-switch is X(+V_c).  For beta > 1 the up-switch lies above the
    down-switch.
    """
    vc, _ = hysteresis_thresholds(beta)
    return steady_input_curve(-vc, beta, eta), steady_input_curve(vc, beta, eta)


def simulate_quartz(params: QuartzParams, dt: float, horizon: float,
                    stream: RngStream | None = None, x0=(0.1, 0.1, 0.0),
                    record_every: int = 1) -> Trajectory:
    """Integrate the coupled trigger/resonator system; returns (V, X, Y)."""
    if dt <= 0 or horizon <= 0:
        raise ParameterError("dt and horizon must be positive")
    if dt > 0.01 / params.gamma:
        raise ParameterError("dt must resolve the trigger rate (dt << 1/gamma)")
    noise_amp = math.sqrt(params.D)
    if noise_amp > 0 and stream is None:
        raise ParameterError("noisy simulation requires a stream")
    n_steps = int(round(horizon / dt))
    streams = [stream] if noise_amp > 0 else None
    rec = kernels.quartz_paths(
        [x0[0]], [x0[1]], [x0[2]], gamma=params.gamma, eta=params.eta,
        beta=params.beta, omega=params.omega, kappa=params.kappa,
        chi=params.chi, noise_amp=noise_amp, dt=dt, n_steps=n_steps,
        streams=streams, record_every=record_every)[0]
    n_rec = rec.shape[0]
    times = np.arange(n_rec + 1) * (dt * record_every)
    states = np.empty((n_rec + 1, 3))
    states[0] = x0
    states[1:] = rec
    meta = {"model": "quartz", "gamma": params.gamma, "eta": params.eta,
            "beta": params.beta, "omega": params.omega,
            "kappa": params.kappa, "chi": params.chi, "D": params.D,
            "dt": dt}
    if stream is not None:
        meta.update(master_seed=stream.master_seed,
                    stream_index=stream.stream_index)
    return Trajectory(times, states, ("V", "X", "Y"), meta)


def late_amplitude(traj: Trajectory, component: str = "X",
                   tail: float = 0.25) -> float:
    """Half peak-to-peak amplitude over the trailing fraction of a run."""
    sig = traj.component(component)
    n0 = int((1.0 - tail) * len(sig))
    window = sig[n0:]
    return 0.5 * (window.max() - window.min())


def find_hopf_threshold(params: QuartzParams, chi_lo: float, chi_hi: float,
                        dt: float = 1e-3, horizon: float = 400.0,
                        amp_tol: float = 1e-2, iters: int = 24) -> float:
    """Bisect the coupling at which the origin sheds a limit cycle.

    Decided by the late-time amplitude of X from a fixed perturbed start:
    below threshold it decays under amp_tol, above it saturates.
    """
    def sustained(chi):
        traj = simulate_quartz(replace(params, chi=chi), dt, horizon)
        return late_amplitude(traj) > amp_tol

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
