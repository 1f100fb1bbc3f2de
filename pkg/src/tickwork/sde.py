"""Shared stochastic-integration plumbing.

`ito_step` is the single Euler-Maruyama update used by the generic
integrator; model modules with hot loops use the batched kernels in
`tickwork.kernels` instead, which implement the same update.

`run_ensemble` executes independent trials, trial k drawing from stream
index k, optionally across a thread pool.  Results are collected in trial
order, so the output is independent of worker count and scheduling; the
TICKWORK_THREADS environment variable caps parallelism (speed only).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import NumericalBlowupError, ParameterError
from .records import Trajectory
from .streams import RngStream


def ito_step(state, drift, diffusion, dt: float, dw) -> np.ndarray:
    """One Euler-Maruyama update: state + drift(state) dt + diffusion(state) dW."""
    if dt <= 0:
        raise ParameterError("dt must be positive")
    state = np.asarray(state, dtype=float)
    out = state + np.asarray(drift(state)) * dt \
        + np.asarray(diffusion(state)) * np.asarray(dw)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowupError("Ito step produced NaN/Inf", state=state)
    return out


@dataclass(frozen=True)
class StochasticProcessSpec:
    """Self-contained description of a diffusive process for the generic
    integrator: dx = drift(x) dt + diffusion(x) dW, from x0 over `horizon`.

    `diffusion` may return a vector (independent noise per component) or a
    scalar.  Model modules assemble these for ensemble runs; anything hot
    gets a dedicated kernel instead.
    """

    drift: Callable
    diffusion: Callable
    x0: Sequence[float]
    dt: float
    horizon: float
    labels: tuple
    params: Mapping = field(default_factory=dict)
    record_every: int = 1

    def simulate(self, stream: RngStream) -> Trajectory:
        if self.dt <= 0 or self.horizon <= 0:
            raise ParameterError("dt and horizon must be positive")
        n_steps = int(round(self.horizon / self.dt))
        x = np.array(self.x0, dtype=float)
        dim = len(x)
        gen = stream.generator()
        sq = np.sqrt(self.dt)
        n_rec = n_steps // self.record_every
        out = np.empty((n_rec + 1, dim))
        out[0] = x
        r = 0
        for j in range(n_steps):
            dw = gen.standard_normal(dim) * sq
            x = x + np.asarray(self.drift(x)) * self.dt \
                + np.asarray(self.diffusion(x)) * dw
            if not np.all(np.isfinite(x)):
                raise NumericalBlowupError(
                    "trajectory left the representable range",
                    time=(j + 1) * self.dt, state=x)
            if (j + 1) % self.record_every == 0:
                r += 1
                out[r] = x
        times = np.arange(n_rec + 1) * (self.dt * self.record_every)
        meta = dict(self.params)
        meta.update(master_seed=stream.master_seed,
                    stream_index=stream.stream_index, dt=self.dt)
        return Trajectory(times, out[:r + 1], self.labels, meta)


def thread_limit() -> int:
    """Worker cap from TICKWORK_THREADS (affects speed, never results)."""
    raw = os.environ.get("TICKWORK_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        n = os.cpu_count() or 1
    return n


def run_ensemble(spec, trials: int, master_seed: int, *, threads=None):
    """Run `trials` independent realizations; trial k uses stream index k.

    `spec` is a StochasticProcessSpec or any callable(stream) -> result.
    Results come back as a list in trial order regardless of scheduling.
    Per-trial failures are re-raised with the trial index attached.
    """
    if trials < 1:
        raise ParameterError("need at least one trial")
    simulate = spec.simulate if hasattr(spec, "simulate") else spec
    streams = [RngStream(master_seed, k) for k in range(trials)]

    def one(k: int):
        try:
            return simulate(streams[k])
        except NumericalBlowupError as err:
            raise NumericalBlowupError(
                str(err.args[0]) if err.args else "trial failed",
                time=err.time, state=err.state, trial=k) from err

    n_workers = min(threads or thread_limit(), trials)
    if n_workers <= 1:
        return [one(k) for k in range(trials)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(one, range(trials)))
