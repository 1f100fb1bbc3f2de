"""Point-process and telegraph samplers.

Both samplers are pure functions of (parameters, stream): the same stream
always yields the same event record.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import BoundViolationError, ParameterError
from .records import EventRecord
from .streams import RngStream


def thinning_sample(intensity: Callable[[float], float], intensity_bound: float,
                    horizon: float, stream: RngStream,
                    label: str = "event") -> EventRecord:
    """Inhomogeneous Poisson sampling by thinning.

    Candidate events arrive at the constant rate `intensity_bound`; each is
    accepted with probability intensity(t)/bound.  The bound must dominate
    the intensity over the whole horizon.
    """
    if intensity_bound <= 0:
        raise ParameterError("intensity bound must be positive")
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    gen = stream.generator()
    times = []
    t = 0.0
    while True:
        t += gen.standard_exponential() / intensity_bound
        if t > horizon:
            break
        lam = float(intensity(t))
        if lam < 0:
            raise ParameterError(f"negative intensity at t={t:.6g}")
        if lam > intensity_bound * (1.0 + 1e-12):
            raise BoundViolationError(
                f"intensity {lam:.6g} exceeds bound {intensity_bound:.6g} "
                f"at t={t:.6g}")
        if gen.random() * intensity_bound < lam:
            times.append(t)
    return EventRecord(np.array(times), (label,) * len(times), horizon,
                       meta={"bound": intensity_bound,
                             "master_seed": stream.master_seed,
                             "stream_index": stream.stream_index})


def telegraph_sample(rate_up: float, rate_down: float, initial: str,
                     horizon: float, stream: RngStream) -> EventRecord:
    """Two-state telegraph process.

    `rate_up` is the rate of up-transitions (leaving the down state) and
    `rate_down` the rate of down-transitions (leaving the up state).  Each
    event is labelled with the state being entered ("up"/"down"), so the
    holding time before an event is exponential with the prior state's
    exit rate.  A zero exit rate makes that state absorbing.
    """
    if rate_up < 0 or rate_down < 0:
        raise ParameterError("rates must be non-negative")
    if rate_up == 0 and rate_down == 0:
        raise ParameterError("at least one rate must be positive")
    if initial not in ("up", "down"):
        raise ParameterError("initial state must be 'up' or 'down'")
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    gen = stream.generator()
    up = initial == "up"
    t = 0.0
    times = []
    labels = []
    while True:
        exit_rate = rate_down if up else rate_up
        if exit_rate == 0.0:
            break
        t += gen.standard_exponential() / exit_rate
        if t > horizon:
            break
        up = not up
        times.append(t)
        labels.append("up" if up else "down")
    return EventRecord(np.array(times), tuple(labels), horizon,
                       meta={"rate_up": rate_up, "rate_down": rate_down,
                             "initial": initial,
                             "master_seed": stream.master_seed,
                             "stream_index": stream.stream_index})


def occupancy_fraction(record: EventRecord, initial: str, label_up: str = "up",
                       label_down: str = "down") -> float:
    """Fraction of the horizon spent in the up state."""
    t_up = 0.0
    t_prev = 0.0
    up = initial == label_up or initial == "up"
    for t, lab in zip(record.times, record.labels):
        if up:
            t_up += t - t_prev
        t_prev = t
        up = lab == label_up
    if up:
        t_up += record.horizon - t_prev
    return t_up / record.horizon
