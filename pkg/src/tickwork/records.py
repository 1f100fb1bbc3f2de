"""Result containers: trajectories, event records, and per-cycle ledgers.

All containers are immutable after construction and validate their
invariants eagerly, so a malformed object cannot propagate into the
statistics layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import ParameterError

_DT_RTOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.asarray(a)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled multivariate time series.

    `states` has one row per time point and one column per component named
    in `labels`.  `meta` carries parameter and seed provenance.
    """

    times: np.ndarray
    states: np.ndarray
    labels: tuple
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        times = _frozen(np.asarray(self.times, dtype=float))
        states = _frozen(np.asarray(self.states))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))
        if times.ndim != 1 or len(times) < 2:
            raise ParameterError("need at least two time points")
        if states.shape[0] != len(times):
            raise ParameterError("states row count must equal times length")
        if states.ndim != 2 or states.shape[1] != len(self.labels):
            raise ParameterError("states column count must match labels")
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise ParameterError("times must be strictly increasing")
        dt = steps[0]
        if np.any(np.abs(steps - dt) > _DT_RTOL * max(abs(dt), 1.0)):
            raise ParameterError("time grid must be uniform")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def component(self, label: str) -> np.ndarray:
        try:
            j = self.labels.index(label)
        except ValueError:
            raise ParameterError(
                f"no component {label!r}; have {self.labels}"
            ) from None
        return self.states[:, j]


@dataclass(frozen=True)
class EventRecord:
    """Ordered event times of a point/telegraph process with labels."""

    times: np.ndarray
    labels: tuple
    horizon: float
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        times = _frozen(np.asarray(self.times, dtype=float))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))
        if times.ndim != 1:
            raise ParameterError("event times must be one-dimensional")
        if len(times) != len(self.labels):
            raise ParameterError("one label per event time")
        if len(times) and np.any(np.diff(times) < 0):
            raise ParameterError("event times must be non-decreasing")
        if len(times) and times[-1] > self.horizon:
            raise ParameterError("event after the observation horizon")

    def __len__(self) -> int:
        return len(self.times)

    def times_of(self, label: str) -> np.ndarray:
        mask = np.fromiter(
            (lab == label for lab in self.labels), bool, count=len(self.labels)
        )
        return self.times[mask]

    def count(self, label: str | None = None) -> int:
        if label is None:
            return len(self.times)
        return int(sum(lab == label for lab in self.labels))


@dataclass(frozen=True)
class CycleLedger:
    """Per-cycle thermodynamic bookkeeping: period, work in, heat out."""

    periods: np.ndarray
    works: np.ndarray
    heats: np.ndarray
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        periods = _frozen(np.asarray(self.periods, dtype=float))
        works = _frozen(np.asarray(self.works, dtype=float))
        heats = _frozen(np.asarray(self.heats, dtype=float))
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "works", works)
        object.__setattr__(self, "heats", heats)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))
        if not (len(periods) == len(works) == len(heats)):
            raise ParameterError("ledger columns must have equal length")
        if len(periods) and np.any(periods <= 0):
            raise ParameterError("cycle periods must be positive")

    def __len__(self) -> int:
        return len(self.periods)


@dataclass(frozen=True)
class EstimateRecord:
    """Point estimate with its relative error and input provenance."""

    estimate: float
    relative_error: float
    inputs: Mapping = field(default_factory=dict)
    error_defined: bool = True

    def __post_init__(self):
        object.__setattr__(self, "inputs", MappingProxyType(dict(self.inputs)))
        if self.error_defined and self.relative_error < 0:
            raise ParameterError("relative error cannot be negative")
