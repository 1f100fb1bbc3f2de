"""Model-agnostic tick metrology.

Turns trajectories or event records into tick series, summarizes period
statistics and counting statistics (Fano factor), and pairs per-cycle heat
with per-cycle period to trace the accuracy-dissipation tradeoff.

Convention: per cycle, the fractional frequency deviation is minus the
fractional period deviation to first order (d omega/omega = -dT/T), so
heat/period correlations translate directly into heat/frequency ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import AlignmentError, InsufficientDataError, ParameterError
from .records import CycleLedger, EventRecord, Trajectory


@dataclass(frozen=True)
class TickSeries:
    """Strictly increasing tick times with source provenance."""

    tick_times: np.ndarray
    source: Mapping = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.tick_times, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "tick_times", t)
        object.__setattr__(self, "source", dict(self.source))
        if t.ndim != 1:
            raise ParameterError("tick times must be one-dimensional")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ParameterError("tick times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.tick_times)

    def periods(self) -> np.ndarray:
        if len(self.tick_times) < 2:
            raise InsufficientDataError("need at least two ticks")
        return np.diff(self.tick_times)


def extract_ticks(signal, mode: str = "rising-zero-cross",
                  component: str | None = None,
                  label: str | None = None) -> TickSeries:
    """Deterministic tick extraction.

    rising-zero-cross: upward zero crossings of a trajectory component,
    sub-grid by linear interpolation (invariant under positive rescaling
    of the signal).  kick-transition: reversals of a binary +-mu signal
    from the negative to the positive level, timed at the sample midpoint.
    event-label: event times copied from an EventRecord (optionally
    filtered by label).
    """
    if mode == "event-label":
        if not isinstance(signal, EventRecord):
            raise ParameterError("event-label mode needs an EventRecord")
        times = signal.times_of(label) if label is not None else signal.times
        return TickSeries(times, {"mode": mode, **dict(signal.meta)})
    if not isinstance(signal, Trajectory):
        raise ParameterError("trajectory modes need a Trajectory")
    if component is None:
        component = signal.labels[0]
    s = signal.component(component)
    t = signal.times
    if mode == "rising-zero-cross":
        idx = np.where((s[:-1] < 0) & (s[1:] >= 0))[0]
        if len(idx) == 0:
            return TickSeries(np.empty(0), {"mode": mode})
        s0, s1 = s[idx], s[idx + 1]
        frac = np.where(s1 != s0, s0 / (s0 - s1), 0.5)
        times = t[idx] + frac * (t[idx + 1] - t[idx])
    elif mode == "kick-transition":
        idx = np.where((s[:-1] < 0) & (s[1:] > 0))[0]
        times = 0.5 * (t[idx] + t[idx + 1])
    else:
        raise ParameterError(f"unknown tick mode {mode!r}")
    return TickSeries(times, {"mode": mode, "component": component,
                              **dict(signal.meta)})


@dataclass(frozen=True)
class PeriodStatistics:
    mean: float
    variance: float
    hist_counts: np.ndarray
    hist_edges: np.ndarray
    fano: float
    fano_window: float
    n_ticks: int


def _fd_bins(x: np.ndarray, min_bins: int = 8) -> int:
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    if iqr <= 0:
        return min_bins
    width = 2.0 * iqr / len(x) ** (1.0 / 3.0)
    span = x.max() - x.min()
    if width <= 0 or span <= 0:
        return min_bins
    return max(int(np.ceil(span / width)), min_bins)


def period_statistics(ticks: TickSeries, fano_window: float | None = None,
                      min_bins: int = 8) -> PeriodStatistics:
    """Sample statistics of the tick periods plus window-count Fano factor.

    The histogram uses Freedman-Diaconis binning with at least `min_bins`
    bins; the Fano factor bins tick counts into fixed windows (default ten
    mean periods).
    """
    if len(ticks) < 10:
        raise InsufficientDataError("need at least 10 ticks for statistics")
    periods = ticks.periods()
    mean = float(periods.mean())
    variance = float(periods.var(ddof=1))
    counts, edges = np.histogram(periods, bins=_fd_bins(periods, min_bins))
    if fano_window is None:
        fano_window = 10.0 * mean
    t = ticks.tick_times
    span = t[-1] - t[0]
    n_win = int(span / fano_window)
    if n_win >= 2:
        win_counts, _ = np.histogram(
            t, bins=np.arange(n_win + 1) * fano_window + t[0])
        fano = float(win_counts.var(ddof=1) / win_counts.mean())
    else:
        fano = float("nan")
    return PeriodStatistics(mean, variance, counts, edges, fano,
                            fano_window, len(ticks))


def counting_fano(events, window: float, label: str | None = None) -> float:
    """Fano factor of event counts in fixed windows across one or more
    records (list input pools the windows)."""
    if isinstance(events, EventRecord):
        events = [events]
    all_counts = []
    for rec in events:
        times = rec.times_of(label) if label is not None else rec.times
        n_win = int(rec.horizon / window)
        if n_win < 1:
            raise InsufficientDataError("window longer than the horizon")
        counts, _ = np.histogram(times, bins=np.arange(n_win + 1) * window)
        all_counts.append(counts)
    counts = np.concatenate(all_counts)
    if len(counts) < 2 or counts.mean() == 0:
        raise InsufficientDataError("not enough windows/events")
    return float(counts.var(ddof=1) / counts.mean())


@dataclass(frozen=True)
class TradeoffReport:
    """Per-cycle fractional fluctuations of heat and period."""

    dq_frac: np.ndarray
    dt_frac: np.ndarray
    slope: float
    correlation: float
    note: str = ("per-cycle fractional frequency deviation = -dT/T "
                 "to first order")


def accuracy_dissipation_report(ledger: CycleLedger,
                                ticks: TickSeries | None = None) -> TradeoffReport:
    """Pair per-cycle heat and period fluctuations from one run.

    If `ticks` is given it must describe the same cycles as the ledger
    (one period per ledger row); otherwise the ledger's own periods are
    used.  Returns centered fractional deviations, the regression slope
    of dQ/Q on dT/T, and their correlation.
    """
    if ticks is not None:
        periods = ticks.periods()
        if len(periods) != len(ledger):
            raise AlignmentError(
                f"{len(periods)} tick periods vs {len(ledger)} ledger cycles")
    else:
        periods = ledger.periods
    if len(ledger) < 2:
        raise InsufficientDataError("need at least two cycles")
    q = ledger.heats
    dq = q / q.mean() - 1.0
    dtf = periods / periods.mean() - 1.0
    slope = float(np.polyfit(dtf, dq, 1)[0])
    corr = float(np.corrcoef(dtf, dq)[0, 1])
    return TradeoffReport(dq, dtf, slope, corr)


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("log-log fit needs positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def fractional_period_std(ticks: TickSeries) -> float:
    periods = ticks.periods()
    return float(periods.std(ddof=1) / periods.mean())
