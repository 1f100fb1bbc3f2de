"""Exception and warning types shared across the package."""


class TickworkError(Exception):
    """Base class for all package errors."""


class ParameterError(TickworkError, ValueError):
    """A parameter violates a model invariant (non-positive rate, etc.)."""


class DomainError(TickworkError, ValueError):
    """An input lies outside the mathematical domain of the function."""


class UnsupportedCaseError(TickworkError):
    """The requested case is outside the regime the formula is valid for."""


class NoLimitCycleError(TickworkError):
    """No limit-cycle solution exists for the given parameters."""


class NoHysteresisError(TickworkError):
    """The static response has no bistable region (feedback too weak)."""


class BoundViolationError(TickworkError):
    """An intensity function exceeded its stated bound during sampling."""


class InsufficientDataError(TickworkError):
    """Not enough samples/ticks to compute the requested statistic."""


class AlignmentError(TickworkError):
    """Paired inputs (ledger and ticks) do not describe the same cycles."""


class NumericalBlowupError(TickworkError):
    """A trajectory left the representable range (NaN/Inf or overflow).

    Carries enough context to locate the failure: trial index (if run in
    an ensemble), simulation time, and the offending state.
    """

    def __init__(self, message, *, time=None, state=None, trial=None):
        self.time = time
        self.state = state
        self.trial = trial
        parts = [message]
        if trial is not None:
            parts.append(f"trial={trial}")
        if time is not None:
            parts.append(f"t={time:.6g}")
        if state is not None:
            parts.append(f"state={state}")
        super().__init__(" | ".join(parts))


class UnreliableDetectionWarning(UserWarning):
    """Jump detection ran outside its reliable regime (filter too slow)."""
