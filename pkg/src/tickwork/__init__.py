"""tickwork: stochastic clock models and their thermodynamic bookkeeping.

Simulates a zoo of classical and quantum clocks as driven dissipative
stochastic systems - escapement pendulum, trigger-stabilized crystal
oscillator, laser (with optional Kerr self-pulsing), single-electron
shuttle, and a family of non-periodic thermal clocks - and measures the
common tradeoff: tick regularity is bought with dissipated energy.

Hot loops run in a compiled extension when available, with a pure NumPy
fallback selected at import (`tickwork.kernels.backend_name()` tells you
which).
"""

from .kernels import backend_name
from .records import CycleLedger, EstimateRecord, EventRecord, Trajectory
from .streams import RngStream, wiener_increments

__version__ = "0.1.0"

__all__ = [
    "CycleLedger",
    "EstimateRecord",
    "EventRecord",
    "RngStream",
    "Trajectory",
    "backend_name",
    "wiener_increments",
    "__version__",
]
