"""Seeded, splittable random streams.

Every stochastic operation in the package draws from an `RngStream`, a
(master_seed, stream_index) pair.  The pair is hashed into generator state
through `numpy.random.SeedSequence`, so distinct indices give statistically
independent streams and the same pair always reproduces the same draws,
regardless of how many worker threads an ensemble uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream identified by (master_seed, stream_index)."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise ParameterError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(
            entropy=self.master_seed & ((1 << 64) - 1),
            spawn_key=(self.stream_index,),
        )
        return np.random.default_rng(seq)

    def substream(self, index: int) -> "RngStream":
        """Derived stream for trial `index` of an ensemble."""
        seq = np.random.SeedSequence(
            entropy=self.master_seed & ((1 << 64) - 1),
            spawn_key=(self.stream_index, index),
        )
        # collapse the two-level key into a fresh 64-bit master seed so the
        # result is again a plain (seed, index) pair
        child = int(seq.generate_state(1, np.uint64)[0])
        return RngStream(child, 0)


def wiener_increments(stream: RngStream, n: int, dt: float) -> np.ndarray:
    """`n` independent Wiener increments: Gaussian, mean 0, variance `dt`."""
    if n < 1:
        raise ParameterError("need at least one increment")
    if dt <= 0:
        raise ParameterError("dt must be positive")
    return stream.generator().standard_normal(n) * np.sqrt(dt)
