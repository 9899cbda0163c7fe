"""Deterministic, splittable random streams.

A stream is keyed by ``(master_seed, stream_id)`` and optionally a path of
child indices.  The key is fed to :class:`numpy.random.SeedSequence` as the
spawn key, and the resulting seed drives a PCG64DXSM bit generator
(128-bit state, jumpable).  Streams with different keys are statistically
independent; streams with equal keys replay bit-identically.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class RandomStream:
    """A seeded random stream confined to one worker at a time."""

    __slots__ = ("master_seed", "stream_id", "path", "gen")

    def __init__(self, master_seed: int, stream_id: int, path: tuple[int, ...] = ()):
        if master_seed < 0 or stream_id < 0:
            raise ValueError("master_seed and stream_id must be nonnegative")
        self.master_seed = int(master_seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self.path = tuple(int(i) for i in path)
        seq = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.stream_id, *self.path)
        )
        self.gen = np.random.Generator(np.random.PCG64DXSM(seq))

    def substream(self, index: int) -> "RandomStream":
        """Independent child stream; does not advance this stream."""
        return RandomStream(self.master_seed, self.stream_id, (*self.path, index))

    def __repr__(self) -> str:
        tail = f", path={self.path}" if self.path else ""
        return f"RandomStream(master_seed={self.master_seed}, stream_id={self.stream_id}{tail})"

    # thin pass-throughs used by the kernels
    def normal(self, size=None):
        return self.gen.standard_normal(size)

    def uniform(self, size=None):
        return self.gen.random(size)

    def chisquare(self, df, size=None):
        return self.gen.chisquare(df, size)

    def gamma(self, shape, size=None):
        return self.gen.standard_gamma(shape, size)


def make_stream(master_seed: int, stream_id: int) -> RandomStream:
    return RandomStream(master_seed, stream_id)
