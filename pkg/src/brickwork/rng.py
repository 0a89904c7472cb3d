"""Reproducible random streams.

Every Monte Carlo loop in the package derives one stream per trial (or per
fixed-size block of trials) from a master seed, so results do not depend on
how work is split across processes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A random stream named by a master seed and an index.

    The index may be a tuple; :meth:`substream` appends to it.  Equal
    ``(seed, index)`` pairs give bit-identical sample sequences.
    """

    seed: int
    index: Union[int, tuple] = 0

    @property
    def key(self) -> tuple:
        return self.index if isinstance(self.index, tuple) else (self.index,)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed & (2**64 - 1), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, i: int) -> "RngStream":
        return RngStream(self.seed, self.key + (int(i),))


RngLike = Union[RngStream, np.random.Generator, int, None]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


def root_stream(rng: RngLike) -> RngStream:
    """Coerce ``rng`` to a stream; generators and ints are turned into a seed."""
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    return RngStream(int(as_generator(rng).integers(2**63)))


def block_streams(root: RngStream, total: int, block: int) -> Iterator[tuple[RngStream, int]]:
    """Yield ``(substream, size)`` for consecutive blocks covering ``total`` trials."""
    for b, start in enumerate(range(0, total, block)):
        yield root.substream(b), min(block, total - start)
