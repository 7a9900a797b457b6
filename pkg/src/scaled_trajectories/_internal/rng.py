"""
Counter-based random streams.

Every trajectory index owns its own Philox generator derived from ``(master_seed, stream_id, index,
substream)``. Draws for one trajectory therefore never depend on how trajectories are grouped into
chunks or how many worker threads run them.
"""

from __future__ import annotations

import dataclasses
import enum
from collections.abc import Iterable

import numpy as np
from numpy.typing import NDArray
from typing_extensions import TypedDict

from scaled_trajectories._internal.exceptions import InvalidParameterException

MAX_SEED = 2**64 - 1
NOISE_BLOCK_SIZE = 1024


class SeedProvenance(TypedDict):
    master_seed: int
    stream_id: int


class Substream(enum.IntEnum):
    VELOCITY = 0
    NOISE = 1
    BORN = 2


@dataclasses.dataclass(frozen=True)
class RandomStreams:
    master_seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= MAX_SEED:
            raise InvalidParameterException(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        if self.stream_id < 0:
            raise InvalidParameterException(f"stream_id must be non-negative, got {self.stream_id}")

    def generator(self, index: int, substream: Substream) -> np.random.Generator:
        seed_sequence = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, index, int(substream)))
        return np.random.Generator(np.random.Philox(seed_sequence))

    def generators(self, indices: Iterable[int], substream: Substream) -> list[np.random.Generator]:
        return [self.generator(index, substream) for index in indices]

    def derive(self, stream_id: int) -> RandomStreams:
        return dataclasses.replace(self, stream_id=stream_id)

    @property
    def provenance(self) -> SeedProvenance:
        return {"master_seed": self.master_seed, "stream_id": self.stream_id}


class NoiseBlocks:
    """
    Standard normal increments for a group of trajectories, one row per trajectory.

    Each generator is consumed in fixed-size blocks, so the increment for step ``k`` of a
    trajectory is the same whatever group it is simulated in.
    """

    def __init__(self, generators: list[np.random.Generator], block_size: int = NOISE_BLOCK_SIZE):
        self.generators = generators
        self.block_size = block_size
        self._block: NDArray[np.float64] | None = None
        self._block_index = -1

    def step(self, k: int) -> NDArray[np.float64]:
        block_index, offset = divmod(k, self.block_size)
        if block_index != self._block_index:
            if block_index != self._block_index + 1:
                raise ValueError(f"noise blocks must be consumed in order, requested block {block_index}")
            self._block = np.stack([generator.standard_normal(self.block_size) for generator in self.generators])
            self._block_index = block_index
        assert self._block is not None
        return self._block[:, offset]
