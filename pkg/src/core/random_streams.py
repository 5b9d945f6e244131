"""Reproducible random streams keyed by (seed, stream path).

Every simulation draws its uniforms from a Philox counter-based generator whose
key is derived from the run seed and a path of indices (outer sample index,
then, for nested checks, position, operator id and inner sample index). Draws
are therefore a pure function of the key and the draw index: samples can be
produced in any order, or in parallel, and still give the same outcomes.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

logger = logging.getLogger(__name__)

_U64_MAX = 2**64 - 1
_PHILOX_BLOCK = 4  # 64-bit outputs produced per counter value


@dataclass(frozen=True)
class SampleKey:
    """Identity of one random stream.

    Attributes:
        seed: Run seed (unsigned 64-bit)
        stream_path: Non-empty sequence of non-negative indices
    """

    seed: int
    stream_path: tuple[int, ...]

    def __post_init__(self):
        """Validate seed and path."""
        if not 0 <= self.seed <= _U64_MAX:
            raise ValueError(f"Seed must be an unsigned 64-bit integer, got {self.seed}")
        if not self.stream_path:
            raise ValueError("Stream path must not be empty")
        if any(index < 0 for index in self.stream_path):
            raise ValueError(f"Stream path indices must be non-negative, got {self.stream_path}")

    def child(self, *indices: int) -> "SampleKey":
        """Key of a sub-stream: this path extended by ``indices``."""
        return SampleKey(self.seed, self.stream_path + tuple(indices))


@lru_cache(maxsize=65_536)
def _philox_key(key: SampleKey) -> np.ndarray:
    """128-bit Philox key for a sample key, hashed through SeedSequence."""
    sequence = np.random.SeedSequence(entropy=key.seed, spawn_key=key.stream_path)
    return sequence.generate_state(2, dtype=np.uint64)


def make_stream(key: SampleKey) -> np.random.Generator:
    """
    Sequential generator over the stream identified by ``key``.

    Two generators built from equal keys produce identical sequences.
    """
    return np.random.Generator(np.random.Philox(key=_philox_key(key)))


def sample_uniform(key: SampleKey, draw_index: int) -> float:
    """
    Uniform draw in [0, 1) at position ``draw_index`` of a stream.

    The value depends only on (key, draw_index): the generator is positioned
    directly at the counter block holding the draw.

    Args:
        key: Stream identity
        draw_index: Non-negative position within the stream

    Returns:
        Uniform float in [0, 1)
    """
    if draw_index < 0:
        raise ValueError(f"Draw index must be non-negative, got {draw_index}")

    block, offset = divmod(draw_index, _PHILOX_BLOCK)
    generator = np.random.Generator(np.random.Philox(key=_philox_key(key), counter=block))
    return float(generator.random(offset + 1)[-1])
