"""
Keyed counter-based random streams.

Every random quantity is a pure function of (seed, purpose, round_id, slot):
the Philox key carries (seed, purpose) and the counter carries the round.
A block of draws for round r always starts at the same counter value, so a
batch over rounds [lo, hi) yields exactly the rows a single-round call would.
"""
from enum import IntEnum
from typing import Sequence

import numpy as np

from config import MAX_SEED
from utils.exceptions import InvalidConfig


_WORDS_PER_COUNTER = 4  # Philox4x64 emits four 64-bit words per counter step
_UNIT = 2.0 ** -53


class Purpose(IntEnum):
    """Independent stream families."""
    TIMING = 1
    INPUT = 2
    FORCED = 3
    LAMBDA = 4
    SAMPLE = 5


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise InvalidConfig(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _block_width(width: int) -> int:
    return -(-int(width) // _WORDS_PER_COUNTER) * _WORDS_PER_COUNTER


def keyed_uniforms(seed: int, purpose: Purpose, first_round: int, n_rounds: int,
                   width: int) -> np.ndarray:
    """
    Uniform doubles in [0, 1) for a contiguous range of rounds.

    Parameters:
        seed: 64-bit experiment seed
        purpose: stream family
        first_round: round id of the first row
        n_rounds: number of rows
        width: draws per round (slots)

    Returns:
        np.ndarray: shape (n_rounds, width)
    """
    if n_rounds <= 0 or width <= 0:
        return np.zeros((max(n_rounds, 0), max(width, 0)))
    block = _block_width(width)
    key = np.array([check_seed(seed), int(purpose)], dtype=np.uint64)
    counter = int(first_round) * (block // _WORDS_PER_COUNTER)
    bitgen = np.random.Philox(key=key, counter=counter)
    raw = bitgen.random_raw(n_rounds * block).reshape(n_rounds, block)[:, :width]
    return (raw >> np.uint64(11)).astype(np.float64) * _UNIT


def keyed_uniform(seed: int, purpose: Purpose, round_id: int, slot: int, width: int) -> float:
    """Single draw; equal to keyed_uniforms(...)[0, slot] for the same round."""
    return float(keyed_uniforms(seed, purpose, round_id, 1, width)[0, slot])


def keyed_generator(seed: int, purpose: Purpose) -> np.random.Generator:
    """A sequential generator on its own key, for samplers outside the round loop."""
    key = np.array([check_seed(seed), int(purpose)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def categorical(u: np.ndarray, probs: Sequence[float]) -> np.ndarray:
    """Inverse-CDF categorical draw from uniforms."""
    cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
    idx = np.searchsorted(cdf, np.asarray(u) * cdf[-1], side="right")
    return np.minimum(idx, len(cdf) - 1)
