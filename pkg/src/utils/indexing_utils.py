"""
Mixed-radix indexing of joint inputs and joint outputs.

Joint tuples are flattened lexicographically with party 0 as the most
significant digit, which is numpy's C order.
"""
import math
from typing import Sequence, Tuple

import numpy as np

from config import MAX_ENUMERATED_OBJECTS
from utils.exceptions import ScenarioTooLarge


def guarded_product(cards: Sequence[int], limit: int = MAX_ENUMERATED_OBJECTS,
                    what: str = "joint space") -> int:
    """Product of cardinalities, refusing anything above the guard."""
    size = math.prod(int(c) for c in cards)
    if size > limit:
        raise ScenarioTooLarge(f"{what} has {size} elements, guard is {limit}")
    return size


def all_tuples(cards: Sequence[int]) -> np.ndarray:
    """
    All joint tuples in lexicographic order.

    Returns:
        np.ndarray: shape (prod(cards), len(cards)), one row per joint tuple
    """
    cards = tuple(int(c) for c in cards)
    if not cards:
        return np.zeros((1, 0), dtype=np.int64)
    size = guarded_product(cards, what="tuple space")
    return np.stack(np.unravel_index(np.arange(size), cards), axis=1).astype(np.int64)


def flat_index(digits: Sequence[int], cards: Sequence[int]) -> int:
    """Flatten one joint tuple."""
    if not cards:
        return 0
    return int(np.ravel_multi_index(tuple(int(d) for d in digits), tuple(cards)))


def unflatten(index: int, cards: Sequence[int]) -> Tuple[int, ...]:
    """Inverse of flat_index."""
    if not cards:
        return ()
    return tuple(int(d) for d in np.unravel_index(int(index), tuple(cards)))


def flat_indices(rows: np.ndarray, cards: Sequence[int]) -> np.ndarray:
    """Vectorised flat_index over the rows of a (N, len(cards)) array."""
    if not cards:
        return np.zeros(rows.shape[0], dtype=np.int64)
    return np.ravel_multi_index(tuple(rows.T), tuple(cards)).astype(np.int64)
