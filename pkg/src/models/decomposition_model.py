"""
Decomposition Models

Chain factors of a behavior along a temporal order, and finite mixtures of
order-respecting deterministic assignments.
"""
from dataclasses import dataclass, field
from typing import Set, Tuple

import numpy as np

from config import NORM_TOL
from models.assignment_model import DeterministicAssignment
from models.behavior_model import Scenario
from models.ordering_model import Ordering
from utils import WeightSum


@dataclass(frozen=True, eq=False)
class ChainFactors:
    """
    Conditionals P(a_k | x_1..x_k, a_1..a_(k-1)) along an order.

    factors[k] has shape (m_1, .., m_k, d_1, .., d_(k-1), d_k) in the order's
    party sequence: history axes first, the k-th party's output last.
    filler_mask[k] flags histories whose conditioning event has probability 0
    (its column holds the filler distribution).
    """
    scenario: Scenario
    order: Ordering
    factors: Tuple[np.ndarray, ...]
    filler_mask: Tuple[np.ndarray, ...]

    def conditional(self, k: int, history: Tuple[int, ...]) -> np.ndarray:
        return self.factors[k][tuple(history)]

    def filler_histories(self) -> Set[Tuple[int, Tuple[int, ...]]]:
        return {
            (k, tuple(int(v) for v in idx))
            for k, mask in enumerate(self.filler_mask)
            for idx in np.argwhere(mask)
        }


@dataclass(frozen=True)
class DecompositionTerm:
    weight: float
    assignment: DeterministicAssignment


@dataclass(frozen=True, eq=False)
class Decomposition:
    """
    Weighted mixture of deterministic assignments that all respect `order`.

    Only strictly positive weights are stored; weights sum to 1.
    """
    order: Ordering
    terms: Tuple[DecompositionTerm, ...]
    _cumulative: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        weights = self.weights()
        if (weights <= 0).any():
            raise WeightSum("decomposition weights must be strictly positive")
        if abs(weights.sum() - 1.0) > NORM_TOL:
            raise WeightSum(f"decomposition weights sum to {weights.sum():.12f}, expected 1")
        cumulative = np.cumsum(weights)
        cumulative.setflags(write=False)
        object.__setattr__(self, "_cumulative", cumulative)

    @property
    def scenario(self) -> Scenario:
        return self.terms[0].assignment.scenario

    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms], dtype=np.float64)

    def __len__(self):
        return len(self.terms)

    def term_for(self, u: float) -> int:
        """Index of the term selected by a uniform draw u in [0, 1)."""
        idx = int(np.searchsorted(self._cumulative, u * self._cumulative[-1], side="right"))
        return min(idx, len(self.terms) - 1)
