"""
Behavior Models

Scenario, Behavior and the report types of the behavior-core checks.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from config import MAX_ENUMERATED_OBJECTS
from utils import InvalidConfig, guarded_product, all_tuples, flat_index, party_label


@dataclass(frozen=True)
class Scenario:
    """
    Number of parties with per-party input and output cardinalities.

    Attributes:
        n_parties: number of parties
        input_cards: inputs per party
        output_cards: outputs per party
    """
    n_parties: int
    input_cards: Tuple[int, ...]
    output_cards: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_cards", tuple(int(c) for c in self.input_cards))
        object.__setattr__(self, "output_cards", tuple(int(c) for c in self.output_cards))
        if self.n_parties < 1:
            raise InvalidConfig(f"n_parties must be >= 1, got {self.n_parties}")
        if len(self.input_cards) != self.n_parties or len(self.output_cards) != self.n_parties:
            raise InvalidConfig(
                f"expected {self.n_parties} input and output cardinalities, got "
                f"{len(self.input_cards)} and {len(self.output_cards)}"
            )
        if min(self.input_cards + self.output_cards) < 1:
            raise InvalidConfig("all cardinalities must be >= 1")
        guarded_product(self.input_cards + self.output_cards, MAX_ENUMERATED_OBJECTS,
                        what="behavior table")

    @classmethod
    def uniform(cls, n_parties: int, n_inputs: int = 2, n_outputs: int = 2) -> "Scenario":
        return cls(n_parties, (n_inputs,) * n_parties, (n_outputs,) * n_parties)

    @property
    def n_joint_inputs(self) -> int:
        return math.prod(self.input_cards)

    @property
    def n_joint_outputs(self) -> int:
        return math.prod(self.output_cards)

    @property
    def is_chsh(self) -> bool:
        return self.n_parties == 2 and self.input_cards == (2, 2) and self.output_cards == (2, 2)

    def joint_inputs(self) -> np.ndarray:
        return all_tuples(self.input_cards)

    def joint_outputs(self) -> np.ndarray:
        return all_tuples(self.output_cards)

    def input_index(self, inputs) -> int:
        return flat_index(inputs, self.input_cards)

    def output_index(self, outputs) -> int:
        return flat_index(outputs, self.output_cards)

    def labels(self) -> Tuple[str, ...]:
        return tuple(party_label(i) for i in range(self.n_parties))


@dataclass(frozen=True, eq=False)
class Behavior:
    """
    Conditional probability table P(outputs | inputs).

    probs has shape (n_joint_inputs, n_joint_outputs), joint input outer,
    joint output inner. The array is frozen after construction.
    """
    scenario: Scenario
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64).reshape(
            self.scenario.n_joint_inputs, self.scenario.n_joint_outputs
        )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def tensor(self) -> np.ndarray:
        """View with shape input_cards + output_cards."""
        return self.probs.reshape(self.scenario.input_cards + self.scenario.output_cards)

    def prob(self, inputs, outputs) -> float:
        return float(self.probs[self.scenario.input_index(inputs),
                                self.scenario.output_index(outputs)])

    def distribution(self, inputs) -> np.ndarray:
        return self.probs[self.scenario.input_index(inputs)]

    def allclose(self, other: "Behavior", atol: float = 1e-9) -> bool:
        return self.scenario == other.scenario and bool(
            np.allclose(self.probs, other.probs, rtol=0.0, atol=atol)
        )

    def max_deviation(self, other: "Behavior") -> float:
        return float(np.abs(self.probs - other.probs).max())


@dataclass(frozen=True)
class BellFunctional:
    """Linear functional over behaviors with its classical bound."""
    scenario: Scenario
    coefficients: np.ndarray = field(compare=False)
    classical_bound: float

    def evaluate(self, behavior: Behavior) -> float:
        return float(np.sum(self.coefficients * behavior.probs))


@dataclass(frozen=True)
class ValidationReport:
    normalized: bool
    entries_in_range: bool
    worst_deviation: float

    @property
    def ok(self) -> bool:
        return self.normalized and self.entries_in_range


@dataclass(frozen=True)
class SignalingWitness:
    """
    Party whose input flip moves the others' marginal, and the two joint inputs.
    """
    party: int
    inputs: Tuple[Tuple[int, ...], Tuple[int, ...]]
    deviation: float

    def describe(self) -> str:
        first, second = self.inputs
        return (
            f"flipping {party_label(self.party)}'s input {first} -> {second} "
            f"moves the other parties' marginal by {self.deviation:.3g}"
        )


@dataclass(frozen=True)
class NoSignalingReport:
    holds: bool
    worst_violation: float
    witness: Optional[SignalingWitness] = None
