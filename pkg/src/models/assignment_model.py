"""
Assignment Models

Deterministic contextual assignments and their signaling structure.
"""
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterator, Tuple

import numpy as np

from models.behavior_model import Scenario
from models.ordering_model import Ordering
from utils import InvalidConfig, ScenarioMismatch, flat_indices, format_edges


@dataclass(frozen=True, eq=False)
class DeterministicAssignment:
    """
    Total function from joint inputs to joint outputs: one row per context.

    Attributes:
        scenario: the scenario it is defined on
        table: int array (n_joint_inputs, n_parties); row k holds the outputs
               for the k-th joint input in lexicographic order
    """
    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64).reshape(
            self.scenario.n_joint_inputs, self.scenario.n_parties
        )
        cards = np.asarray(self.scenario.output_cards)
        if (table < 0).any() or (table >= cards).any():
            raise InvalidConfig("assignment outputs fall outside the output cardinalities")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def output(self, inputs) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.table[self.scenario.input_index(inputs)])

    def output_tensor(self) -> np.ndarray:
        """Outputs with shape input_cards + (n_parties,)."""
        return self.table.reshape(self.scenario.input_cards + (self.scenario.n_parties,))

    def output_indices(self) -> np.ndarray:
        """Flat joint-output index per joint input."""
        return flat_indices(self.table, self.scenario.output_cards)

    def rows(self) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        for inputs, outputs in zip(self.scenario.joint_inputs(), self.table):
            yield tuple(int(v) for v in inputs), tuple(int(v) for v in outputs)

    @property
    def key(self) -> bytes:
        return self.table.tobytes()

    def __eq__(self, other):
        if not isinstance(other, DeterministicAssignment):
            return NotImplemented
        return self.scenario == other.scenario and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.scenario, self.key))

    def check_scenario(self, scenario: Scenario) -> None:
        if scenario != self.scenario:
            raise ScenarioMismatch(f"assignment is on {self.scenario}, expected {scenario}")


@dataclass(frozen=True)
class SignalingGraph:
    """Edge (i, j) iff party j's output depends on party i's input."""
    n_parties: int
    edges: FrozenSet[Tuple[int, int]]

    def edge_list(self):
        return format_edges(self.edges)


class AssignmentKind(str, Enum):
    LOCAL = "Local"
    ORDERED = "Ordered"
    CYCLIC = "Cyclic"


@dataclass(frozen=True)
class AssignmentClass:
    """
    Attributes:
        kind: Local, Ordered or Cyclic
        compatible_orders: topological sorts of the signaling graph (lexicographic)
        truncated: True when compatible_orders was cut short
    """
    kind: AssignmentKind
    compatible_orders: Tuple[Ordering, ...]
    truncated: bool = False

    def describe_orders(self):
        return [str(o) for o in self.compatible_orders]
