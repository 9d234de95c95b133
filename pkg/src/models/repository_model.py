"""
Repository Models

The store of contextual assignments consulted once per round, and the
results of querying it.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

from models.assignment_model import DeterministicAssignment
from models.behavior_model import Behavior
from models.decomposition_model import Decomposition
from models.ordering_model import Ordering
from utils import InvalidConfig


class ModeKind(str, Enum):
    UPGRADED = "upgraded"
    NAIVE_ASSIGNMENT = "naive-assignment"
    NAIVE_DECOMPOSITION = "naive-decomposition"


@dataclass(frozen=True)
class RepositoryMode:
    """
    Upgraded: the context includes the time order; one decomposition per order.
    NaiveAssignment: one fixed assignment replayed every round.
    NaiveDecomposition: one fixed-order decomposition, actual order ignored.
    """
    kind: ModeKind
    assignment: Optional[DeterministicAssignment] = None
    order: Optional[Ordering] = None

    def __post_init__(self):
        if self.kind == ModeKind.NAIVE_ASSIGNMENT and self.assignment is None:
            raise InvalidConfig("naive-assignment mode needs an assignment")
        if self.kind == ModeKind.NAIVE_DECOMPOSITION and self.order is None:
            raise InvalidConfig("naive-decomposition mode needs an order")

    @classmethod
    def upgraded(cls) -> "RepositoryMode":
        return cls(ModeKind.UPGRADED)

    @classmethod
    def naive_assignment(cls, assignment: DeterministicAssignment) -> "RepositoryMode":
        return cls(ModeKind.NAIVE_ASSIGNMENT, assignment=assignment)

    @classmethod
    def naive_decomposition(cls, order: Ordering) -> "RepositoryMode":
        return cls(ModeKind.NAIVE_DECOMPOSITION, order=order)

    @property
    def is_naive(self) -> bool:
        return self.kind != ModeKind.UPGRADED


@dataclass(frozen=True)
class ContextKey:
    """Inputs known so far plus, in upgraded mode, the round's time order."""
    inputs: Tuple[Tuple[int, int], ...]
    order: Optional[Ordering] = None

    @classmethod
    def of(cls, inputs: Mapping[int, int], order: Optional[Ordering] = None) -> "ContextKey":
        return cls(tuple(sorted((int(p), int(v)) for p, v in inputs.items())), order)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.inputs)


@dataclass(frozen=True, eq=False)
class Repository:
    """
    Attributes:
        behavior: the behavior the stored assignments reproduce
        mode: how contexts are keyed
        seed: 64-bit seed of the keyed round streams
        decompositions: Ordering -> Decomposition (every order in upgraded mode,
                        the fixed order in naive-decomposition mode, none otherwise)
        orders: the keys of decompositions, lexicographic; the index is the
                stream slot of the order's term draw
    """
    behavior: Behavior
    mode: RepositoryMode
    seed: int
    decompositions: Mapping[Ordering, Decomposition] = field(default_factory=dict)
    orders: Tuple[Ordering, ...] = ()

    def order_index(self, order: Ordering) -> int:
        return self.orders.index(order)


@dataclass(frozen=True)
class RoundAssignment:
    """
    The assignment actualized in one round.

    term_index identifies the hidden variable: which term of which
    decomposition was drawn (0 in naive-assignment mode).
    """
    round_id: int
    assignment: DeterministicAssignment
    origin_order: Optional[Ordering]
    mode_kind: ModeKind
    order_index: int = 0
    term_index: int = 0


class ViolationKind(str, Enum):
    INPUT_REQUIRED = "InputRequired"
    INPUT_FORCED = "InputForced"


@dataclass(frozen=True)
class FreeChoiceViolation:
    """
    InputRequired: the outcome depends on `party`'s still unchosen input.
    InputForced: the repository committed `party`'s input to forced_value.
    """
    kind: ViolationKind
    party: int
    forced_value: Optional[int] = None


class PolicyKind(str, Enum):
    BLOCK = "block"
    FORCE = "force"


@dataclass(frozen=True)
class ResolutionPolicy:
    """Block aborts the round; Force commits unchosen inputs to presampled values."""
    kind: PolicyKind
    presampled_inputs: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def block(cls) -> "ResolutionPolicy":
        return cls(PolicyKind.BLOCK)

    @classmethod
    def force(cls, presampled_inputs: Mapping[int, int]) -> "ResolutionPolicy":
        return cls(PolicyKind.FORCE, tuple(sorted((int(p), int(v)) for p, v in presampled_inputs.items())))


@dataclass(frozen=True)
class QueryResult:
    outcome: Optional[int] = None
    violations: Tuple[FreeChoiceViolation, ...] = ()
    aborted: bool = False

    @property
    def is_violation(self) -> bool:
        return bool(self.violations)

    @property
    def forced_inputs(self) -> Dict[int, int]:
        return {
            v.party: v.forced_value for v in self.violations
            if v.kind == ViolationKind.INPUT_FORCED
        }
