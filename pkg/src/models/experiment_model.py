"""
Experiment Models

Dataclasses for agents, experiment configuration, round logs and statistics.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import NORM_TOL
from models.behavior_model import Behavior
from models.repository_model import PolicyKind, RepositoryMode
from utils import InvalidConfig


class TimingKind(str, Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class TimingSpec:
    """
    Distribution of an agent's measurement time.

    Attributes:
        kind: fixed or uniform
        t_min: the fixed time, or the lower end of the uniform window
        t_max: upper end of the uniform window (equals t_min when fixed)
    """
    kind: TimingKind
    t_min: float
    t_max: float

    def __post_init__(self):
        if self.t_min > self.t_max:
            raise InvalidConfig(f"t_min {self.t_min} exceeds t_max {self.t_max}")
        if self.kind == TimingKind.FIXED and self.t_min != self.t_max:
            raise InvalidConfig("fixed timing needs t_min == t_max")

    @classmethod
    def fixed(cls, t: float) -> "TimingSpec":
        return cls(TimingKind.FIXED, float(t), float(t))

    @classmethod
    def uniform(cls, t_min: float, t_max: float) -> "TimingSpec":
        return cls(TimingKind.UNIFORM, float(t_min), float(t_max))

    def sample(self, u: np.ndarray) -> np.ndarray:
        return self.t_min + np.asarray(u) * (self.t_max - self.t_min)


@dataclass(frozen=True)
class AgentSpec:
    """
    Attributes:
        party: party index
        input_dist: probability of each of the party's inputs
        timing: distribution of the measurement (outcome-production) time
    """
    party: int
    input_dist: Tuple[float, ...]
    timing: TimingSpec

    def __post_init__(self):
        dist = tuple(float(p) for p in self.input_dist)
        object.__setattr__(self, "input_dist", dist)
        if min(dist) < 0 or abs(sum(dist) - 1.0) > NORM_TOL:
            raise InvalidConfig(f"input distribution of party {self.party} must sum to 1: {dist}")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Attributes:
        behavior: behavior the repository is built for
        agents: one AgentSpec per party, in party order
        rounds: number of rounds
        mode: repository mode
        policy: what a query does when an outcome depends on an unchosen input
        seed: 64-bit seed of all keyed streams
        workers: number of parallel round workers (logs are identical for any value)
    """
    behavior: Behavior
    agents: Tuple[AgentSpec, ...]
    rounds: int
    mode: RepositoryMode
    policy: PolicyKind = PolicyKind.FORCE
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(sorted(self.agents, key=lambda a: a.party)))
        scenario = self.behavior.scenario
        if [a.party for a in self.agents] != list(range(scenario.n_parties)):
            raise InvalidConfig("exactly one agent per party is required")
        for agent in self.agents:
            if len(agent.input_dist) != scenario.input_cards[agent.party]:
                raise InvalidConfig(
                    f"party {agent.party} has {scenario.input_cards[agent.party]} inputs, "
                    f"input_dist has {len(agent.input_dist)} entries"
                )
        if self.rounds < 0:
            raise InvalidConfig(f"rounds must be non-negative, got {self.rounds}")
        if self.workers < 1:
            raise InvalidConfig(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class RoundLog:
    """
    One experimental round.

    Attributes:
        round_id: round number
        timestamps: measurement time per party
        ordering: parties sorted by time (ties to the lower index)
        inputs: input actually used per party (None after an abort)
        nominal_inputs: input each agent would have chosen freely
        forced: per party, whether the repository committed its input
        outcomes: output per party (None when not produced)
        order_index: which per-order decomposition was consulted
        term_index: which term was drawn (the hidden variable's identity)
        aborted: round aborted under the Block policy
        violation: at least one free-choice violation occurred
    """
    round_id: int
    timestamps: Tuple[float, ...]
    ordering: Tuple[int, ...]
    inputs: Tuple[Optional[int], ...]
    nominal_inputs: Tuple[int, ...]
    forced: Tuple[bool, ...]
    outcomes: Tuple[Optional[int], ...]
    order_index: int
    term_index: int
    aborted: bool = False
    violation: bool = False

    @property
    def any_forced(self) -> bool:
        return any(self.forced)


@dataclass(frozen=True)
class IndependenceTest:
    lhs: str
    rhs: str
    chi2: float
    dof: int
    p_value: float
    low_power: bool

    def passes(self, alpha: float) -> bool:
        return self.p_value > alpha


@dataclass(frozen=True)
class EmpiricalEstimate:
    """
    Frequency estimate of a behavior.

    Contexts never visited are filled with the uniform distribution and listed
    in `unvisited`; `flagged` is set when any context is missing or the
    estimate rests on a single round.
    """
    behavior: Behavior
    context_counts: Tuple[int, ...]
    unvisited: Tuple[int, ...]
    flagged: bool


@dataclass
class ViolationStats:
    violation_rate: float = 0.0
    abort_rate: float = 0.0
    forced_rate: Dict[int, float] = field(default_factory=dict)
    override_rate: Dict[int, float] = field(default_factory=dict)
    forced_mutual_information: float = 0.0


@dataclass
class StatsReport:
    """
    Aggregates over an experiment.

    Attributes:
        rounds: rounds simulated
        completed: rounds not aborted
        insufficient_data: nothing to estimate from
        empirical: frequency estimate over non-aborted, non-forced rounds
        chsh: CHSH estimate (2-party binary scenarios only)
        chsh_stderr: its standard error
        independence: chi-squared tests (inputs vs lambda, inputs vs ordering)
        violations: violation statistics
    """
    rounds: int
    completed: int
    insufficient_data: bool
    empirical: Optional[EmpiricalEstimate] = None
    chsh: Optional[float] = None
    chsh_stderr: Optional[float] = None
    independence: List[IndependenceTest] = field(default_factory=list)
    violations: ViolationStats = field(default_factory=ViolationStats)

    def test(self, lhs: str, rhs: str) -> Optional[IndependenceTest]:
        for t in self.independence:
            if t.lhs == lhs and t.rhs == rhs:
                return t
        return None
