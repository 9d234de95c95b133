from .behavior_model import (
    Scenario,
    Behavior,
    BellFunctional,
    ValidationReport,
    SignalingWitness,
    NoSignalingReport,
)
from .ordering_model import Ordering
from .assignment_model import (
    DeterministicAssignment,
    SignalingGraph,
    AssignmentKind,
    AssignmentClass,
)
from .decomposition_model import ChainFactors, DecompositionTerm, Decomposition
from .repository_model import (
    ModeKind,
    RepositoryMode,
    ContextKey,
    Repository,
    RoundAssignment,
    ViolationKind,
    FreeChoiceViolation,
    PolicyKind,
    ResolutionPolicy,
    QueryResult,
)
from .experiment_model import (
    TimingKind,
    TimingSpec,
    AgentSpec,
    ExperimentConfig,
    RoundLog,
    IndependenceTest,
    EmpiricalEstimate,
    ViolationStats,
    StatsReport,
)


__all__ = [
    "Scenario",
    "Behavior",
    "BellFunctional",
    "ValidationReport",
    "SignalingWitness",
    "NoSignalingReport",
    "Ordering",
    "DeterministicAssignment",
    "SignalingGraph",
    "AssignmentKind",
    "AssignmentClass",
    "ChainFactors",
    "DecompositionTerm",
    "Decomposition",
    "ModeKind",
    "RepositoryMode",
    "ContextKey",
    "Repository",
    "RoundAssignment",
    "ViolationKind",
    "FreeChoiceViolation",
    "PolicyKind",
    "ResolutionPolicy",
    "QueryResult",
    "TimingKind",
    "TimingSpec",
    "AgentSpec",
    "ExperimentConfig",
    "RoundLog",
    "IndependenceTest",
    "EmpiricalEstimate",
    "ViolationStats",
    "StatsReport",
]
