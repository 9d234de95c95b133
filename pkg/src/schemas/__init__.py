from .behavior_schema import ScenarioFieldsSchema, BehaviorSchema
from .assignment_schema import AssignmentSchema, TermSchema, DecompositionSchema
from .repository_schema import RepositoryDumpSchema
from .experiment_schema import TimingSchema, AgentSchema, ExperimentConfigSchema, RoundLogSchema

__all__ = [
    "ScenarioFieldsSchema",
    "BehaviorSchema",
    "AssignmentSchema",
    "TermSchema",
    "DecompositionSchema",
    "RepositoryDumpSchema",
    "TimingSchema",
    "AgentSchema",
    "ExperimentConfigSchema",
    "RoundLogSchema",
]
