from .behavior_service import BehaviorService
from .assignment_service import AssignmentService
from .decomposition_service import DecompositionService
from .experiment_service import ExperimentService
from .demo_service import DemoService, DemoOutcome

__all__ = [
    "BehaviorService",
    "AssignmentService",
    "DecompositionService",
    "ExperimentService",
    "DemoService",
    "DemoOutcome",
]
