import os
import tempfile

os.environ.setdefault("ONTIC_LOG_DIR", os.path.join(tempfile.gettempdir(), "ontic_test_logs"))
os.environ.setdefault("ONTIC_LOG_LEVEL", "WARNING")

import numpy as np
import pytest

from config import A_TO_B_TABLE, B_TO_A_TABLE, CYCLIC_TABLE
from models import AgentSpec, TimingSpec
from services import AssignmentService, BehaviorService
from services.behavior_service import CHSH_SCENARIO


@pytest.fixture
def chsh_scenario():
    return CHSH_SCENARIO


@pytest.fixture
def pr_box():
    return BehaviorService.make_pr_box()


@pytest.fixture
def tsirelson():
    return BehaviorService.make_tsirelson()


@pytest.fixture
def noise():
    return BehaviorService.make_uniform_noise()


@pytest.fixture
def signaling_table():
    """a = 0, b = x*y: Bob's outcome carries Alice's input when y = 1."""
    return AssignmentService.assignment_from_rows(A_TO_B_TABLE)


@pytest.fixture
def reversed_table():
    return AssignmentService.assignment_from_rows(B_TO_A_TABLE)


@pytest.fixture
def cyclic_table():
    return AssignmentService.assignment_from_rows(CYCLIC_TABLE)


@pytest.fixture
def signaling_behavior(signaling_table):
    return BehaviorService.behavior_from_assignment(signaling_table)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def uniform_agents():
    return tuple(AgentSpec(p, (0.5, 0.5), TimingSpec.uniform(0.0, 1.0)) for p in range(2))


@pytest.fixture
def bob_first_agents():
    return (
        AgentSpec(0, (0.5, 0.5), TimingSpec.fixed(1.0)),
        AgentSpec(1, (0.5, 0.5), TimingSpec.fixed(0.0)),
    )
