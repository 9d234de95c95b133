"""
Demo Service

Two narrated runs of the CHSH scenario:

naive-signaling: the repository replays the Alice-to-Bob signaling table every
round while Bob measures first, so Bob's y = 1 queries need Alice's unchosen
input and the repository forces it.

upgraded-fix: the time order joins the context; the repository stores a PR-box
decomposition per order (it contains the signaling table for t_A <= t_B and
its reversed twin for t_A > t_B) and no input is ever forced.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import pandas as pd

from config import setup_logger, DemoConfig, A_TO_B_TABLE, B_TO_A_TABLE, INDEPENDENCE_ALPHA
from models import (AgentSpec, TimingSpec, ExperimentConfig, RepositoryMode, PolicyKind,
                    Ordering, RoundLog, StatsReport)
from repositories import OnticRepository
from services.assignment_service import AssignmentService
from services.behavior_service import BehaviorService
from services.experiment_service import ExperimentService
from utils import InvalidConfig


logger = setup_logger(name="DemoService")

DEMOS = ("naive-signaling", "upgraded-fix")


@dataclass
class DemoOutcome:
    """
    Attributes:
        name: demo name
        logs: round logs
        report: aggregated statistics
        tables: context tables shown alongside the statistics
        metrics: headline numbers of the narrative
    """
    name: str
    logs: List[RoundLog]
    report: StatsReport
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    metrics: Dict[str, Optional[float]] = field(default_factory=dict)


class DemoService:

    @staticmethod
    def run(name: str, rounds: Optional[int] = None, seed: int = 0,
            demo_config: Optional[DemoConfig] = None) -> DemoOutcome:
        demo_config = demo_config or DemoConfig()
        if rounds is not None:
            demo_config = replace(demo_config, rounds=rounds)
        if name == "naive-signaling":
            return DemoService.naive_signaling(demo_config, seed)
        if name == "upgraded-fix":
            return DemoService.upgraded_fix(demo_config, seed)
        raise InvalidConfig(f"unknown demo '{name}', choose from {', '.join(DEMOS)}")

    @staticmethod
    def naive_signaling(demo_config: DemoConfig, seed: int = 0) -> DemoOutcome:
        table = AssignmentService.assignment_from_rows(A_TO_B_TABLE)
        agents = (
            AgentSpec(0, demo_config.alice_input_dist, TimingSpec.fixed(demo_config.alice_time)),
            AgentSpec(1, demo_config.bob_input_dist, TimingSpec.fixed(demo_config.bob_time)),
        )
        config = ExperimentConfig(
            behavior=BehaviorService.behavior_from_assignment(table),
            agents=agents,
            rounds=demo_config.rounds,
            mode=RepositoryMode.naive_assignment(table),
            policy=PolicyKind.FORCE,
            seed=seed,
        )
        logs, report = ExperimentService.run_experiment(config)

        completed = [log for log in logs if not log.aborted]
        y_one = [log for log in completed if log.inputs[1] == 1]
        obeyed = sum(log.inputs[0] == log.outcomes[1] for log in y_one)
        outcome = DemoOutcome("naive-signaling", logs, report)
        outcome.tables["stored assignment (every round)"] = OnticRepository.context_table(table)
        outcome.metrics = {
            "forced rate (Alice)": report.violations.forced_rate.get(0, 0.0),
            "override rate (Alice)": report.violations.override_rate.get(0, 0.0),
            "y=1 rounds": float(len(y_one)),
            "Alice input = Bob outcome on y=1 rounds": obeyed / len(y_one) if y_one else None,
            "MI(Bob outcome; Alice input | y=1) [bits]": (
                ExperimentService.mutual_information(y_one, "output:B", "input:A")
                if y_one else None
            ),
        }
        logger.info(f"naive-signaling: forced rate {outcome.metrics['forced rate (Alice)']:.4f}")
        return outcome

    @staticmethod
    def upgraded_fix(demo_config: DemoConfig, seed: int = 0) -> DemoOutcome:
        window = demo_config.timing_window
        agents = (
            AgentSpec(0, demo_config.alice_input_dist, TimingSpec.uniform(0.0, window)),
            AgentSpec(1, demo_config.bob_input_dist, TimingSpec.uniform(0.0, window)),
        )
        config = ExperimentConfig(
            behavior=BehaviorService.make_pr_box(),
            agents=agents,
            rounds=demo_config.rounds,
            mode=RepositoryMode.upgraded(),
            policy=PolicyKind.FORCE,
            seed=seed,
        )
        repo = OnticRepository.build_repository(config.behavior, config.mode, seed)
        logs, report = ExperimentService.run_experiment(config, repo)

        outcome = DemoOutcome("upgraded-fix", logs, report)
        outcome.tables["upgraded table"] = OnticRepository.upgraded_context_table({
            Ordering((0, 1)): AssignmentService.assignment_from_rows(A_TO_B_TABLE),
            Ordering((1, 0)): AssignmentService.assignment_from_rows(B_TO_A_TABLE),
        })
        outcome.tables["stored in round 0"] = OnticRepository.round_context_table(repo, 0)
        outcome.metrics = {
            "violation rate": report.violations.violation_rate,
            "CHSH estimate": report.chsh,
            "CHSH stderr": report.chsh_stderr,
        }
        for test in report.independence:
            outcome.metrics[f"p-value {test.lhs} vs {test.rhs}"] = test.p_value
        return outcome

    @staticmethod
    def render(outcome: DemoOutcome, alpha: float = INDEPENDENCE_ALPHA) -> str:
        """Narrative text: tables first, then the measured numbers."""
        lines = [f"== {outcome.name} =="]
        for title, frame in outcome.tables.items():
            lines.append(f"-- {title}")
            lines.append(frame.to_string(index=False))
        report = outcome.report
        lines.append(f"rounds: {report.rounds}, completed: {report.completed}")
        if report.insufficient_data:
            lines.append("insufficient data: no completed rounds")
            return "\n".join(lines)
        for name, value in outcome.metrics.items():
            lines.append(f"{name}: {'n/a' if value is None else f'{value:.6g}'}")
        for test in report.independence:
            verdict = "independent" if test.passes(alpha) else "DEPENDENT"
            flag = " (low power)" if test.low_power else ""
            lines.append(
                f"chi2 {test.lhs} vs {test.rhs}: {test.chi2:.3f} on {test.dof} dof, "
                f"p = {test.p_value:.4f} -> {verdict} at alpha {alpha}{flag}"
            )
        return "\n".join(lines)
