"""
File Repository

Reads and writes the toolkit's file formats: behaviors, assignments,
decompositions and repository dumps as JSON, round logs as JSON lines and
statistics as CSV. Every JSON document is validated by its marshmallow schema;
failures surface as FileFormatError with the position when known.
"""
import os
import json
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from marshmallow import Schema, ValidationError

from config import setup_logger
from models import (Scenario, Behavior, DeterministicAssignment, Decomposition,
                    DecompositionTerm, Ordering, Repository, RoundLog, StatsReport, AgentSpec,
                    TimingSpec, TimingKind, ExperimentConfig, RepositoryMode, ModeKind,
                    PolicyKind)
from schemas import (BehaviorSchema, AssignmentSchema, DecompositionSchema,
                     RepositoryDumpSchema, ExperimentConfigSchema, RoundLogSchema)
from utils import FileFormatError, InvalidConfig, flat_indices, party_index, party_label


logger = setup_logger(name="FileRepository")


class FileRepository:
    """JSON / JSON-lines / CSV storage for the toolkit's objects."""

    # ── Plain conversions ───────────────────────────────

    @staticmethod
    def _scenario_fields(scenario: Scenario) -> Dict:
        return {
            "parties": scenario.n_parties,
            "inputs": list(scenario.input_cards),
            "outputs": list(scenario.output_cards),
        }

    @staticmethod
    def _scenario_from(data: Dict) -> Scenario:
        return Scenario(data["parties"], tuple(data["inputs"]), tuple(data["outputs"]))

    @staticmethod
    def _rows(assignment: DeterministicAssignment) -> List:
        return [[list(x), list(a)] for x, a in assignment.rows()]

    @staticmethod
    def _assignment_from_rows(scenario: Scenario, rows: List) -> DeterministicAssignment:
        inputs = np.array([r[0] for r in rows], dtype=np.int64).reshape(-1, scenario.n_parties)
        outputs = np.array([r[1] for r in rows], dtype=np.int64).reshape(-1, scenario.n_parties)
        if len(inputs) != scenario.n_joint_inputs:
            raise InvalidConfig(f"expected {scenario.n_joint_inputs} rows, got {len(inputs)}")
        if (inputs < 0).any() or (inputs >= np.asarray(scenario.input_cards)).any():
            raise InvalidConfig("row inputs fall outside the input cardinalities")
        index = flat_indices(inputs, scenario.input_cards)
        if len(set(index.tolist())) != len(index):
            raise InvalidConfig("a joint input appears twice")
        table = np.empty_like(outputs)
        table[index] = outputs
        return DeterministicAssignment(scenario, table)

    @staticmethod
    def behavior_to_dict(behavior: Behavior) -> Dict:
        return {**FileRepository._scenario_fields(behavior.scenario),
                "probs": behavior.probs.ravel().tolist()}

    @staticmethod
    def behavior_from_dict(data: Dict) -> Behavior:
        data = FileRepository._validated(BehaviorSchema(), data)
        return Behavior(FileRepository._scenario_from(data), np.array(data["probs"]))

    @staticmethod
    def assignment_to_dict(assignment: DeterministicAssignment) -> Dict:
        return {**FileRepository._scenario_fields(assignment.scenario),
                "table": FileRepository._rows(assignment)}

    @staticmethod
    def assignment_from_dict(data: Dict) -> DeterministicAssignment:
        data = FileRepository._validated(AssignmentSchema(), data)
        scenario = FileRepository._scenario_from(data)
        return FileRepository._assignment_from_rows(scenario, data["table"])

    @staticmethod
    def decomposition_to_dict(decomposition: Decomposition) -> Dict:
        return {
            **FileRepository._scenario_fields(decomposition.scenario),
            "order": [party_label(p) for p in decomposition.order],
            "terms": [
                {"weight": t.weight, "table": FileRepository._rows(t.assignment)}
                for t in decomposition.terms
            ],
        }

    @staticmethod
    def decomposition_from_dict(data: Dict) -> Decomposition:
        data = FileRepository._validated(DecompositionSchema(), data)
        scenario = FileRepository._scenario_from(data)
        order = Ordering(tuple(party_index(p) for p in data["order"]))
        terms = tuple(
            DecompositionTerm(t["weight"], FileRepository._assignment_from_rows(scenario, t["table"]))
            for t in data["terms"]
        )
        return Decomposition(order, terms)

    @staticmethod
    def repository_dump(repo: Repository) -> Dict:
        """Audit view: seed, mode, behavior and every stored decomposition."""
        dump = {
            "seed": repo.seed,
            "mode": repo.mode.kind.value,
            "behavior": FileRepository.behavior_to_dict(repo.behavior),
            "assignment": None,
            "order": None,
            "decompositions": [
                FileRepository.decomposition_to_dict(repo.decompositions[o]) for o in repo.orders
            ],
        }
        if repo.mode.assignment is not None:
            dump["assignment"] = FileRepository.assignment_to_dict(repo.mode.assignment)
        if repo.mode.order is not None:
            dump["order"] = [party_label(p) for p in repo.mode.order]
        FileRepository._validated(RepositoryDumpSchema(), dump)
        return dump

    @staticmethod
    def log_to_dict(log: RoundLog) -> Dict:
        return {
            "round_id": log.round_id,
            "timestamps": list(log.timestamps),
            "ordering": [party_label(p) for p in log.ordering],
            "inputs": list(log.inputs),
            "nominal_inputs": list(log.nominal_inputs),
            "forced": list(log.forced),
            "outcomes": list(log.outcomes),
            "order_index": log.order_index,
            "term_index": log.term_index,
            "aborted": log.aborted,
            "violation": log.violation,
        }

    @staticmethod
    def log_from_dict(data: Dict) -> RoundLog:
        data = FileRepository._validated(RoundLogSchema(), data)
        return RoundLog(
            round_id=data["round_id"],
            timestamps=tuple(data["timestamps"]),
            ordering=tuple(party_index(p) for p in data["ordering"]),
            inputs=tuple(data["inputs"]),
            nominal_inputs=tuple(data["nominal_inputs"]),
            forced=tuple(data["forced"]),
            outcomes=tuple(data["outcomes"]),
            order_index=data["order_index"],
            term_index=data["term_index"],
            aborted=data["aborted"],
            violation=data["violation"],
        )

    # ── Files ───────────────────────────────────────────

    @staticmethod
    def _validated(schema: Schema, data, path: Optional[str] = None) -> Dict:
        try:
            return schema.load(data)
        except ValidationError as e:
            raise FileFormatError(f"invalid document: {e.messages}", path=path) from e

    @staticmethod
    def _read_json(path: str):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except FileNotFoundError as e:
            raise FileFormatError("file not found", path=path) from e
        except json.JSONDecodeError as e:
            raise FileFormatError(e.msg, path=path, line=e.lineno, column=e.colno) from e

    @staticmethod
    def dumps(data) -> str:
        return json.dumps(data, indent=2)

    @staticmethod
    def _write_json(path: str, data) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(FileRepository.dumps(data))
            f.write("\n")

    @staticmethod
    def _load(path: str, schema: Schema, convert):
        data = FileRepository._read_json(path)
        FileRepository._validated(schema, data, path)
        try:
            return convert(data)
        except FileFormatError:
            raise
        except ValueError as e:
            raise FileFormatError(str(e), path=path) from e

    def read_behavior(self, path: str) -> Behavior:
        return self._load(path, BehaviorSchema(), self.behavior_from_dict)

    def write_behavior(self, behavior: Behavior, path: str) -> None:
        self._write_json(path, self.behavior_to_dict(behavior))
        logger.info(f"Wrote behavior to {path}")

    def read_assignment(self, path: str) -> DeterministicAssignment:
        return self._load(path, AssignmentSchema(), self.assignment_from_dict)

    def write_assignment(self, assignment: DeterministicAssignment, path: str) -> None:
        self._write_json(path, self.assignment_to_dict(assignment))

    def read_decomposition(self, path: str) -> Decomposition:
        return self._load(path, DecompositionSchema(), self.decomposition_from_dict)

    def write_decomposition(self, decomposition: Decomposition, path: str) -> None:
        self._write_json(path, self.decomposition_to_dict(decomposition))
        logger.info(f"Wrote {len(decomposition)}-term decomposition along {decomposition.order} to {path}")

    def write_repository_dump(self, repo: Repository, path: str) -> None:
        self._write_json(path, self.repository_dump(repo))
        logger.info(f"Wrote repository dump to {path}")

    def write_logs(self, logs: List[RoundLog], path: str) -> None:
        """JSON lines, one round per line, keys sorted."""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            for log in logs:
                f.write(json.dumps(self.log_to_dict(log), sort_keys=True))
                f.write("\n")
        logger.info(f"Wrote {len(logs)} round logs to {path}")

    def read_logs(self, path: str) -> List[RoundLog]:
        logs = []
        try:
            with open(path, 'r', encoding='utf-8') as f:
                for number, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    try:
                        data = json.loads(line)
                    except json.JSONDecodeError as e:
                        raise FileFormatError(e.msg, path=path, line=number, column=e.colno) from e
                    try:
                        logs.append(self.log_from_dict(data))
                    except FileFormatError as e:
                        raise FileFormatError(str(e), path=path, line=number) from e
        except FileNotFoundError as e:
            raise FileFormatError("file not found", path=path) from e
        return logs

    @staticmethod
    def stats_frame(report: StatsReport) -> pd.DataFrame:
        """One row per metric: name, value, stderr, p_value, dof."""
        rows = [
            {"name": "rounds", "value": report.rounds},
            {"name": "completed", "value": report.completed},
            {"name": "insufficient_data", "value": int(report.insufficient_data)},
        ]
        if report.chsh is not None:
            rows.append({"name": "chsh", "value": report.chsh, "stderr": report.chsh_stderr})
        if report.empirical is not None:
            rows.append({"name": "empirical_flagged", "value": int(report.empirical.flagged)})
        stats = report.violations
        rows.append({"name": "violation_rate", "value": stats.violation_rate})
        rows.append({"name": "abort_rate", "value": stats.abort_rate})
        for party, rate in sorted(stats.forced_rate.items()):
            rows.append({"name": f"forced_rate:{party_label(party)}", "value": rate})
        for party, rate in sorted(stats.override_rate.items()):
            rows.append({"name": f"override_rate:{party_label(party)}", "value": rate})
        rows.append({"name": "forced_mutual_information_bits",
                     "value": stats.forced_mutual_information})
        for test in report.independence:
            rows.append({"name": f"chi2:{test.lhs}|{test.rhs}", "value": test.chi2,
                         "p_value": test.p_value, "dof": test.dof})
        return pd.DataFrame(rows, columns=["name", "value", "stderr", "p_value", "dof"])

    def write_stats(self, report: StatsReport, path: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self.stats_frame(report).to_csv(path, index=False)
        logger.info(f"Wrote statistics to {path}")

    # ── Experiment configuration ────────────────────────

    def _resolve(self, value, base_dir: str, reader, from_dict):
        if isinstance(value, str):
            path = value if os.path.isabs(value) else os.path.join(base_dir, value)
            return reader(path)
        if isinstance(value, dict):
            return from_dict(value)
        raise InvalidConfig("expected a file path or an inline object")

    def read_experiment_config(self, path: str, seed: Optional[int] = None,
                               rounds: Optional[int] = None,
                               workers: Optional[int] = None) -> Tuple[ExperimentConfig, bool]:
        """
        Load a simulation config; command-line values override the file.

        Returns:
            (config, seed_defaulted)
        """
        raw = self._read_json(path)
        data = self._validated(ExperimentConfigSchema(), raw, path)
        base_dir = os.path.dirname(os.path.abspath(path))
        try:
            behavior = self._resolve(data["behavior"], base_dir, self.read_behavior,
                                     self.behavior_from_dict)
            mode_kind = ModeKind(data["mode"])
            if mode_kind == ModeKind.NAIVE_ASSIGNMENT:
                assignment = self._resolve(data["assignment"], base_dir, self.read_assignment,
                                           self.assignment_from_dict)
                mode = RepositoryMode.naive_assignment(assignment)
            elif mode_kind == ModeKind.NAIVE_DECOMPOSITION:
                mode = RepositoryMode.naive_decomposition(
                    Ordering.parse(data["order"], behavior.scenario.n_parties))
            else:
                mode = RepositoryMode.upgraded()
            agents = self._agents(data["agents"], behavior.scenario)
            chosen_seed = seed if seed is not None else data["seed"]
            config = ExperimentConfig(
                behavior=behavior,
                agents=agents,
                rounds=rounds if rounds is not None else data["rounds"],
                mode=mode,
                policy=PolicyKind(data["policy"]),
                seed=chosen_seed if chosen_seed is not None else 0,
                workers=workers if workers is not None else data["workers"],
            )
        except FileFormatError:
            raise
        except (InvalidConfig, ValueError) as e:
            raise FileFormatError(str(e), path=path) from e
        return config, chosen_seed is None

    @staticmethod
    def _agents(entries: List[Dict], scenario: Scenario) -> Tuple[AgentSpec, ...]:
        specs = {}
        for entry in entries:
            party = party_index(entry["party"])
            if party >= scenario.n_parties or party in specs:
                raise InvalidConfig(f"agent '{entry['party']}' is unknown or listed twice")
            m = scenario.input_cards[party]
            dist = entry.get("input_dist") or [1.0 / m] * m
            timing = entry.get("timing") or {}
            if timing.get("kind", "uniform") == TimingKind.FIXED.value:
                spec = TimingSpec.fixed(timing["t"])
            else:
                spec = TimingSpec.uniform(timing.get("t_min", 0.0), timing.get("t_max", 1.0))
            specs[party] = AgentSpec(party, tuple(dist), spec)
        for party in range(scenario.n_parties):
            if party not in specs:
                m = scenario.input_cards[party]
                specs[party] = AgentSpec(party, (1.0 / m,) * m, TimingSpec.uniform(0.0, 1.0))
        return tuple(specs[p] for p in range(scenario.n_parties))
