import json

import numpy as np
import pytest

from models import (ExperimentConfig, ModeKind, Ordering, PolicyKind, RepositoryMode, TimingKind)
from repositories import FileRepository, OnticRepository
from services import DecompositionService, ExperimentService
from utils import FileFormatError


AB = Ordering((0, 1))


@pytest.fixture
def files():
    return FileRepository()


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestDocuments:

    def test_behavior_round_trip(self, files, tmp_path, tsirelson):
        path = str(tmp_path / "tsirelson.json")
        files.write_behavior(tsirelson, path)
        loaded = files.read_behavior(path)
        assert loaded.scenario == tsirelson.scenario
        np.testing.assert_allclose(loaded.probs, tsirelson.probs, atol=0)

    def test_behavior_layout(self, pr_box):
        data = FileRepository.behavior_to_dict(pr_box)
        assert (data["parties"], data["inputs"], data["outputs"]) == (2, [2, 2], [2, 2])
        assert data["probs"][:4] == [0.5, 0.0, 0.0, 0.5]

    def test_assignment_round_trip(self, files, tmp_path, cyclic_table):
        path = str(tmp_path / "cyclic.json")
        files.write_assignment(cyclic_table, path)
        assert files.read_assignment(path) == cyclic_table

    def test_assignment_rows_in_any_order(self, files, tmp_path, signaling_table):
        data = FileRepository.assignment_to_dict(signaling_table)
        data["table"].reverse()
        assert files.read_assignment(write_json(tmp_path / "rev.json", data)) == signaling_table

    def test_decomposition_round_trip(self, files, tmp_path, pr_box):
        decomposition = DecompositionService.decompose_ordered(pr_box, AB)
        path = str(tmp_path / "nested" / "pr_ab.json")
        files.write_decomposition(decomposition, path)
        loaded = files.read_decomposition(path)
        assert loaded.order == AB
        assert [t.assignment for t in loaded.terms] == [t.assignment for t in decomposition.terms]
        np.testing.assert_allclose(loaded.weights(), decomposition.weights())
        assert FileRepository.decomposition_to_dict(loaded)["order"] == ["A", "B"]

    def test_repository_dump_naive_assignment(self, signaling_behavior, signaling_table):
        repo = OnticRepository.build_repository(
            signaling_behavior, RepositoryMode.naive_assignment(signaling_table), seed=4)
        dump = FileRepository.repository_dump(repo)
        assert dump["mode"] == "naive-assignment" and dump["seed"] == 4
        assert dump["decompositions"] == []
        assert dump["assignment"] == FileRepository.assignment_to_dict(signaling_table)

    def test_repository_dump_upgraded(self, pr_box):
        repo = OnticRepository.build_repository(pr_box, RepositoryMode.upgraded())
        dump = FileRepository.repository_dump(repo)
        assert [d["order"] for d in dump["decompositions"]] == [["A", "B"], ["B", "A"]]
        assert dump["assignment"] is None and dump["order"] is None


class TestMalformedFiles:

    def test_bad_json_reports_position(self, files, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "parties": 2,\n  "inputs": [2, 2\n}', encoding="utf-8")
        with pytest.raises(FileFormatError) as excinfo:
            files.read_behavior(str(path))
        assert excinfo.value.line == 4
        assert str(path) in str(excinfo.value)

    def test_wrong_probability_count(self, files, tmp_path, pr_box):
        data = FileRepository.behavior_to_dict(pr_box)
        data["probs"] = data["probs"][:-1]
        with pytest.raises(FileFormatError) as excinfo:
            files.read_behavior(write_json(tmp_path / "short.json", data))
        assert "probs" in str(excinfo.value)

    def test_missing_row(self, files, tmp_path, signaling_table):
        data = FileRepository.assignment_to_dict(signaling_table)
        data["table"] = data["table"][:3]
        with pytest.raises(FileFormatError):
            files.read_assignment(write_json(tmp_path / "rows.json", data))

    def test_missing_file(self, files, tmp_path):
        with pytest.raises(FileFormatError):
            files.read_behavior(str(tmp_path / "absent.json"))


class TestLogsAndStats:

    @pytest.fixture
    def experiment(self, tsirelson, uniform_agents):
        config = ExperimentConfig(tsirelson, uniform_agents, 300, RepositoryMode.upgraded(),
                                  seed=9)
        return ExperimentService.run_experiment(config)

    def test_logs_round_trip(self, files, tmp_path, experiment):
        logs, _ = experiment
        path = str(tmp_path / "logs.jsonl")
        files.write_logs(logs, path)
        assert files.read_logs(path) == logs

    def test_bad_log_line_reports_its_number(self, files, tmp_path, experiment):
        logs, _ = experiment
        path = tmp_path / "logs.jsonl"
        files.write_logs(logs[:3], str(path))
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[1] = lines[1].replace('"round_id"', '"round"')
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(FileFormatError) as excinfo:
            files.read_logs(str(path))
        assert excinfo.value.line == 2

    def test_stats_frame(self, files, tmp_path, experiment):
        _, report = experiment
        frame = FileRepository.stats_frame(report)
        assert list(frame.columns) == ["name", "value", "stderr", "p_value", "dof"]
        names = frame["name"].tolist()
        assert names[:3] == ["rounds", "completed", "insufficient_data"]
        assert "chsh" in names
        assert "chi2:inputs|lambda" in names and "chi2:inputs|ordering" in names
        path = tmp_path / "stats.csv"
        files.write_stats(report, str(path))
        assert path.read_text(encoding="utf-8").startswith("name,value,stderr,p_value,dof")


class TestExperimentConfig:

    def test_inline_behavior(self, files, tmp_path, pr_box):
        path = write_json(tmp_path / "sim.json", {
            "behavior": FileRepository.behavior_to_dict(pr_box),
            "rounds": 50,
            "agents": [{"party": "B", "timing": {"kind": "fixed", "t": 0.0}}],
        })
        config, seed_defaulted = files.read_experiment_config(path)
        assert seed_defaulted and config.seed == 0
        assert config.rounds == 50 and config.workers == 1
        assert config.mode.kind == ModeKind.UPGRADED
        assert config.policy == PolicyKind.FORCE
        assert config.agents[1].timing.kind == TimingKind.FIXED
        assert config.agents[0].input_dist == (0.5, 0.5)

    def test_command_line_overrides(self, files, tmp_path, pr_box):
        path = write_json(tmp_path / "sim.json", {
            "behavior": FileRepository.behavior_to_dict(pr_box), "seed": 3, "rounds": 10,
        })
        config, seed_defaulted = files.read_experiment_config(path, seed=8, rounds=20, workers=2)
        assert not seed_defaulted
        assert (config.seed, config.rounds, config.workers) == (8, 20, 2)

    def test_relative_paths(self, files, tmp_path, signaling_behavior, signaling_table):
        files.write_behavior(signaling_behavior, str(tmp_path / "data" / "behavior.json"))
        files.write_assignment(signaling_table, str(tmp_path / "data" / "table.json"))
        path = write_json(tmp_path / "sim.json", {
            "behavior": "data/behavior.json",
            "mode": "naive-assignment",
            "assignment": "data/table.json",
            "policy": "block",
            "seed": 5,
        })
        config, seed_defaulted = files.read_experiment_config(path)
        assert not seed_defaulted
        assert config.mode.assignment == signaling_table
        assert config.policy == PolicyKind.BLOCK

    def test_naive_decomposition_needs_an_order(self, files, tmp_path, pr_box):
        path = write_json(tmp_path / "sim.json", {
            "behavior": FileRepository.behavior_to_dict(pr_box), "mode": "naive-decomposition",
        })
        with pytest.raises(FileFormatError):
            files.read_experiment_config(path)

    def test_unknown_agent(self, files, tmp_path, pr_box):
        path = write_json(tmp_path / "sim.json", {
            "behavior": FileRepository.behavior_to_dict(pr_box), "agents": [{"party": "D"}],
        })
        with pytest.raises(FileFormatError):
            files.read_experiment_config(path)
