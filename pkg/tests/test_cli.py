import json

import pandas as pd
import pytest
from click.testing import CliRunner

from repositories import FileRepository
from run import cli, EXIT_FAIL, EXIT_OK, EXIT_USAGE


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def files():
    return FileRepository()


@pytest.fixture
def pr_file(files, tmp_path, pr_box):
    path = str(tmp_path / "pr.json")
    files.write_behavior(pr_box, path)
    return path


@pytest.fixture
def signaling_file(files, tmp_path, signaling_behavior):
    path = str(tmp_path / "signaling.json")
    files.write_behavior(signaling_behavior, path)
    return path


class TestGen:

    def test_pr_box(self, runner, tmp_path):
        out = str(tmp_path / "pr.json")
        result = runner.invoke(cli, ["gen", "pr", "--out", out])
        assert result.exit_code == EXIT_OK
        assert "S = 4" in result.output
        assert json.loads((tmp_path / "pr.json").read_text())["parties"] == 2

    def test_tsirelson(self, runner, tmp_path):
        result = runner.invoke(cli, ["gen", "tsirelson", "-o", str(tmp_path / "t.json")])
        assert "S = 2.828427125" in result.output

    def test_default_file_name(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = runner.invoke(cli, ["gen", "noise"])
            assert result.exit_code == EXIT_OK
            assert "wrote noise.json" in result.output
            assert "S = 0" in result.output

    def test_singlet_angles(self, runner, tmp_path):
        out = str(tmp_path / "s.json")
        result = runner.invoke(cli, ["gen", "singlet", "--angles", "0,0,0,0", "--out", out])
        assert result.exit_code == EXIT_OK
        # every correlator is -1 at equal angles
        assert "S = -2" in result.output

    def test_random_behavior_is_seeded(self, runner, files, tmp_path):
        paths = [str(tmp_path / name) for name in ("r1.json", "r2.json", "r3.json")]
        runner.invoke(cli, ["gen", "random", "--seed", "4", "--out", paths[0]])
        runner.invoke(cli, ["gen", "random", "--seed", "4", "--out", paths[1]])
        result = runner.invoke(cli, ["gen", "random", "--parties", "3", "--out", paths[2]])
        assert "no --seed given, using seed 0" in result.output
        first, second = files.read_behavior(paths[0]), files.read_behavior(paths[1])
        assert (first.probs == second.probs).all()
        assert files.read_behavior(paths[2]).scenario.n_parties == 3
        assert runner.invoke(cli, ["check", paths[0], "no-signaling"]).exit_code == EXIT_OK

    def test_bad_angles(self, runner, tmp_path):
        result = runner.invoke(cli, ["gen", "singlet", "--angles", "0,1",
                                     "--out", str(tmp_path / "s.json")])
        assert result.exit_code == EXIT_USAGE
        assert "error:" in result.output

    def test_assignment_needs_a_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["gen", "assignment", "--out", str(tmp_path / "a.json")])
        assert result.exit_code == EXIT_USAGE

    def test_from_assignment(self, runner, files, tmp_path, signaling_table):
        source = str(tmp_path / "table.json")
        files.write_assignment(signaling_table, source)
        result = runner.invoke(cli, ["gen", "assignment", "--file", source,
                                     "--out", str(tmp_path / "b.json")])
        assert result.exit_code == EXIT_OK
        assert "S = 4" in result.output


class TestCheck:

    def test_no_signaling_passes(self, runner, pr_file):
        result = runner.invoke(cli, ["check", pr_file, "no-signaling"])
        assert result.exit_code == EXIT_OK
        assert "no-signaling: PASS" in result.output

    def test_no_signaling_fails_with_a_witness(self, runner, signaling_file):
        result = runner.invoke(cli, ["check", signaling_file, "no-signaling"])
        assert result.exit_code == EXIT_FAIL
        assert "no-signaling: FAIL" in result.output
        assert "A's input" in result.output

    def test_local_polytope(self, runner, pr_file, files, tmp_path, noise):
        result = runner.invoke(cli, ["check", pr_file, "local-2222"])
        assert result.exit_code == EXIT_FAIL
        assert "> 2" in result.output
        noise_file = str(tmp_path / "noise.json")
        files.write_behavior(noise, noise_file)
        assert runner.invoke(cli, ["check", noise_file, "local-2222"]).exit_code == EXIT_OK

    def test_ordered(self, runner, signaling_file):
        along = runner.invoke(cli, ["check", signaling_file, "ordered", "--order", "A,B"])
        against = runner.invoke(cli, ["check", signaling_file, "ordered", "--order", "B,A"])
        assert along.exit_code == EXIT_OK
        assert against.exit_code == EXIT_FAIL

    def test_ordered_needs_an_order(self, runner, pr_file):
        result = runner.invoke(cli, ["check", pr_file, "ordered"])
        assert result.exit_code == EXIT_USAGE

    def test_malformed_file(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"parties": 2,', encoding="utf-8")
        result = runner.invoke(cli, ["check", str(path), "normalized"])
        assert result.exit_code == EXIT_USAGE
        assert "broken.json:1:" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["check", str(tmp_path / "absent.json"), "normalized"])
        assert result.exit_code == EXIT_USAGE


class TestAssignments:

    def test_classify(self, runner, files, tmp_path, signaling_table, cyclic_table):
        ordered = str(tmp_path / "ordered.json")
        cyclic = str(tmp_path / "cyclic.json")
        files.write_assignment(signaling_table, ordered)
        files.write_assignment(cyclic_table, cyclic)

        result = runner.invoke(cli, ["classify", ordered])
        assert result.exit_code == EXIT_OK
        assert "kind: Ordered" in result.output
        assert "edges: A->B" in result.output
        assert "compatible orders: A,B" in result.output

        result = runner.invoke(cli, ["classify", cyclic])
        assert "kind: Cyclic" in result.output
        assert "compatible orders: none" in result.output

    def test_decompose_to_stdout(self, runner, pr_file):
        result = runner.invoke(cli, ["decompose", pr_file, "--order", "A,B"])
        assert result.exit_code == EXIT_OK
        data = json.loads(result.stdout)
        assert data["order"] == ["A", "B"]
        assert [t["weight"] for t in data["terms"]] == pytest.approx([0.25] * 4)

    def test_decompose_to_file(self, runner, files, pr_file, tmp_path):
        out = str(tmp_path / "pr_ba.json")
        result = runner.invoke(cli, ["decompose", pr_file, "--order", "B,A", "--out", out])
        assert "4 terms along B,A" in result.output
        assert len(files.read_decomposition(out)) == 4

    def test_decompose_signaling_needs_one_way(self, runner, signaling_file):
        refused = runner.invoke(cli, ["decompose", signaling_file, "--order", "A,B"])
        assert refused.exit_code == EXIT_USAGE
        accepted = runner.invoke(cli, ["decompose", signaling_file, "--order", "A,B",
                                       "--one-way"])
        assert accepted.exit_code == EXIT_OK

    def test_bad_order(self, runner, pr_file):
        result = runner.invoke(cli, ["decompose", pr_file, "--order", "A,A"])
        assert result.exit_code == EXIT_USAGE


class TestRepositoryAndSimulation:

    def test_repository_dump(self, runner, pr_file, tmp_path):
        out = tmp_path / "repo.json"
        result = runner.invoke(cli, ["repository", pr_file, "--seed", "7", "--out", str(out)])
        assert result.exit_code == EXIT_OK
        assert "2 stored decompositions" in result.output
        dump = json.loads(out.read_text())
        assert dump["seed"] == 7 and dump["mode"] == "upgraded"

    def test_repository_seed_notice(self, runner, pr_file, tmp_path):
        result = runner.invoke(cli, ["repository", pr_file, "--mode", "naive-decomposition",
                                     "--order", "B,A", "--out", str(tmp_path / "r.json")])
        assert "no --seed given, using seed 0" in result.output
        assert "1 stored decompositions" in result.output

    def test_simulate(self, runner, files, tmp_path, tsirelson):
        files.write_behavior(tsirelson, str(tmp_path / "tsirelson.json"))
        config = tmp_path / "sim.json"
        config.write_text(json.dumps({"behavior": "tsirelson.json", "rounds": 2000}),
                          encoding="utf-8")
        out = tmp_path / "results"
        result = runner.invoke(cli, ["simulate", "--config", str(config), "--seed", "3",
                                     "--out", str(out)])
        assert result.exit_code == EXIT_OK
        assert "rounds: 2000, completed: 2000, violation rate: 0" in result.output
        assert "no --seed given" not in result.output
        assert len(files.read_logs(str(out / "logs.jsonl"))) == 2000
        stats = pd.read_csv(out / "stats.csv")
        assert stats.loc[stats["name"] == "rounds", "value"].item() == 2000

    def test_simulate_is_reproducible(self, runner, files, tmp_path, pr_box):
        files.write_behavior(pr_box, str(tmp_path / "pr.json"))
        config = tmp_path / "sim.json"
        config.write_text(json.dumps({"behavior": "pr.json", "rounds": 500, "seed": 11}),
                          encoding="utf-8")
        for name in ("one", "two"):
            runner.invoke(cli, ["simulate", "--config", str(config),
                                "--out", str(tmp_path / name)])
        first = (tmp_path / "one" / "logs.jsonl").read_bytes()
        assert first == (tmp_path / "two" / "logs.jsonl").read_bytes()

    def test_demo_with_no_rounds(self, runner):
        result = runner.invoke(cli, ["demo", "upgraded-fix", "--rounds", "0"])
        assert result.exit_code == EXIT_OK
        assert "no --seed given, using seed 0" in result.output
        assert "insufficient data" in result.output

    def test_help(self, runner):
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == EXIT_OK
        for command in ("gen", "check", "classify", "decompose", "repository", "simulate",
                        "demo"):
            assert command in result.output
