from collections import Counter
from itertools import permutations

import numpy as np
import pytest

from config import TSIRELSON_BOUND
from models import AgentSpec, ExperimentConfig, Ordering, PolicyKind, RepositoryMode, TimingSpec
from repositories import FileRepository, OnticRepository
from services import AssignmentService, BehaviorService, DecompositionService, ExperimentService
from utils import InvalidConfig, UnknownSelector


AB = Ordering((0, 1))


def naive_signaling_config(signaling_behavior, signaling_table, agents, rounds,
                           policy=PolicyKind.FORCE, seed=0):
    return ExperimentConfig(signaling_behavior, agents, rounds,
                            RepositoryMode.naive_assignment(signaling_table), policy, seed)


def y_one_rounds(logs):
    return [log for log in logs if not log.aborted and log.inputs[1] == 1]


class TestOrdering:

    def test_ascending_time(self):
        assert ExperimentService.derive_ordering([0.7, 0.2]) == Ordering((1, 0))
        assert ExperimentService.derive_ordering([0.3, 0.1, 0.9]) == Ordering((1, 0, 2))

    def test_ties_go_to_the_lower_index(self):
        assert ExperimentService.derive_ordering([0.5, 0.5]) == AB
        assert ExperimentService.derive_ordering([0.4, 0.1, 0.4]) == Ordering((1, 0, 2))


class TestSelectors:

    @pytest.fixture
    def logs(self, tsirelson, uniform_agents):
        config = ExperimentConfig(tsirelson, uniform_agents, 200, RepositoryMode.upgraded(),
                                  seed=2)
        return ExperimentService.run_experiment(config)[0]

    def test_rank_selectors_follow_the_time_order(self, logs):
        first_inputs = ExperimentService.select(logs, "input@1")
        assert first_inputs == [log.inputs[log.ordering[0]] for log in logs]
        assert ExperimentService.select(logs, "output:B") == [log.outcomes[1] for log in logs]
        assert ExperimentService.select(logs, "lambda")[0] == (logs[0].order_index,
                                                               logs[0].term_index)

    def test_unknown_selectors(self, logs):
        for selector in ("spin", "input:?", "input@0", "timing@1", "phase:A"):
            with pytest.raises(UnknownSelector):
                ExperimentService.select(logs, selector)


class TestNaiveAssignment:

    def test_force_leaks_bob_outcome_into_alice_input(self, signaling_behavior,
                                                      signaling_table, bob_first_agents):
        config = naive_signaling_config(signaling_behavior, signaling_table,
                                        bob_first_agents, 4000)
        logs, report = ExperimentService.run_experiment(config)

        flagged = y_one_rounds(logs)
        assert flagged
        assert all(log.inputs[0] == log.outcomes[1] for log in flagged)
        assert all(log.forced[0] and log.violation for log in flagged)
        assert not any(log.forced[0] for log in logs if log.inputs[1] == 0)

        stats = report.violations
        assert stats.forced_rate[0] == pytest.approx(0.5, abs=0.05)
        assert stats.forced_rate[1] == 0.0
        assert stats.override_rate[0] == pytest.approx(0.25, abs=0.05)
        assert stats.forced_mutual_information == pytest.approx(1.0, abs=0.05)
        restricted = ExperimentService.mutual_information(flagged, "output:B", "input:A")
        assert restricted == pytest.approx(1.0, abs=0.05)

    def test_forced_rounds_are_left_out_of_the_estimate(self, signaling_behavior,
                                                        signaling_table, bob_first_agents):
        config = naive_signaling_config(signaling_behavior, signaling_table,
                                        bob_first_agents, 1000)
        _, report = ExperimentService.run_experiment(config)
        # only y = 0 rounds are clean
        assert report.empirical.flagged
        assert set(report.empirical.unvisited) == {1, 3}
        assert report.chsh is None and report.chsh_stderr is None

    def test_block_aborts_instead(self, signaling_behavior, signaling_table, bob_first_agents):
        config = naive_signaling_config(signaling_behavior, signaling_table,
                                        bob_first_agents, 2000, policy=PolicyKind.BLOCK)
        logs, report = ExperimentService.run_experiment(config)
        assert report.violations.abort_rate == pytest.approx(0.5, abs=0.05)
        assert report.completed == sum(not log.aborted for log in logs)
        aborted = [log for log in logs if log.aborted]
        assert all(log.nominal_inputs[1] == 1 for log in aborted)
        assert all(log.inputs == (None, None) and log.outcomes == (None, None) for log in aborted)
        assert not any(log.any_forced for log in logs)

    def test_alice_first_never_violates(self, signaling_behavior, signaling_table):
        alice_first = (
            AgentSpec(0, (0.5, 0.5), TimingSpec.fixed(0.0)),
            AgentSpec(1, (0.5, 0.5), TimingSpec.fixed(1.0)),
        )
        config = naive_signaling_config(signaling_behavior, signaling_table, alice_first, 500)
        _, report = ExperimentService.run_experiment(config)
        assert report.violations.violation_rate == 0.0
        assert report.chsh == pytest.approx(4.0)


class TestStatistics:

    @pytest.fixture
    def alice_first_logs(self, signaling_behavior, signaling_table):
        alice_first = (
            AgentSpec(0, (0.5, 0.5), TimingSpec.fixed(0.0)),
            AgentSpec(1, (0.5, 0.5), TimingSpec.fixed(1.0)),
        )
        config = naive_signaling_config(signaling_behavior, signaling_table, alice_first, 500,
                                        seed=9)
        return ExperimentService.run_experiment(config)[0]

    def test_forced_input_is_dependent_on_bob_outcome(self, signaling_behavior,
                                                      signaling_table, bob_first_agents):
        config = naive_signaling_config(signaling_behavior, signaling_table,
                                        bob_first_agents, 2000, seed=4)
        logs, _ = ExperimentService.run_experiment(config)
        test = ExperimentService.independence_test(y_one_rounds(logs), "output:B", "input:A")
        assert test.dof == 1
        assert test.p_value < 1e-6
        assert not test.passes(0.01)

    def test_constant_variable_has_nothing_to_test(self, alice_first_logs):
        # a = 0 in every row of the signaling table
        test = ExperimentService.independence_test(alice_first_logs, "output:A", "input:B")
        assert (test.dof, test.p_value, test.low_power) == (0, 1.0, True)

    def test_empirical_behavior_of_a_deterministic_table(self, alice_first_logs,
                                                        signaling_behavior):
        estimate = ExperimentService.empirical_behavior(alice_first_logs,
                                                        signaling_behavior.scenario)
        assert sum(estimate.context_counts) == 500
        assert estimate.unvisited == ()
        assert not estimate.flagged
        assert estimate.behavior.allclose(signaling_behavior)

    def test_empirical_behavior_without_rounds(self, noise):
        estimate = ExperimentService.empirical_behavior([], noise.scenario)
        assert estimate.unvisited == (0, 1, 2, 3)
        assert estimate.flagged
        assert estimate.behavior.allclose(noise)


class TestUpgraded:

    def test_tsirelson_is_reproduced_without_violations(self, tsirelson, uniform_agents):
        config = ExperimentConfig(tsirelson, uniform_agents, 20_000, RepositoryMode.upgraded(),
                                  seed=7)
        logs, report = ExperimentService.run_experiment(config)
        assert report.violations.violation_rate == 0.0
        assert not any(log.any_forced or log.aborted for log in logs)
        assert report.test("inputs", "lambda").p_value > 1e-4
        assert report.test("inputs", "ordering").p_value > 1e-4
        assert abs(report.chsh - TSIRELSON_BOUND) < 5 * report.chsh_stderr
        assert not report.empirical.flagged
        assert ExperimentService.empirical_no_signaling(report, tol=0.05)

    def test_pr_box_marginals(self, pr_box, uniform_agents):
        config = ExperimentConfig(pr_box, uniform_agents, 5000, RepositoryMode.upgraded(),
                                  seed=1)
        _, report = ExperimentService.run_experiment(config)
        tensor = report.empirical.behavior.tensor()
        # P(a = 0 | x, y) and P(b = 0 | x, y)
        assert abs(tensor.sum(axis=3)[..., 0] - 0.5).max() < 0.04
        assert abs(tensor.sum(axis=2)[..., 0] - 0.5).max() < 0.04
        assert report.chsh == pytest.approx(4.0)
        assert report.chsh_stderr == 0.0

    def test_naive_decomposition_violates_when_bob_leads(self, tsirelson, uniform_agents):
        config = ExperimentConfig(tsirelson, uniform_agents, 2000,
                                  RepositoryMode.naive_decomposition(AB), seed=3)
        logs, report = ExperimentService.run_experiment(config)
        assert report.violations.violation_rate > 0
        assert all(log.ordering == (1, 0) for log in logs if log.violation)


class TestDeterminism:

    @pytest.fixture
    def config(self, tsirelson, uniform_agents):
        return lambda workers: ExperimentConfig(tsirelson, uniform_agents, 3000,
                                                RepositoryMode.upgraded(), seed=42,
                                                workers=workers)

    def test_workers_do_not_change_the_logs(self, monkeypatch, tmp_path, config):
        monkeypatch.setattr("services.experiment_service.CHUNK_ROUNDS", 500)
        sequential, _ = ExperimentService.run_experiment(config(1))
        parallel, _ = ExperimentService.run_experiment(config(4))
        assert sequential == parallel

        files = FileRepository()
        files.write_logs(sequential, str(tmp_path / "one.jsonl"))
        files.write_logs(parallel, str(tmp_path / "four.jsonl"))
        assert (tmp_path / "one.jsonl").read_bytes() == (tmp_path / "four.jsonl").read_bytes()

    def test_chunking_does_not_change_the_logs(self, monkeypatch, config):
        whole, _ = ExperimentService.run_experiment(config(1))
        monkeypatch.setattr("services.experiment_service.CHUNK_ROUNDS", 701)
        chunked, _ = ExperimentService.run_experiment(config(1))
        assert whole == chunked

    def test_no_rounds(self, tsirelson, uniform_agents):
        config = ExperimentConfig(tsirelson, uniform_agents, 0, RepositoryMode.upgraded())
        logs, report = ExperimentService.run_experiment(config)
        assert logs == []
        assert report.insufficient_data
        assert report.empirical is None and report.chsh is None

    def test_negative_rounds(self, tsirelson, uniform_agents):
        with pytest.raises(InvalidConfig):
            ExperimentConfig(tsirelson, uniform_agents, -1, RepositoryMode.upgraded())


@pytest.mark.slow
class TestAcceptanceSweeps:

    def test_naive_signaling_over_ten_seeds(self, signaling_behavior, signaling_table,
                                            bob_first_agents):
        for seed in range(10):
            config = naive_signaling_config(signaling_behavior, signaling_table,
                                            bob_first_agents, 100_000, seed=seed)
            logs, _ = ExperimentService.run_experiment(config)
            flagged = y_one_rounds(logs)
            assert all(log.inputs[0] == log.outcomes[1] for log in flagged)
            restricted = ExperimentService.mutual_information(flagged, "output:B", "input:A")
            assert restricted == pytest.approx(1.0, abs=0.05)

    def test_upgraded_tsirelson_over_a_hundred_seeds(self, tsirelson, uniform_agents):
        independent = within = 0
        for seed in range(100):
            config = ExperimentConfig(tsirelson, uniform_agents, 100_000,
                                      RepositoryMode.upgraded(), seed=seed)
            _, report = ExperimentService.run_experiment(config)
            assert report.violations.violation_rate == 0.0
            independent += report.test("inputs", "lambda").passes(0.01)
            within += abs(report.chsh - TSIRELSON_BOUND) <= 3 * report.chsh_stderr
        assert independent >= 95
        assert within >= 99

    def test_ordered_round_trips_at_full_scale(self):
        two_party = [AB, Ordering((1, 0))]
        three_party = [Ordering(p) for p in permutations(range(3))]
        worst = 0.0
        for n_parties, count, orders in ((2, 1000, two_party), (3, 100, three_party)):
            rng = np.random.default_rng(1000 + n_parties)
            for _ in range(count):
                behavior = BehaviorService.random_no_signaling_behavior(rng, n_parties=n_parties)
                for order in orders:
                    decomposition = DecompositionService.decompose_ordered(behavior, order)
                    rebuilt = DecompositionService.reconstruct(decomposition)
                    worst = max(worst, rebuilt.max_deviation(behavior))
                    assert all(AssignmentService.respects_order(term.assignment, order)
                               for term in decomposition.terms)
        assert worst <= 1e-9

    def test_pr_terms_are_drawn_uniformly(self, pr_box):
        repo = OnticRepository.build_repository(pr_box, RepositoryMode.upgraded(), seed=5)
        for order in repo.orders:
            sampled = OnticRepository.sample_rounds(repo, 0, [order] * 100_000)
            counts = Counter(r.term_index for r in sampled)
            assert sorted(counts) == [0, 1, 2, 3]
            assert all(abs(c / 100_000 - 0.25) <= 0.01 for c in counts.values())

    def test_earlier_outcome_says_nothing_about_the_later_input(self, tsirelson,
                                                                 uniform_agents):
        for seed in range(5):
            config = ExperimentConfig(tsirelson, uniform_agents, 100_000,
                                      RepositoryMode.upgraded(), seed=seed)
            logs, _ = ExperimentService.run_experiment(config)
            assert ExperimentService.mutual_information(logs, "output@1", "input@2") <= 0.01
