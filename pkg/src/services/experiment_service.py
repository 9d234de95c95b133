"""
Experiment Service

Monte-Carlo simulation of Bell-type experiments against an ontic repository:
each round draws measurement times and inputs per agent, derives the time
order, samples the stored assignment and queries the agents in temporal order.
Logs are aggregated into a StatsReport (empirical behavior, CHSH estimate,
measurement-independence tests and free-choice violation statistics).
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import setup_logger, INDEPENDENCE_ALPHA, MIN_EXPECTED_COUNT
from models import (Scenario, Behavior, Ordering, Repository, RoundAssignment, ExperimentConfig,
                    RoundLog, IndependenceTest, EmpiricalEstimate, ViolationStats, StatsReport,
                    PolicyKind, ResolutionPolicy)
from repositories import OnticRepository
from services.behavior_service import BehaviorService
from utils import (UnknownSelector, Purpose, keyed_uniforms, categorical, party_index,
                   chi_squared_independence, mutual_information_bits, correlator_estimate)


logger = setup_logger(name="ExperimentService")

CHUNK_ROUNDS = 10_000

DEFAULT_TESTS = (("inputs", "lambda"), ("inputs", "ordering"))


def _parse_party(token: str, selector: str) -> int:
    try:
        return party_index(token)
    except ValueError as e:
        raise UnknownSelector(f"unknown party in selector '{selector}'") from e


def _selector(selector: str) -> Callable[[RoundLog], object]:
    """Map a selector string to a per-round extractor."""
    if selector == "inputs":
        return lambda log: tuple(log.inputs)
    if selector == "outputs":
        return lambda log: tuple(log.outcomes)
    if selector == "lambda":
        return lambda log: (log.order_index, log.term_index)
    if selector == "ordering":
        return lambda log: tuple(log.ordering)
    if ":" in selector:
        kind, token = selector.split(":", 1)
        party = _parse_party(token, selector)
        extractors = {
            "input": lambda log: log.inputs[party],
            "output": lambda log: log.outcomes[party],
            "nominal": lambda log: log.nominal_inputs[party],
            "forced": lambda log: int(log.forced[party]),
        }
        if kind in extractors:
            return extractors[kind]
    if "@" in selector:
        kind, rank = selector.split("@", 1)
        if rank.isdigit() and int(rank) >= 1 and kind in ("input", "output"):
            position = int(rank) - 1
            if kind == "input":
                return lambda log: log.inputs[log.ordering[position]]
            return lambda log: log.outcomes[log.ordering[position]]
    raise UnknownSelector(f"unknown selector '{selector}'")


class ExperimentService:
    """Round simulation and log statistics."""

    # ── Orders ──────────────────────────────────────────

    @staticmethod
    def derive_ordering(timestamps: Sequence[float]) -> Ordering:
        """Ascending time; equal times go to the lower party index."""
        return Ordering(tuple(int(p) for p in np.argsort(np.asarray(timestamps), kind="stable")))

    # ── Simulation ──────────────────────────────────────

    @staticmethod
    def _play_round(round_assignment: RoundAssignment, order: Ordering,
                    timestamps: Tuple[float, ...], nominal: Tuple[int, ...],
                    presampled: Tuple[int, ...], policy: PolicyKind) -> RoundLog:
        """Query the agents in temporal order, resolving violations by policy."""
        n = len(nominal)
        known: Dict[int, int] = {}
        committed: Dict[int, int] = {}
        outcomes: List[Optional[int]] = [None] * n
        aborted = violation = False

        for party in order:
            value = committed.get(party, nominal[party])
            result = OnticRepository.query(round_assignment, party, value, known)
            if result.is_violation:
                violation = True
                resolution = (ResolutionPolicy.block() if policy == PolicyKind.BLOCK
                              else ResolutionPolicy.force(dict(enumerate(presampled))))
                result = OnticRepository.resolve_forced(round_assignment, party, value,
                                                        resolution, known)
                if result.aborted:
                    aborted = True
                    break
                committed.update(result.forced_inputs)
            known[party] = value
            outcomes[party] = result.outcome

        inputs = tuple(known.get(p) for p in range(n))
        return RoundLog(
            round_id=round_assignment.round_id,
            timestamps=timestamps,
            ordering=order.permutation,
            inputs=inputs,
            nominal_inputs=nominal,
            forced=tuple(p in committed for p in range(n)),
            outcomes=tuple(outcomes),
            order_index=round_assignment.order_index,
            term_index=round_assignment.term_index,
            aborted=aborted,
            violation=violation,
        )

    @staticmethod
    def simulate_rounds(repo: Repository, config: ExperimentConfig, first_round: int,
                        n_rounds: int) -> List[RoundLog]:
        """
        Rounds [first_round, first_round + n_rounds); a pure function of the
        seed and the round ids.
        """
        n = config.behavior.scenario.n_parties
        seed = config.seed
        timing_u = keyed_uniforms(seed, Purpose.TIMING, first_round, n_rounds, n)
        input_u = keyed_uniforms(seed, Purpose.INPUT, first_round, n_rounds, n)
        forced_u = keyed_uniforms(seed, Purpose.FORCED, first_round, n_rounds, n)

        times = np.empty((n_rounds, n))
        nominal = np.empty((n_rounds, n), dtype=np.int64)
        presampled = np.empty((n_rounds, n), dtype=np.int64)
        for agent in config.agents:
            p = agent.party
            times[:, p] = agent.timing.sample(timing_u[:, p])
            nominal[:, p] = categorical(input_u[:, p], agent.input_dist)
            presampled[:, p] = categorical(forced_u[:, p], agent.input_dist)

        permutations = np.argsort(times, axis=1, kind="stable")
        order_cache: Dict[Tuple[int, ...], Ordering] = {}
        orders = []
        for row in permutations:
            key = tuple(int(p) for p in row)
            if key not in order_cache:
                order_cache[key] = Ordering(key)
            orders.append(order_cache[key])

        sampled = OnticRepository.sample_rounds(repo, first_round, orders)
        times_list = times.tolist()
        nominal_list = nominal.tolist()
        presampled_list = presampled.tolist()
        return [
            ExperimentService._play_round(
                sampled[i], orders[i], tuple(times_list[i]), tuple(nominal_list[i]),
                tuple(presampled_list[i]), config.policy,
            )
            for i in range(n_rounds)
        ]

    @staticmethod
    def run_experiment(config: ExperimentConfig,
                       repo: Optional[Repository] = None) -> Tuple[List[RoundLog], StatsReport]:
        """
        Simulate config.rounds rounds and aggregate them.

        Rounds are processed in chunks; with workers > 1 the chunks run on a
        thread pool and are reassembled by round id.
        """
        if repo is None:
            repo = OnticRepository.build_repository(config.behavior, config.mode, config.seed)
        chunks = [
            (start, min(CHUNK_ROUNDS, config.rounds - start))
            for start in range(0, config.rounds, CHUNK_ROUNDS)
        ]
        logger.info(
            f"Simulating {config.rounds} rounds ({config.mode.kind.value}, "
            f"policy {config.policy.value}, seed {config.seed}, workers {config.workers})"
        )

        def run(chunk):
            return ExperimentService.simulate_rounds(repo, config, *chunk)

        if config.workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                parts = list(pool.map(run, chunks))
        else:
            parts = [run(chunk) for chunk in chunks]
        logs = sorted((log for part in parts for log in part), key=lambda log: log.round_id)

        report = ExperimentService.build_report(logs, config.behavior.scenario)
        logger.info(
            f"Finished: {report.completed}/{report.rounds} rounds completed, "
            f"violation rate {report.violations.violation_rate:.4f}"
        )
        return logs, report

    # ── Statistics ──────────────────────────────────────

    @staticmethod
    def select(logs: Sequence[RoundLog], selector: str) -> List:
        """Values of a selector over the non-aborted rounds."""
        extract = _selector(selector)
        return [extract(log) for log in logs if not log.aborted]

    @staticmethod
    def independence_test(logs: Sequence[RoundLog], lhs: str, rhs: str,
                          min_expected: float = MIN_EXPECTED_COUNT) -> IndependenceTest:
        """Pearson chi-squared test of independence between two selected variables."""
        chi2, dof, p_value, low_power = chi_squared_independence(
            ExperimentService.select(logs, lhs), ExperimentService.select(logs, rhs),
            min_expected=min_expected,
        )
        return IndependenceTest(lhs, rhs, chi2, dof, p_value, low_power)

    @staticmethod
    def mutual_information(logs: Sequence[RoundLog], var1: str, var2: str) -> float:
        """Plug-in mutual information in bits over the non-aborted rounds."""
        return mutual_information_bits(ExperimentService.select(logs, var1),
                                       ExperimentService.select(logs, var2))

    @staticmethod
    def _clean(logs: Sequence[RoundLog]) -> List[RoundLog]:
        return [log for log in logs if not log.aborted and not log.any_forced]

    @staticmethod
    def empirical_behavior(logs: Sequence[RoundLog], scenario: Scenario) -> EmpiricalEstimate:
        """
        Frequency estimate over non-aborted, non-forced rounds.

        Unvisited contexts are filled with the uniform distribution and flagged.
        """
        clean = ExperimentService._clean(logs)
        counts = np.zeros((scenario.n_joint_inputs, scenario.n_joint_outputs))
        if clean:
            inputs = np.array([log.inputs for log in clean], dtype=np.int64)
            outcomes = np.array([log.outcomes for log in clean], dtype=np.int64)
            rows = np.ravel_multi_index(tuple(inputs.T), scenario.input_cards)
            cols = np.ravel_multi_index(tuple(outcomes.T), scenario.output_cards)
            np.add.at(counts, (rows, cols), 1.0)
        visits = counts.sum(axis=1)
        unvisited = tuple(int(i) for i in np.flatnonzero(visits == 0))
        probs = np.divide(counts, visits[:, None], out=np.full_like(counts, 1.0 / counts.shape[1]),
                          where=visits[:, None] > 0)
        return EmpiricalEstimate(
            behavior=Behavior(scenario, probs),
            context_counts=tuple(int(v) for v in visits),
            unvisited=unvisited,
            flagged=bool(unvisited) or len(clean) <= 1,
        )

    @staticmethod
    def chsh_estimate(logs: Sequence[RoundLog]) -> Tuple[Optional[float], Optional[float]]:
        """S from per-context parity means with its standard error; None without data."""
        clean = ExperimentService._clean(logs)
        total, variance = 0.0, 0.0
        for x in range(2):
            for y in range(2):
                parities = [
                    1 - 2 * ((log.outcomes[0] + log.outcomes[1]) % 2)
                    for log in clean if log.inputs == (x, y)
                ]
                if not parities:
                    return None, None
                estimate, stderr = correlator_estimate(parities)
                total += -estimate if (x, y) == (1, 1) else estimate
                variance += stderr ** 2
        return total, float(np.sqrt(variance))

    @staticmethod
    def violation_stats(logs: Sequence[RoundLog], n_parties: int) -> ViolationStats:
        if not logs:
            return ViolationStats()
        total = len(logs)
        forced_rate = {p: sum(log.forced[p] for log in logs) / total for p in range(n_parties)}
        override_rate = {
            p: sum(
                log.forced[p] and log.inputs[p] is not None
                and log.inputs[p] != log.nominal_inputs[p]
                for log in logs
            ) / total
            for p in range(n_parties)
        }
        # earliest outcome against the first forced input, over forced rounds
        earlier, forced_inputs = [], []
        for log in logs:
            if log.aborted or not log.any_forced:
                continue
            victim = next(p for p in log.ordering if log.forced[p])
            earlier.append(log.outcomes[log.ordering[0]])
            forced_inputs.append(log.inputs[victim])
        return ViolationStats(
            violation_rate=sum(log.violation for log in logs) / total,
            abort_rate=sum(log.aborted for log in logs) / total,
            forced_rate=forced_rate,
            override_rate=override_rate,
            forced_mutual_information=mutual_information_bits(earlier, forced_inputs),
        )

    @staticmethod
    def build_report(logs: Sequence[RoundLog], scenario: Scenario,
                     tests: Sequence[Tuple[str, str]] = DEFAULT_TESTS) -> StatsReport:
        completed = sum(not log.aborted for log in logs)
        report = StatsReport(rounds=len(logs), completed=completed,
                             insufficient_data=completed == 0)
        report.violations = ExperimentService.violation_stats(logs, scenario.n_parties)
        if report.insufficient_data:
            logger.warning("No completed rounds: statistics flagged as insufficient data")
            return report
        report.empirical = ExperimentService.empirical_behavior(logs, scenario)
        if scenario.is_chsh:
            report.chsh, report.chsh_stderr = ExperimentService.chsh_estimate(logs)
        report.independence = [ExperimentService.independence_test(logs, lhs, rhs)
                               for lhs, rhs in tests]
        return report

    @staticmethod
    def passes_independence(report: StatsReport, alpha: float = INDEPENDENCE_ALPHA) -> bool:
        return all(t.passes(alpha) for t in report.independence)

    @staticmethod
    def empirical_no_signaling(report: StatsReport, tol: float) -> bool:
        if report.empirical is None:
            return False
        return BehaviorService.is_no_signaling(report.empirical.behavior, tol).holds
