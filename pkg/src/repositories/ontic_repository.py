"""
Ontic Repository

The per-round store of contextual deterministic assignments. In upgraded mode
the context includes the round's time order and one decomposition per order is
computed at build time; the naive modes ignore the order and can therefore
demand inputs that have not been chosen yet.
"""
from itertools import permutations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import setup_logger, DEFAULT_SEED, MAX_REPOSITORY_PARTIES
from models import (Behavior, Ordering, Repository, RepositoryMode, ModeKind, RoundAssignment,
                    ContextKey,
                    DeterministicAssignment, QueryResult, FreeChoiceViolation, ViolationKind,
                    ResolutionPolicy, PolicyKind)
from utils import (DuplicateQuery, InvalidConfig, PolicyUnavailable, TooManyOrders, Purpose,
                   check_seed, keyed_uniform, keyed_uniforms, party_label)


logger = setup_logger(name="OnticRepository")

INPUT_NAMES = "xyzw"
OUTPUT_NAMES = "abcd"


def _input_name(party: int) -> str:
    return INPUT_NAMES[party] if party < len(INPUT_NAMES) else f"x{party}"


def _output_name(party: int) -> str:
    return OUTPUT_NAMES[party] if party < len(OUTPUT_NAMES) else f"a{party}"


def describe_time_order(order: Ordering) -> str:
    """'t_A <= t_B' for (A, B); ties go to the lower index, so (B, A) reads 't_B < t_A'."""
    parts = [f"t_{party_label(order.permutation[0])}"]
    for before, after in zip(order.permutation, order.permutation[1:]):
        parts.append("<=" if before < after else "<")
        parts.append(f"t_{party_label(after)}")
    return " ".join(parts)


class OnticRepository:
    """Build, sample and query ontological repositories."""

    @staticmethod
    def all_orders(n_parties: int) -> Tuple[Ordering, ...]:
        if n_parties > MAX_REPOSITORY_PARTIES:
            raise TooManyOrders(
                f"{n_parties} parties need {n_parties}! decompositions; "
                f"the limit is {MAX_REPOSITORY_PARTIES} parties"
            )
        return tuple(Ordering(p) for p in permutations(range(n_parties)))

    @staticmethod
    def build_repository(behavior: Behavior, mode: RepositoryMode,
                         seed: int = DEFAULT_SEED) -> Repository:
        """
        Precompute what the repository stores.

        Upgraded: one decomposition per time order (n! of them).
        NaiveDecomposition: the decomposition along the fixed order.
        NaiveAssignment: the fixed assignment only.
        """
        from services.decomposition_service import DecompositionService

        seed = check_seed(seed)
        if mode.kind == ModeKind.UPGRADED:
            orders = OnticRepository.all_orders(behavior.scenario.n_parties)
        elif mode.kind == ModeKind.NAIVE_DECOMPOSITION:
            if mode.order.n_parties != behavior.scenario.n_parties:
                raise InvalidConfig(f"order {mode.order} does not match the behavior's parties")
            orders = (mode.order,)
        else:
            mode.assignment.check_scenario(behavior.scenario)
            orders = ()

        decompositions = {
            order: DecompositionService.decompose_ordered(behavior, order) for order in orders
        }
        logger.info(
            f"Built {mode.kind.value} repository (seed {seed}): "
            + (", ".join(f"{o}: {len(d)} terms" for o, d in decompositions.items())
               or "fixed assignment")
        )
        return Repository(behavior, mode, seed, decompositions, orders)

    # ── Sampling ────────────────────────────────────────

    @staticmethod
    def _stored_order(repo: Repository, order: Ordering) -> Ordering:
        if repo.mode.kind == ModeKind.NAIVE_DECOMPOSITION:
            return repo.mode.order
        return order

    @staticmethod
    def sample_round(repo: Repository, round_id: int, order: Ordering) -> RoundAssignment:
        """
        The assignment actualized in `round_id` when the parties act in `order`.

        The term draw is keyed by (seed, round_id, order index), so a replay
        returns the same assignment.
        """
        if order.n_parties != repo.behavior.scenario.n_parties:
            raise InvalidConfig(f"order {order} does not match the repository's parties")
        if repo.mode.kind == ModeKind.NAIVE_ASSIGNMENT:
            return RoundAssignment(round_id, repo.mode.assignment, None, repo.mode.kind)

        stored = OnticRepository._stored_order(repo, order)
        slot = repo.order_index(stored)
        u = keyed_uniform(repo.seed, Purpose.LAMBDA, round_id, slot, len(repo.orders))
        decomposition = repo.decompositions[stored]
        term = decomposition.term_for(u)
        return RoundAssignment(round_id, decomposition.terms[term].assignment, stored,
                               repo.mode.kind, order_index=slot, term_index=term)

    @staticmethod
    def sample_rounds(repo: Repository, first_round: int,
                      orders: Sequence[Ordering]) -> List[RoundAssignment]:
        """Batch of sample_round for rounds first_round, first_round + 1, ..."""
        if repo.mode.kind == ModeKind.NAIVE_ASSIGNMENT:
            return [RoundAssignment(first_round + i, repo.mode.assignment, None, repo.mode.kind)
                    for i in range(len(orders))]

        draws = keyed_uniforms(repo.seed, Purpose.LAMBDA, first_round, len(orders),
                               len(repo.orders))
        rounds = []
        for i, order in enumerate(orders):
            stored = OnticRepository._stored_order(repo, order)
            slot = repo.order_index(stored)
            decomposition = repo.decompositions[stored]
            term = decomposition.term_for(float(draws[i, slot]))
            rounds.append(RoundAssignment(first_round + i, decomposition.terms[term].assignment,
                                          stored, repo.mode.kind, order_index=slot,
                                          term_index=term))
        return rounds

    # ── Queries ─────────────────────────────────────────

    @staticmethod
    def context_key(round_assignment: RoundAssignment,
                    known_inputs: Mapping[int, int]) -> ContextKey:
        """Inputs chosen so far, keyed with the round's time order where one is stored."""
        order = round_assignment.origin_order
        if round_assignment.mode_kind == ModeKind.UPGRADED and order is None:
            raise InvalidConfig(f"upgraded round {round_assignment.round_id} carries no time order")
        return ContextKey.of(known_inputs, order)

    @staticmethod
    def _outcome_slice(assignment: DeterministicAssignment, party: int, value: int,
                       context: ContextKey) -> Tuple[np.ndarray, List[int]]:
        """Party's outputs over every completion of the inputs the context leaves open."""
        known_inputs = context.as_dict()
        n = assignment.scenario.n_parties
        index, unknown = [], []
        for p in range(n):
            if p == party:
                index.append(int(value))
            elif p in known_inputs:
                index.append(int(known_inputs[p]))
            else:
                index.append(slice(None))
                unknown.append(p)
        return assignment.output_tensor()[tuple(index) + (party,)], unknown

    @staticmethod
    def _dependent_parties(outcomes: np.ndarray, unknown: List[int]) -> List[int]:
        return [
            p for axis, p in enumerate(unknown)
            if (outcomes != np.take(outcomes, [0], axis=axis)).any()
        ]

    @staticmethod
    def query(round_assignment: RoundAssignment, party: int, value: int,
              known_inputs: Mapping[int, int]) -> QueryResult:
        """
        Outcome of `party` measuring with input `value`, given the inputs chosen
        so far. When the outcome depends on an unchosen input, the result
        carries one InputRequired violation per such party and no outcome.
        """
        context = OnticRepository.context_key(round_assignment, known_inputs)
        if party in known_inputs:
            raise DuplicateQuery(f"party {party_label(party)} was already queried this round")
        scenario = round_assignment.assignment.scenario
        if not 0 <= value < scenario.input_cards[party]:
            raise InvalidConfig(f"input {value} is out of range for party {party_label(party)}")
        outcomes, unknown = OnticRepository._outcome_slice(
            round_assignment.assignment, party, value, context
        )
        dependent = OnticRepository._dependent_parties(outcomes, unknown)
        if not dependent:
            return QueryResult(outcome=int(outcomes.flat[0]))
        return QueryResult(violations=tuple(
            FreeChoiceViolation(ViolationKind.INPUT_REQUIRED, p) for p in dependent
        ))

    @staticmethod
    def resolve_forced(round_assignment: RoundAssignment, party: int, value: int,
                       policy: ResolutionPolicy,
                       known_inputs: Optional[Mapping[int, int]] = None) -> QueryResult:
        """
        Resolve an InputRequired query.

        Block aborts the round. Force commits every input the outcome depends on
        to its presampled value and reports InputForced for each.
        """
        if round_assignment.mode_kind == ModeKind.UPGRADED:
            raise PolicyUnavailable("upgraded repositories never require unchosen inputs")
        known_inputs = dict(known_inputs or {})
        context = OnticRepository.context_key(round_assignment, known_inputs)
        outcomes, unknown = OnticRepository._outcome_slice(
            round_assignment.assignment, party, value, context
        )
        dependent = OnticRepository._dependent_parties(outcomes, unknown)
        required = tuple(FreeChoiceViolation(ViolationKind.INPUT_REQUIRED, p) for p in dependent)
        if policy.kind == PolicyKind.BLOCK:
            return QueryResult(violations=required, aborted=True)

        presampled = dict(policy.presampled_inputs)
        missing = [p for p in dependent if p not in presampled]
        if missing:
            raise InvalidConfig(
                "no presampled input for " + ", ".join(party_label(p) for p in missing)
            )
        committed = {**known_inputs, **{p: presampled[p] for p in dependent}}
        final, _ = OnticRepository._outcome_slice(
            round_assignment.assignment, party, value,
            ContextKey.of(committed, round_assignment.origin_order)
        )
        forced = tuple(
            FreeChoiceViolation(ViolationKind.INPUT_FORCED, p, int(presampled[p]))
            for p in dependent
        )
        return QueryResult(outcome=int(final.flat[0]), violations=required + forced)

    # ── Rendering ───────────────────────────────────────

    @staticmethod
    def upgraded_context_table(assignments: Mapping[Ordering, DeterministicAssignment]
                               ) -> pd.DataFrame:
        """
        Context table with a time-order column.

        A context whose outputs agree across every order gets a single row
        marked "any"; otherwise one row per order.
        """
        if not assignments:
            raise InvalidConfig("no assignments to tabulate")
        orders = sorted(assignments)
        scenario = assignments[orders[0]].scenario
        for order in orders:
            assignments[order].check_scenario(scenario)

        inputs = [_input_name(p) for p in range(scenario.n_parties)]
        outputs = [_output_name(p) for p in range(scenario.n_parties)]
        records: List[Dict] = []
        for joint in scenario.joint_inputs():
            per_order = {o: assignments[o].output(joint) for o in orders}
            if len(set(per_order.values())) == 1:
                per_order = {None: per_order[orders[0]]}
            for order, values in per_order.items():
                record = dict(zip(inputs, (int(v) for v in joint)))
                record["time order"] = "any" if order is None else describe_time_order(order)
                record.update(zip(outputs, values))
                records.append(record)
        return pd.DataFrame.from_records(records, columns=inputs + ["time order"] + outputs)

    @staticmethod
    def round_context_table(repo: Repository, round_id: int) -> pd.DataFrame:
        """The upgraded table actually stored for one round of an upgraded repository."""
        if repo.mode.kind != ModeKind.UPGRADED:
            raise InvalidConfig("round context tables need an upgraded repository")
        return OnticRepository.upgraded_context_table({
            order: OnticRepository.sample_round(repo, round_id, order).assignment
            for order in repo.orders
        })

    @staticmethod
    def context_table(assignment: DeterministicAssignment) -> pd.DataFrame:
        """Plain context table: inputs on the left, stored values on the right."""
        scenario = assignment.scenario
        inputs = [_input_name(p) for p in range(scenario.n_parties)]
        outputs = [_output_name(p) for p in range(scenario.n_parties)]
        records = [dict(zip(inputs + outputs, x + a)) for x, a in assignment.rows()]
        return pd.DataFrame.from_records(records, columns=inputs + outputs)
