"""
Assignment Service

Signaling structure of deterministic contextual assignments: dependency
graphs, cycle detection, classification and enumeration of local and
order-respecting assignment families.
"""
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import (setup_logger, MAX_ENUMERATED_OBJECTS, ORDER_LISTING_PARTY_LIMIT,
                    MAX_LISTED_ORDERS)
from models import (Scenario, DeterministicAssignment, SignalingGraph, AssignmentKind,
                    AssignmentClass, Ordering)
from utils import (InvalidConfig, ScenarioTooLarge, all_tuples, flat_indices, guarded_product,
                   find_cycle_free_order, topological_sorts)


logger = setup_logger(name="AssignmentService")


def _function_count(n_values: int, domain: int, limit: int = MAX_ENUMERATED_OBJECTS) -> int:
    """n_values ** domain, refused above the guard without building huge ints."""
    count = 1
    for _ in range(domain):
        count *= n_values
        if count > limit:
            raise ScenarioTooLarge(
                f"{n_values}^{domain} response functions exceed the guard of {limit}"
            )
    return count


class AssignmentService:
    """Static helpers over DeterministicAssignment."""

    @staticmethod
    def assignment_from_rows(rows: Sequence[Tuple[Sequence[int], Sequence[int]]],
                             scenario: Optional[Scenario] = None) -> DeterministicAssignment:
        """
        Build an assignment from ((inputs), (outputs)) rows.

        When no scenario is given, input cardinalities are read off the rows
        and outputs are taken binary unless a larger value appears.
        """
        if not rows:
            raise InvalidConfig("an assignment needs at least one row")
        inputs = np.array([r[0] for r in rows], dtype=np.int64)
        outputs = np.array([r[1] for r in rows], dtype=np.int64)
        if inputs.ndim != 2 or outputs.shape != inputs.shape:
            raise InvalidConfig("every row needs one input and one output per party")
        if scenario is None:
            n = inputs.shape[1]
            scenario = Scenario(
                n,
                tuple(int(v) + 1 for v in inputs.max(axis=0)),
                tuple(max(2, int(v) + 1) for v in outputs.max(axis=0)),
            )
        if (inputs < 0).any() or (inputs >= np.asarray(scenario.input_cards)).any():
            raise InvalidConfig("row inputs fall outside the input cardinalities")
        index = flat_indices(inputs, scenario.input_cards)
        if len(index) != scenario.n_joint_inputs or len(set(index.tolist())) != len(index):
            raise InvalidConfig(
                f"rows must list each of the {scenario.n_joint_inputs} joint inputs exactly once"
            )
        table = np.empty((scenario.n_joint_inputs, scenario.n_parties), dtype=np.int64)
        table[index] = outputs
        return DeterministicAssignment(scenario, table)

    # ── Signaling structure ─────────────────────────────

    @staticmethod
    def dependency_graph(assignment: DeterministicAssignment) -> SignalingGraph:
        """Edge (i, j) iff flipping only party i's input can change party j's output."""
        n = assignment.scenario.n_parties
        outputs = assignment.output_tensor()
        edges = set()
        for j in range(n):
            column = outputs[..., j]
            for i in range(n):
                if i == j:
                    continue
                if (column != np.take(column, [0], axis=i)).any():
                    edges.add((i, j))
        return SignalingGraph(n, frozenset(edges))

    @staticmethod
    def has_cycle(graph: SignalingGraph) -> bool:
        return find_cycle_free_order(graph.n_parties, graph.edges) is None

    @staticmethod
    def classify(assignment: DeterministicAssignment) -> AssignmentClass:
        graph = AssignmentService.dependency_graph(assignment)
        if AssignmentService.has_cycle(graph):
            return AssignmentClass(AssignmentKind.CYCLIC, ())
        limit = MAX_LISTED_ORDERS if graph.n_parties > ORDER_LISTING_PARTY_LIMIT else None
        sorts, truncated = topological_sorts(graph.n_parties, graph.edges, limit=limit)
        kind = AssignmentKind.ORDERED if graph.edges else AssignmentKind.LOCAL
        return AssignmentClass(kind, tuple(Ordering(s) for s in sorts), truncated)

    @staticmethod
    def respects_order(assignment: DeterministicAssignment, order: Ordering) -> bool:
        if order.n_parties != assignment.scenario.n_parties:
            raise InvalidConfig(f"order {order} does not cover {assignment.scenario.n_parties} parties")
        graph = AssignmentService.dependency_graph(assignment)
        return all(order.precedes(i, j) for i, j in graph.edges)

    # ── Enumeration ─────────────────────────────────────

    @staticmethod
    def compile_ordered_tables(scenario: Scenario, order: Ordering,
                               stage_values: Sequence[np.ndarray]) -> np.ndarray:
        """
        Compile response functions along an order into full tables.

        Parameters:
            stage_values: per stage k, array (S, prod(m_pi0..m_pik)) holding the
                          output of party pi_k for every prefix of inputs

        Returns:
            np.ndarray: (S, n_joint_inputs, n_parties) assignment tables
        """
        joint = scenario.joint_inputs()
        n_strategies = stage_values[0].shape[0] if stage_values else 1
        tables = np.empty((n_strategies, scenario.n_joint_inputs, scenario.n_parties),
                          dtype=np.int64)
        for k, party in enumerate(order):
            prefix = list(order.permutation[:k + 1])
            cards = [scenario.input_cards[p] for p in prefix]
            prefix_index = flat_indices(joint[:, prefix], cards)
            tables[:, :, party] = stage_values[k][:, prefix_index]
        return tables

    @staticmethod
    def enumerate_local_assignments(scenario: Scenario) -> List[DeterministicAssignment]:
        """All assignments whose outputs depend on the party's own input only."""
        per_party = [
            _function_count(scenario.output_cards[i], scenario.input_cards[i])
            for i in range(scenario.n_parties)
        ]
        guarded_product(per_party, what="local assignment family")
        choices = all_tuples(per_party)
        joint = scenario.joint_inputs()
        tables = np.empty((len(choices), scenario.n_joint_inputs, scenario.n_parties),
                          dtype=np.int64)
        for i in range(scenario.n_parties):
            functions = all_tuples((scenario.output_cards[i],) * scenario.input_cards[i])
            tables[:, :, i] = functions[choices[:, i]][:, joint[:, i]]
        return [DeterministicAssignment(scenario, t) for t in tables]

    @staticmethod
    def enumerate_ordered_strategies(scenario: Scenario,
                                     order: Ordering) -> List[DeterministicAssignment]:
        """All assignments where party pi_k's output depends on inputs of pi_0..pi_k only."""
        if order.n_parties != scenario.n_parties:
            raise InvalidConfig(f"order {order} does not cover {scenario.n_parties} parties")
        functions, counts = [], []
        for k, party in enumerate(order):
            domain = int(np.prod([scenario.input_cards[p] for p in order.permutation[:k + 1]]))
            counts.append(_function_count(scenario.output_cards[party], domain))
            functions.append(all_tuples((scenario.output_cards[party],) * domain))
        guarded_product(counts, what="ordered strategy family")
        choices = all_tuples(counts)
        stage_values = [functions[k][choices[:, k]] for k in range(scenario.n_parties)]
        tables = AssignmentService.compile_ordered_tables(scenario, order, stage_values)
        logger.debug(f"Enumerated {len(tables)} strategies respecting {order}")
        return [DeterministicAssignment(scenario, t) for t in tables]

    @staticmethod
    def enumerate_all_assignments(scenario: Scenario) -> List[DeterministicAssignment]:
        """Every total function from joint inputs to joint outputs."""
        count = _function_count(scenario.n_joint_outputs, scenario.n_joint_inputs)
        choices = all_tuples((scenario.n_joint_outputs,) * scenario.n_joint_inputs)
        outputs = scenario.joint_outputs()
        logger.debug(f"Enumerating all {count} assignments of {scenario}")
        return [DeterministicAssignment(scenario, outputs[row]) for row in choices]

    @staticmethod
    def count_classes(scenario: Scenario) -> Dict[AssignmentKind, int]:
        """Exhaustive Local / Ordered / Cyclic census of a scenario."""
        census = Counter(
            AssignmentService.classify(a).kind
            for a in AssignmentService.enumerate_all_assignments(scenario)
        )
        counts = {kind: census.get(kind, 0) for kind in AssignmentKind}
        logger.info(
            "Assignment census: " + ", ".join(f"{k.value}={v}" for k, v in counts.items())
        )
        return counts
