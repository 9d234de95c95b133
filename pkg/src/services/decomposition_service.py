"""
Decomposition Service

Factor a behavior along a temporal order into chain conditionals and
decompose it into a finite mixture of deterministic assignments that respect
that order. Also decides ordered- and local-polytope membership.
"""
from typing import List, Tuple

import numpy as np

from config import (setup_logger, NORM_TOL, PRUNE_WEIGHT, FILLER_MASS_THRESHOLD,
                    MAX_ENUMERATED_OBJECTS, CHSH_CLASSICAL_BOUND)
from models import (Behavior, Ordering, ChainFactors, Decomposition, DecompositionTerm,
                    DeterministicAssignment)
from services.assignment_service import AssignmentService
from services.behavior_service import BehaviorService
from utils import (InvalidBehavior, InvalidConfig, NotNoSignaling, ScenarioTooLarge,
                   WrongScenario, flat_indices, all_tuples)


logger = setup_logger(name="DecompositionService")

FILLERS = ("point", "uniform")

# (x, y) position of the single negative correlator in each CHSH symmetry
CHSH_NEGATIVE_TERMS = ((1, 1), (1, 0), (0, 1), (0, 0))


def _permuted_tensor(behavior: Behavior, order: Ordering) -> np.ndarray:
    n = behavior.scenario.n_parties
    axes = list(order.permutation) + [n + p for p in order.permutation]
    return behavior.tensor().transpose(axes)


def _prefix_gap(behavior: Behavior, order: Ordering) -> float:
    """
    Largest dependence of a prefix's output marginal on the inputs of
    parties later in the order.
    """
    n = behavior.scenario.n_parties
    tensor = _permuted_tensor(behavior, order)
    worst = 0.0
    for k in range(n - 1):
        marginal = tensor.sum(axis=tuple(range(n + k + 1, 2 * n)))
        # later inputs pinned to their first value
        reference = marginal[tuple(slice(None) if a <= k else slice(0, 1) for a in range(n))]
        gap = np.abs(marginal - reference)
        if gap.size:
            worst = max(worst, float(gap.max()))
    return worst


class DecompositionService:
    """Chain factors, ordered decompositions and polytope membership."""

    # ── Membership ──────────────────────────────────────

    @staticmethod
    def in_ordered_polytope(behavior: Behavior, order: Ordering, tol: float = NORM_TOL) -> bool:
        """One-way no-signaling along the order: each prefix ignores later inputs."""
        if order.n_parties != behavior.scenario.n_parties:
            raise InvalidConfig(f"order {order} does not cover {behavior.scenario.n_parties} parties")
        if not BehaviorService.validate(behavior, tol).ok:
            return False
        return _prefix_gap(behavior, order) <= tol

    @staticmethod
    def chsh_witness(behavior: Behavior) -> Tuple[str, float]:
        """
        The CHSH symmetry with the largest |value|.

        Returns:
            (expression, value), e.g. ("E00+E01+E10-E11", 2.828...)
        """
        e = BehaviorService.correlators(behavior)
        best_label, best_value = "", 0.0
        for negative in CHSH_NEGATIVE_TERMS:
            signs = np.ones((2, 2))
            signs[negative] = -1.0
            value = float((signs * e).sum())
            label = "".join(
                ("-" if signs[x, y] < 0 else ("+" if (x, y) != (0, 0) else "")) + f"E{x}{y}"
                for x in range(2) for y in range(2)
            )
            if abs(value) > abs(best_value) or not best_label:
                best_label, best_value = label, value
        return best_label, best_value

    @staticmethod
    def in_local_polytope_2222(behavior: Behavior, tol: float = NORM_TOL) -> bool:
        """
        All eight CHSH symmetries |sum +-E_xy| <= 2 and no-signaling.

        Complete for two parties with binary inputs and outputs.
        """
        if not behavior.scenario.is_chsh:
            raise WrongScenario("local-polytope test covers 2 parties with binary inputs/outputs")
        if not BehaviorService.validate(behavior, tol).ok:
            raise InvalidBehavior("behavior is not a valid probability table")
        if not BehaviorService.is_no_signaling(behavior, tol).holds:
            return False
        _, value = DecompositionService.chsh_witness(behavior)
        return abs(value) <= CHSH_CLASSICAL_BOUND + tol

    # ── Chain factors ───────────────────────────────────

    @staticmethod
    def _check_decomposable(behavior: Behavior, order: Ordering, one_way: bool,
                            tol: float) -> None:
        if order.n_parties != behavior.scenario.n_parties:
            raise InvalidConfig(f"order {order} does not cover {behavior.scenario.n_parties} parties")
        report = BehaviorService.is_no_signaling(behavior, tol)
        if report.holds:
            return
        if one_way:
            gap = _prefix_gap(behavior, order)
            if gap <= tol:
                return
            raise NotNoSignaling(
                f"behavior signals against the order {order} (prefix gap {gap:.3g})",
                witness=report.witness,
            )
        raise NotNoSignaling(
            f"behavior is signaling: {report.witness.describe()}", witness=report.witness
        )

    @staticmethod
    def chain_factors(behavior: Behavior, order: Ordering, filler: str = "point",
                      one_way: bool = False, tol: float = NORM_TOL) -> ChainFactors:
        """
        Conditionals P(a_k | x_0..x_k, a_0..a_(k-1)) along `order`.

        Parameters:
            filler: completion of zero-probability histories, "point" (all mass
                    on output 0) or "uniform"
            one_way: accept behaviors that are only no-signaling along the order
        """
        if filler not in FILLERS:
            raise InvalidConfig(f"filler must be one of {FILLERS}, got '{filler}'")
        DecompositionService._check_decomposable(behavior, order, one_way, tol)

        n = behavior.scenario.n_parties
        tensor = _permuted_tensor(behavior, order)
        factors: List[np.ndarray] = []
        masks: List[np.ndarray] = []
        for k in range(n):
            # later inputs pinned to 0, later outputs summed out
            index = tuple([slice(None)] * (k + 1) + [0] * (n - k - 1) + [slice(None)] * n)
            prefix = tensor[index].sum(axis=tuple(range(2 * (k + 1), k + 1 + n)))
            prefix = np.clip(prefix, 0.0, None)
            mass = prefix.sum(axis=-1, keepdims=True)
            reached = mass > FILLER_MASS_THRESHOLD
            conditional = np.divide(prefix, mass, out=np.zeros_like(prefix), where=reached)
            d = prefix.shape[-1]
            fill = np.zeros(d)
            if filler == "point":
                fill[0] = 1.0
            else:
                fill[:] = 1.0 / d
            conditional = np.where(reached, conditional, fill)
            conditional.setflags(write=False)
            mask = ~reached[..., 0]
            mask.setflags(write=False)
            factors.append(conditional)
            masks.append(mask)
        return ChainFactors(behavior.scenario, order, tuple(factors), tuple(masks))

    # ── Decomposition ───────────────────────────────────

    @staticmethod
    def decompose_ordered(behavior: Behavior, order: Ordering, one_way: bool = False,
                          filler: str = "point", tol: float = NORM_TOL) -> Decomposition:
        """
        Product coupling of the chain factors over order-respecting strategies.

        Party pi_k responds with f_k(x_0..x_k); the weight of a strategy tuple is
        prod_k prod_(x_0..x_k) P(f_k(x..) | x_0..x_k, f_0(x_0), .., f_(k-1)(x..)).
        Strategies are grown one prefix row at a time and partial weights below
        the prune threshold are dropped.
        """
        chain = DecompositionService.chain_factors(behavior, order, filler, one_way, tol)
        scenario = behavior.scenario
        in_cards = [scenario.input_cards[p] for p in order]
        out_cards = [scenario.output_cards[p] for p in order]

        weights = np.ones(1)
        stage_values: List[np.ndarray] = []
        for k in range(scenario.n_parties):
            rows = all_tuples(in_cards[:k + 1])
            # outputs of earlier stages on each prefix row: (S, R) per stage
            earlier = [
                stage_values[j][:, flat_indices(rows[:, :j + 1], in_cards[:j + 1])]
                for j in range(k)
            ]
            factor = chain.factors[k].reshape(-1, out_cards[k])
            history_cards = in_cards[:k + 1] + out_cards[:k]
            n_states, n_rows = len(weights), len(rows)
            coords = [np.broadcast_to(rows[:, i], (n_states, n_rows)) for i in range(k + 1)]
            coords += earlier
            history = np.ravel_multi_index(tuple(coords), history_cards)
            table = factor[history]  # (S, R, d_k)

            parent = np.arange(n_states)
            values = np.zeros((n_states, 0), dtype=np.int64)
            partial = weights.copy()
            for r in range(n_rows):
                candidate = partial[:, None] * table[parent, r, :]
                keep_state, keep_value = np.nonzero(candidate > PRUNE_WEIGHT)
                if len(keep_state) > MAX_ENUMERATED_OBJECTS:
                    raise ScenarioTooLarge(
                        f"decomposition along {order} exceeds {MAX_ENUMERATED_OBJECTS} terms"
                    )
                partial = candidate[keep_state, keep_value]
                parent = parent[keep_state]
                values = np.concatenate([values[keep_state], keep_value[:, None]], axis=1)
            stage_values = [v[parent] for v in stage_values] + [values]
            weights = partial

        if len(weights) == 0:
            raise InvalidBehavior(f"no strategy along {order} carries weight above {PRUNE_WEIGHT}")
        weights = weights / weights.sum()
        tables = AssignmentService.compile_ordered_tables(scenario, order, stage_values)
        terms = tuple(
            DecompositionTerm(float(w), DeterministicAssignment(scenario, t))
            for w, t in zip(weights, tables)
        )
        logger.debug(f"Decomposed along {order}: {len(terms)} terms")
        return Decomposition(order, terms)

    @staticmethod
    def reconstruct(decomposition: Decomposition) -> Behavior:
        """Mixture of the terms' deterministic behaviors."""
        scenario = decomposition.scenario
        probs = np.zeros((scenario.n_joint_inputs, scenario.n_joint_outputs))
        rows = np.arange(scenario.n_joint_inputs)
        for term in decomposition.terms:
            np.add.at(probs, (rows, term.assignment.output_indices()), term.weight)
        return Behavior(scenario, probs)
