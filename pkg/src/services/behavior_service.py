"""
Behavior Service

Scenario/behavior algebra: normalization and no-signaling checks, the CHSH
functional, canonical behavior generators and convex mixtures.
"""
import math
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np
from scipy import optimize

from config import setup_logger, NORM_TOL, CHSH_CLASSICAL_BOUND, SINGLET_CHSH_ANGLES
from models import (Scenario, Behavior, BellFunctional, ValidationReport, SignalingWitness,
                    NoSignalingReport, DeterministicAssignment)
from utils import (InvalidBehavior, InvalidConfig, ScenarioMismatch, WeightSum, WrongScenario,
                   all_tuples)


logger = setup_logger(name="BehaviorService")

CHSH_SCENARIO = Scenario(2, (2, 2), (2, 2))


class BehaviorService:
    """Pure functions over immutable behaviors."""

    # ── Checks ──────────────────────────────────────────

    @staticmethod
    def validate(behavior: Behavior, tol: float = NORM_TOL) -> ValidationReport:
        """
        Normalization and range report.

        worst_deviation is the largest |sum_a P(a|x) - 1| over joint inputs.
        """
        if tol <= 0:
            raise InvalidConfig(f"tol must be positive, got {tol}")
        probs = behavior.probs
        deviation = float(np.abs(probs.sum(axis=1) - 1.0).max())
        in_range = bool(probs.min() >= -tol and probs.max() <= 1.0 + tol)
        return ValidationReport(
            normalized=deviation <= tol,
            entries_in_range=in_range,
            worst_deviation=deviation,
        )

    @staticmethod
    def is_no_signaling(behavior: Behavior, tol: float = NORM_TOL) -> NoSignalingReport:
        """
        Single-party input flips: for each party i, the marginal of the others'
        outputs must not depend on x_i. Equivalent to the full condition.
        """
        report = BehaviorService.validate(behavior, tol)
        if not report.ok:
            raise InvalidBehavior(
                f"behavior is not a valid probability table (worst deviation "
                f"{report.worst_deviation:.3g}, entries in range: {report.entries_in_range})"
            )
        n = behavior.scenario.n_parties
        tensor = behavior.tensor()
        worst, witness = 0.0, None
        for party in range(n):
            others = tensor.sum(axis=n + party)
            reference = np.take(others, [0], axis=party)
            gap = np.abs(others - reference)
            if gap.size == 0:
                continue
            location = np.unravel_index(int(np.argmax(gap)), gap.shape)
            deviation = float(gap[location])
            if deviation > worst:
                worst = deviation
                moved = tuple(int(v) for v in location[:n])
                baseline = moved[:party] + (0,) + moved[party + 1:]
                witness = SignalingWitness(party=party, inputs=(baseline, moved),
                                           deviation=deviation)
        holds = worst <= tol
        return NoSignalingReport(holds=holds, worst_violation=worst,
                                 witness=None if holds else witness)

    # ── CHSH ────────────────────────────────────────────

    @staticmethod
    def chsh_functional() -> BellFunctional:
        """Coefficients (-1)^(xy) (-1)^(a+b) over (joint input, joint output)."""
        inputs = all_tuples((2, 2))
        outputs = all_tuples((2, 2))
        input_sign = (-1.0) ** (inputs[:, 0] * inputs[:, 1])
        output_sign = (-1.0) ** (outputs[:, 0] + outputs[:, 1])
        return BellFunctional(
            scenario=CHSH_SCENARIO,
            coefficients=np.outer(input_sign, output_sign),
            classical_bound=CHSH_CLASSICAL_BOUND,
        )

    @staticmethod
    def correlators(behavior: Behavior) -> np.ndarray:
        """E[x, y] = sum_ab (-1)^(a+b) P(a, b | x, y)."""
        if not behavior.scenario.is_chsh:
            raise WrongScenario("CHSH needs 2 parties with binary inputs and outputs")
        sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
        return np.einsum("xyab,ab->xy", behavior.tensor(), sign)

    @staticmethod
    def chsh_value(behavior: Behavior) -> float:
        """S = E00 + E01 + E10 - E11."""
        if not behavior.scenario.is_chsh:
            raise WrongScenario("CHSH needs 2 parties with binary inputs and outputs")
        return BehaviorService.chsh_functional().evaluate(behavior)

    # ── Generators ──────────────────────────────────────

    @staticmethod
    def from_correlators(correlators: np.ndarray) -> Behavior:
        """Unbiased-marginal behavior P(a,b|x,y) = (1 + (-1)^(a+b) E_xy) / 4."""
        e = np.asarray(correlators, dtype=np.float64).reshape(2, 2)
        sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
        tensor = (1.0 + e[:, :, None, None] * sign[None, None, :, :]) / 4.0
        return Behavior(CHSH_SCENARIO, tensor.reshape(4, 4))

    @staticmethod
    def make_pr_box(alpha: int = 0, beta: int = 0, gamma: int = 0) -> Behavior:
        """P(a,b|x,y) = 1/2 iff a xor b = xy xor alpha*x xor beta*y xor gamma."""
        tensor = np.zeros((2, 2, 2, 2))
        for x in range(2):
            for y in range(2):
                for a in range(2):
                    b = a ^ (x * y) ^ (alpha * x) ^ (beta * y) ^ gamma
                    tensor[x, y, a, b] = 0.5
        return Behavior(CHSH_SCENARIO, tensor.reshape(4, 4))

    @staticmethod
    def make_pr_box_family() -> List[Behavior]:
        """The eight relabelings of the PR box."""
        return [
            BehaviorService.make_pr_box(alpha, beta, gamma)
            for alpha in range(2) for beta in range(2) for gamma in range(2)
        ]

    @staticmethod
    def make_singlet_behavior(angles_a: Sequence[float], angles_b: Sequence[float]) -> Behavior:
        """Singlet correlations E_xy = -cos(angles_a[x] - angles_b[y])."""
        if len(angles_a) != 2 or len(angles_b) != 2:
            raise InvalidConfig("singlet behavior needs exactly two angles per party")
        a = np.asarray(angles_a, dtype=np.float64)
        b = np.asarray(angles_b, dtype=np.float64)
        return BehaviorService.from_correlators(-np.cos(a[:, None] - b[None, :]))

    @staticmethod
    def make_tsirelson() -> Behavior:
        r = math.sqrt(2) / 2
        return BehaviorService.from_correlators(np.array([[r, r], [r, -r]]))

    @staticmethod
    def make_uniform_noise(scenario: Scenario = CHSH_SCENARIO) -> Behavior:
        probs = np.full((scenario.n_joint_inputs, scenario.n_joint_outputs),
                        1.0 / scenario.n_joint_outputs)
        return Behavior(scenario, probs)

    @staticmethod
    def optimal_singlet_angles(start: Sequence[float] = (0.1, 1.4, 0.9, -0.6)
                               ) -> Tuple[Tuple[float, float], Tuple[float, float], float]:
        """
        Numerically maximize |S| over the four singlet angles.

        Returns:
            (angles_a, angles_b, |S|)
        """
        def chsh(theta):
            e = -np.cos(theta[:2, None] - theta[None, 2:])
            return e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1]

        # the singlet reaches its extreme with S < 0
        result = optimize.minimize(chsh, np.asarray(start, dtype=np.float64), method="BFGS",
                                   options={"gtol": 1e-12})
        theta = result.x
        value = abs(float(chsh(theta)))
        logger.info(f"Singlet CHSH maximization: |S| = {value:.12f} after {result.nit} iterations")
        return (float(theta[0]), float(theta[1])), (float(theta[2]), float(theta[3])), value

    @staticmethod
    def make_optimal_singlet() -> Behavior:
        angles_a, angles_b = SINGLET_CHSH_ANGLES
        return BehaviorService.make_singlet_behavior(angles_a, angles_b)

    # ── Algebra ─────────────────────────────────────────

    @staticmethod
    def behavior_from_assignment(assignment: DeterministicAssignment) -> Behavior:
        scenario = assignment.scenario
        probs = np.zeros((scenario.n_joint_inputs, scenario.n_joint_outputs))
        probs[np.arange(scenario.n_joint_inputs), assignment.output_indices()] = 1.0
        return Behavior(scenario, probs)

    @staticmethod
    def mix(terms: Sequence[Tuple[float, Behavior]], tol: float = NORM_TOL) -> Behavior:
        """Entrywise convex combination."""
        if not terms:
            raise WeightSum("cannot mix an empty list")
        weights = np.array([float(w) for w, _ in terms])
        if (weights < 0).any():
            raise WeightSum("mixture weights must be non-negative")
        if abs(weights.sum() - 1.0) > tol:
            raise WeightSum(f"mixture weights sum to {weights.sum():.12f}, expected 1")
        scenario = terms[0][1].scenario
        for _, behavior in terms:
            if behavior.scenario != scenario:
                raise ScenarioMismatch(f"cannot mix {behavior.scenario} with {scenario}")
        stacked = np.stack([behavior.probs for _, behavior in terms])
        return Behavior(scenario, np.tensordot(weights, stacked, axes=1))

    @staticmethod
    def product_behavior(*behaviors: Behavior) -> Behavior:
        """
        Independent joint behavior of disjoint party groups, parties
        concatenated in argument order.
        """
        def pair(left: Behavior, right: Behavior) -> Behavior:
            ls, rs = left.scenario, right.scenario
            outer = np.multiply.outer(left.tensor(), right.tensor())
            nl, nr = ls.n_parties, rs.n_parties
            # (in_l, out_l, in_r, out_r) -> (in_l, in_r, out_l, out_r)
            axes = (list(range(nl)) + list(range(2 * nl, 2 * nl + nr))
                    + list(range(nl, 2 * nl)) + list(range(2 * nl + nr, 2 * nl + 2 * nr)))
            scenario = Scenario(nl + nr, ls.input_cards + rs.input_cards,
                                ls.output_cards + rs.output_cards)
            return Behavior(scenario, outer.transpose(axes).reshape(
                scenario.n_joint_inputs, scenario.n_joint_outputs))

        if not behaviors:
            raise InvalidConfig("product of no behaviors")
        return reduce(pair, behaviors)

    @staticmethod
    def random_no_signaling_behavior(rng: np.random.Generator, n_parties: int = 2,
                                     max_vertices: int = 4) -> Behavior:
        """
        Random sparse mixture of no-signaling vertices.

        Two parties: PR relabelings and local deterministic vertices.
        Three parties: local deterministic vertices and PR(A,B) x uniform(C).
        """
        from services.assignment_service import AssignmentService

        scenario = Scenario.uniform(n_parties)
        vertices = [
            BehaviorService.behavior_from_assignment(a)
            for a in AssignmentService.enumerate_local_assignments(scenario)
        ]
        if n_parties == 2:
            vertices += BehaviorService.make_pr_box_family()
        elif n_parties == 3:
            noise = BehaviorService.make_uniform_noise(Scenario.uniform(1))
            vertices += [BehaviorService.product_behavior(pr, noise)
                         for pr in BehaviorService.make_pr_box_family()]
        k = int(rng.integers(1, max_vertices + 1))
        chosen = rng.choice(len(vertices), size=k, replace=False)
        weights = rng.dirichlet(np.ones(k))
        return BehaviorService.mix([(float(w), vertices[i]) for w, i in zip(weights, chosen)])
