"""
Statistics Module

Contingency-table statistics for experiment logs: Pearson chi-squared test of
independence with sparse-category pooling, plug-in mutual information in bits,
and correlator standard errors.
"""
import math
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from config import MIN_EXPECTED_COUNT


def _category(value):
    # tuples become flat labels
    return ",".join(str(v) for v in value) if isinstance(value, tuple) else value


def contingency_table(lhs: Sequence, rhs: Sequence) -> pd.DataFrame:
    """Counts of (lhs, rhs) pairs; rows are lhs categories, columns rhs categories."""
    frame = pd.DataFrame({"lhs": [_category(v) for v in lhs], "rhs": [_category(v) for v in rhs]})
    if frame.empty:
        return pd.DataFrame()
    return pd.crosstab(frame["lhs"], frame["rhs"])


def _pool_sparse(table: np.ndarray, axis: int, min_expected: float) -> np.ndarray:
    """
    Merge categories along `axis` whose mean expected cell is below
    min_expected into a single pooled category.
    """
    if table.sum() == 0 or table.shape[axis] < 2:
        return table
    margin = table.sum(axis=1 - axis)
    sparse = margin / table.shape[1 - axis] < min_expected
    if sparse.sum() < 2:
        return table
    if axis == 1:
        pooled = table[:, sparse].sum(axis=1, keepdims=True)
        return np.concatenate([table[:, ~sparse], pooled], axis=1)
    pooled = table[sparse, :].sum(axis=0, keepdims=True)
    return np.concatenate([table[~sparse, :], pooled], axis=0)


def chi_squared_independence(
    lhs: Sequence,
    rhs: Sequence,
    min_expected: float = MIN_EXPECTED_COUNT
) -> Tuple[float, int, float, bool]:
    """
    Pearson chi-squared test of independence.

    Sparse categories (expected count below min_expected) are pooled first;
    pooling is a function of one variable only, so independence is preserved.

    Parameters:
        lhs: first discrete variable, one entry per observation
        rhs: second discrete variable, aligned with lhs
        min_expected: cell count under which power is flagged as low

    Returns:
        (chi2, dof, p_value, low_power)
    """
    table = contingency_table(lhs, rhs)
    if table.empty:
        return 0.0, 0, 1.0, True

    counts = table.to_numpy(dtype=np.float64)
    counts = _pool_sparse(counts, axis=1, min_expected=min_expected)
    counts = _pool_sparse(counts, axis=0, min_expected=min_expected)
    counts = counts[counts.sum(axis=1) > 0][:, counts.sum(axis=0) > 0]

    if counts.shape[0] < 2 or counts.shape[1] < 2:
        return 0.0, 0, 1.0, True

    result = stats.chi2_contingency(counts, correction=False)
    low_power = bool((result.expected_freq < min_expected).any())
    return float(result.statistic), int(result.dof), float(result.pvalue), low_power


def mutual_information_bits(lhs: Sequence, rhs: Sequence) -> float:
    """
    Plug-in mutual information I(lhs; rhs) in bits.

    I = H(lhs) + H(rhs) - H(lhs, rhs), clipped at 0 against rounding.
    """
    table = contingency_table(lhs, rhs)
    if table.empty:
        return 0.0
    joint = table.to_numpy(dtype=np.float64).ravel()
    h_joint = stats.entropy(joint, base=2)
    h_lhs = stats.entropy(table.sum(axis=1).to_numpy(dtype=np.float64), base=2)
    h_rhs = stats.entropy(table.sum(axis=0).to_numpy(dtype=np.float64), base=2)
    return max(0.0, float(h_lhs + h_rhs - h_joint))


def correlator_estimate(parities: Sequence[int]) -> Tuple[float, float]:
    """
    Mean of +/-1 parities and its binomial standard error.

    Returns:
        (estimate, stderr); (0.0, inf) without data
    """
    values = np.asarray(parities, dtype=np.float64)
    if values.size == 0:
        return 0.0, math.inf
    estimate = float(values.mean())
    variance = max(0.0, 1.0 - estimate**2) / values.size
    return estimate, math.sqrt(variance)


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    """Total-variation distance between two distributions on the same support."""
    return 0.5 * float(np.abs(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64)).sum())
