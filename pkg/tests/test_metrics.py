import math

import pytest

from utils import (contingency_table, chi_squared_independence, mutual_information_bits,
                   correlator_estimate, total_variation)


class TestChiSquared:

    def test_balanced_independent_table(self):
        lhs = [0, 0, 1, 1] * 50
        rhs = [0, 1, 0, 1] * 50
        chi2, dof, p_value, low_power = chi_squared_independence(lhs, rhs)
        assert chi2 == pytest.approx(0.0)
        assert dof == 1
        assert p_value == pytest.approx(1.0)
        assert not low_power

    def test_identical_variables_are_dependent(self):
        values = [0, 1] * 100
        _, _, p_value, _ = chi_squared_independence(values, values)
        assert p_value < 1e-10

    def test_tuple_categories(self):
        lhs = [(0, 0), (0, 1), (1, 0), (1, 1)] * 30
        rhs = ["u", "v"] * 60
        _, dof, _, _ = chi_squared_independence(lhs, rhs)
        assert dof == 3

    def test_no_data(self):
        assert chi_squared_independence([], []) == (0.0, 0, 1.0, True)

    def test_constant_variable_is_low_power(self):
        chi2, dof, p_value, low_power = chi_squared_independence([0] * 20, [0, 1] * 10)
        assert (chi2, dof, p_value, low_power) == (0.0, 0, 1.0, True)

    def test_sparse_cell_flags_low_power(self):
        lhs = [0] * 100 + [1] * 100 + [2] * 2
        rhs = [0, 1] * 101
        *_, low_power = chi_squared_independence(lhs, rhs)
        assert low_power

    def test_contingency_table_counts(self):
        table = contingency_table([0, 0, 1], ["a", "b", "b"])
        assert table.loc[0, "a"] == 1 and table.loc[1, "b"] == 1


class TestMutualInformation:

    def test_copy_of_fair_bit_is_one_bit(self):
        values = [0, 1] * 500
        assert mutual_information_bits(values, values) == pytest.approx(1.0)

    def test_independent_bits_carry_nothing(self):
        assert mutual_information_bits([0, 0, 1, 1] * 25, [0, 1, 0, 1] * 25) == pytest.approx(0.0)

    def test_empty(self):
        assert mutual_information_bits([], []) == 0.0


class TestCorrelators:

    def test_estimate_and_stderr(self):
        estimate, stderr = correlator_estimate([1, 1, -1, -1])
        assert estimate == 0.0
        assert stderr == pytest.approx(0.5)

    def test_perfect_correlation_has_zero_stderr(self):
        assert correlator_estimate([1] * 10) == (1.0, 0.0)

    def test_no_data(self):
        estimate, stderr = correlator_estimate([])
        assert estimate == 0.0 and math.isinf(stderr)

    def test_total_variation(self):
        assert total_variation([0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.5)
