import pytest

from utils import (party_label, party_index, parse_order, format_order, format_edges,
                   find_cycle_free_order, topological_sorts)


class TestLabels:

    def test_letters_round_trip(self):
        for i in range(26):
            assert party_index(party_label(i)) == i

    def test_beyond_alphabet(self):
        assert party_label(27) == "P27"
        assert party_index("P27") == 27

    def test_lowercase_and_digits(self):
        assert party_index("b") == 1
        assert party_index("3") == 3

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            party_index("??")


class TestOrders:

    def test_parse(self):
        assert parse_order("B,A") == (1, 0)
        assert parse_order("A, C, B", 3) == (0, 2, 1)

    def test_parse_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            parse_order("A,A", 2)
        with pytest.raises(ValueError):
            parse_order("A,B", 3)

    def test_format(self):
        assert format_order((2, 0, 1)) == "C,A,B"
        assert format_edges({(1, 0), (0, 1)}) == ["A->B", "B->A"]


class TestGraphs:

    def test_cycle_detection(self):
        assert find_cycle_free_order(2, [(0, 1), (1, 0)]) is None
        assert find_cycle_free_order(3, [(0, 1), (1, 2)]) == [0, 1, 2]

    def test_all_sorts_without_edges(self):
        sorts, truncated = topological_sorts(3, [])
        assert sorts == [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
        assert not truncated

    def test_sorts_respect_edges(self):
        sorts, _ = topological_sorts(3, [(0, 1), (0, 2)])
        assert sorts == [(0, 1, 2), (0, 2, 1)]

    def test_limit_truncates_only_when_more_exist(self):
        sorts, truncated = topological_sorts(3, [], limit=2)
        assert len(sorts) == 2 and truncated
        sorts, truncated = topological_sorts(3, [], limit=6)
        assert len(sorts) == 6 and not truncated

    def test_cyclic_graph_has_no_sorts(self):
        sorts, truncated = topological_sorts(2, [(0, 1), (1, 0)])
        assert sorts == [] and not truncated
