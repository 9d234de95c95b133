"""
Party labels, order parsing and dependency-graph helpers.

Parties are written A, B, C, ... and mapped to indices 0, 1, 2, ...
"""
import string
from collections import deque
from typing import Iterable, List, Optional, Sequence, Set, Tuple


Edge = Tuple[int, int]


def party_label(index: int) -> str:
    if index < 26:
        return string.ascii_uppercase[index]
    return f"P{index}"


def party_index(label: str) -> int:
    label = label.strip()
    if len(label) == 1 and label.upper() in string.ascii_uppercase:
        return string.ascii_uppercase.index(label.upper())
    if label[:1].upper() == "P" and label[1:].isdigit():
        return int(label[1:])
    if label.isdigit():
        return int(label)
    raise ValueError(f"Unknown party label '{label}'")


def parse_order(text: str, n_parties: Optional[int] = None) -> Tuple[int, ...]:
    """Parse 'B,A' into (1, 0); validates it is a permutation when n_parties is given."""
    order = tuple(party_index(p) for p in text.split(",") if p.strip())
    n = n_parties if n_parties is not None else len(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"'{text}' is not an ordering of {n} parties")
    return order


def format_order(order: Sequence[int]) -> str:
    return ",".join(party_label(p) for p in order)


def format_edges(edges: Iterable[Edge]) -> List[str]:
    return [f"{party_label(i)}->{party_label(j)}" for i, j in sorted(edges)]


def _successors(n: int, edges: Iterable[Edge]) -> List[Set[int]]:
    succ: List[Set[int]] = [set() for _ in range(n)]
    for i, j in edges:
        succ[i].add(j)
    return succ


def find_cycle_free_order(n: int, edges: Iterable[Edge]) -> Optional[List[int]]:
    """Kahn's algorithm; None when the graph has a directed cycle."""
    succ = _successors(n, edges)
    in_degree = [0] * n
    for targets in succ:
        for v in targets:
            in_degree[v] += 1
    queue = deque(v for v in range(n) if in_degree[v] == 0)
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in sorted(succ[u]):
            in_degree[v] -= 1
            if in_degree[v] == 0:
                queue.append(v)
    return order if len(order) == n else None


def topological_sorts(n: int, edges: Iterable[Edge],
                      limit: Optional[int] = None) -> Tuple[List[Tuple[int, ...]], bool]:
    """
    All topological sorts in lexicographic order.

    Returns:
        (sorts, truncated): truncated is True when `limit` stopped the enumeration
    """
    succ = _successors(n, edges)
    in_degree = [0] * n
    for targets in succ:
        for v in targets:
            in_degree[v] += 1

    sorts: List[Tuple[int, ...]] = []
    prefix: List[int] = []
    placed = [False] * n

    def extend() -> bool:
        if len(prefix) == n:
            if limit is not None and len(sorts) >= limit:
                return False
            sorts.append(tuple(prefix))
            return True
        for v in range(n):
            if placed[v] or in_degree[v] != 0:
                continue
            placed[v] = True
            prefix.append(v)
            for w in succ[v]:
                in_degree[w] -= 1
            keep_going = extend()
            for w in succ[v]:
                in_degree[w] += 1
            prefix.pop()
            placed[v] = False
            if not keep_going:
                return False
        return True

    finished = extend()
    return sorts, not finished
