"""Shared fixtures and the naive reference oracle the fast paths are checked against."""

import itertools

import numpy as np
import pytest

from netbandit.env import local_config_of
from netbandit.graph import build_graph, random_bounded_degree_graph

# 8-node reference graph: triangle 0-1-2, edge pair 2-3/2-4, and a clique-like
# tail where 3 and 4 are twins over {5, 6, 7} and 5, 6, 7 are mutual twins.
REFERENCE_EDGES = [
    (0, 1), (0, 2), (1, 2),
    (2, 3), (2, 4), (3, 4),
    (3, 5), (3, 6), (3, 7),
    (4, 5), (4, 6), (4, 7),
    (5, 6), (5, 7), (6, 7),
]


@pytest.fixture
def reference_graph():
    return build_graph(8, REFERENCE_EDGES)


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1), (1, 2)])


def random_graph(rng, max_units=10, max_degree=4):
    n = int(rng.integers(2, max_units + 1))
    bound = int(rng.integers(1, max_degree + 1))
    if n * bound < 2 * (n - 1):
        bound = max(bound, 2)
    return random_bounded_degree_graph(n, bound, seed=int(rng.integers(2**31)))


def naive_total(graph, k, tables, assignment):
    """Left-to-right fold over units, the canonical accumulation order."""
    total = 0.0
    for i in range(graph.n_units):
        total = total + float(tables[i][local_config_of(graph, assignment, i, k)])
    return total


def naive_argmax(graph, k, tables):
    """Independent exhaustive maximizer: plain product loop, keep-first ties."""
    best_value = None
    best_assignment = None
    for assignment in itertools.product(range(k), repeat=graph.n_units):
        value = naive_total(graph, k, tables, assignment)
        if best_value is None or value > best_value:
            best_value = value
            best_assignment = assignment
    return np.array(best_assignment, dtype=np.int64), best_value


def random_tables(rng, graph, k, low=-1.0, high=1.0):
    return [rng.uniform(low, high, size=k ** (graph.degree(i) + 1)) for i in range(graph.n_units)]
