import numpy as np
import pytest

from netbandit.errors import (
    DisconnectedError,
    IndexOutOfRangeError,
    InfeasibleError,
    SelfLoopError,
)
from netbandit.graph import (
    build_graph,
    clique_sparse_graph,
    complete_graph,
    greedy_square_coloring,
    is_doubly_independent,
    load_graph,
    neighborhood_partition,
    random_bounded_degree_graph,
    save_graph,
)

from conftest import REFERENCE_EDGES, random_graph


def test_build_single_node():
    g = build_graph(1, [])
    assert g.n_units == 1
    assert g.max_degree == 0
    assert g.n_edges == 0


def test_build_path_degrees(path3):
    assert path3.degrees == (1, 2, 1)
    assert path3.has_edge(0, 1) and path3.has_edge(1, 2) and not path3.has_edge(0, 2)


def test_build_reference_graph(reference_graph):
    assert reference_graph.max_degree == 5
    assert sorted(i for i in range(8) if reference_graph.degree(i) == 5) == [3, 4]
    assert reference_graph.n_edges == len(REFERENCE_EDGES)


def test_build_dedupes_edges():
    g = build_graph(3, [(0, 1), (1, 0), (1, 2), (1, 2)])
    assert g.n_edges == 2


def test_build_rejects_self_loop():
    with pytest.raises(SelfLoopError):
        build_graph(3, [(0, 1), (1, 1), (1, 2)])


def test_build_rejects_bad_endpoint():
    with pytest.raises(IndexOutOfRangeError):
        build_graph(3, [(0, 1), (1, 3)])


def test_build_rejects_disconnected():
    with pytest.raises(DisconnectedError):
        build_graph(4, [(0, 1), (2, 3)])


def test_closed_neighborhood_order(reference_graph):
    # self first, then neighbors ascending
    assert reference_graph.closed_neighborhood(3) == (3, 2, 4, 5, 6, 7)
    assert reference_graph.closed_neighborhood(0) == (0, 1, 2)


def test_partition_reference_classes(reference_graph):
    p = neighborhood_partition(reference_graph)
    assert [list(c) for c in p.classes] == [[0, 1], [2], [3, 4], [5, 6, 7]]
    assert p.sizes == (2, 1, 2, 3)
    assert p.common_degrees == (2, 4, 5, 4)
    assert p.n_classes == 4
    assert [p.class_of[i] for i in range(8)] == [0, 0, 1, 2, 2, 3, 3, 3]


def test_partition_complete_graph():
    p = neighborhood_partition(complete_graph(4))
    assert p.n_classes == 1
    assert p.sizes == (4,)


def test_partition_path_singletons(path3):
    p = neighborhood_partition(path3)
    assert p.n_classes == 3
    assert p.sizes == (1, 1, 1)


def test_partition_config_space_size(reference_graph):
    p = neighborhood_partition(reference_graph)
    # 2^3 + 2^5 + 2^6 + 2^5
    assert p.config_space_size(2) == 136


def test_partition_matches_neighborhood_equality():
    rng = np.random.default_rng(101)
    for _ in range(30):
        g = random_graph(rng)
        p = neighborhood_partition(g)
        covered = sorted(i for c in p.classes for i in c)
        assert covered == list(range(g.n_units))
        hoods = [frozenset(g.closed_neighborhood(i)) for i in range(g.n_units)]
        for j, members in enumerate(p.classes):
            for i in members:
                assert p.class_of[i] == j
                assert hoods[i] == hoods[members[0]]
                assert g.degree(i) == p.common_degrees[j]
        # maximality: distinct classes have distinct neighborhoods
        reps = [hoods[c[0]] for c in p.classes]
        assert len(set(reps)) == len(reps)


def test_doubly_independent_shared_neighbor(path3):
    assert not is_doubly_independent(path3, [0, 2])


def test_doubly_independent_singleton(path3):
    assert is_doubly_independent(path3, [1])


def test_doubly_independent_path4_endpoints():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    assert is_doubly_independent(g, [0, 3])


def test_doubly_independent_rejects_bad_unit(path3):
    with pytest.raises(IndexOutOfRangeError):
        is_doubly_independent(path3, [0, 5])


def test_coloring_single_node():
    c = greedy_square_coloring(build_graph(1, []))
    assert [list(s) for s in c.color_classes] == [[0]]
    assert c.max_degrees == (0,)


def test_coloring_path(path3):
    c = greedy_square_coloring(path3)
    assert [list(s) for s in c.color_classes] == [[0], [1], [2]]
    assert c.max_degrees == (1, 2, 1)


def test_coloring_triangle():
    c = greedy_square_coloring(build_graph(3, [(0, 1), (0, 2), (1, 2)]))
    assert c.n_colors == 3


def test_coloring_properties_random():
    rng = np.random.default_rng(202)
    for _ in range(40):
        g = random_graph(rng)
        c = greedy_square_coloring(g)
        assert c.n_colors <= g.max_degree**2 + 1
        covered = sorted(i for s in c.color_classes for i in s)
        assert covered == list(range(g.n_units))
        for members, n_l in zip(c.color_classes, c.max_degrees):
            assert is_doubly_independent(g, members)
            assert n_l == max(g.degree(i) for i in members)


def test_coloring_and_partition_deterministic(reference_graph):
    assert greedy_square_coloring(reference_graph) == greedy_square_coloring(reference_graph)
    assert neighborhood_partition(reference_graph) == neighborhood_partition(reference_graph)


def test_clique_sparse_single_cluster():
    g = clique_sparse_graph([4], 0, seed=0)
    assert g.n_units == 4
    assert g.n_edges == 6  # K_4


def test_clique_sparse_two_triangles():
    g = clique_sparse_graph([3, 3], 1, seed=0)
    cross = [e for e in g.edges() if (e[0] < 3) != (e[1] < 3)]
    assert len(cross) == 1
    p = neighborhood_partition(g)
    assert p.n_classes <= 2 + 1 * 2 * 1


def test_clique_sparse_three_pairs():
    g = clique_sparse_graph([2, 2, 2], 1, seed=1)
    assert neighborhood_partition(g).n_classes <= 3 + 1 * 3 * 2


def test_clique_sparse_cross_edge_count():
    # r above the feasible 2*2 pair count saturates at 4
    g = clique_sparse_graph([2, 2], 9, seed=3)
    cross = [e for e in g.edges() if (e[0] < 2) != (e[1] < 2)]
    assert len(cross) == 4


def test_clique_sparse_disconnected_infeasible():
    with pytest.raises(InfeasibleError):
        clique_sparse_graph([3, 3], 0, seed=0)


def test_clique_sparse_deterministic():
    a = clique_sparse_graph([3, 2, 4], 2, seed=11)
    b = clique_sparse_graph([3, 2, 4], 2, seed=11)
    assert a == b


def test_bounded_degree_two_units():
    g = random_bounded_degree_graph(2, 1, seed=0)
    assert g.edges() == [(0, 1)]


def test_bounded_degree_respects_bound():
    g = random_bounded_degree_graph(10, 3, seed=42)
    assert g.n_units == 10
    assert max(g.degrees) <= 3


def test_bounded_degree_infeasible():
    with pytest.raises(InfeasibleError):
        random_bounded_degree_graph(5, 1, seed=0)


def test_bounded_degree_deterministic():
    a = random_bounded_degree_graph(12, 3, seed=7)
    b = random_bounded_degree_graph(12, 3, seed=7)
    assert a == b


def test_graph_json_round_trip(tmp_path, reference_graph):
    path = tmp_path / "g.json"
    save_graph(reference_graph, path)
    assert load_graph(path) == reference_graph
