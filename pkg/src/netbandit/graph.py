"""Interference graphs and the structural utilities built on them.

Cross-unit interference is modeled as an undirected connected graph: a
unit's reward depends on its own arm and the arms of its graph neighbors.
Everything downstream keys off two structures derived here:

* the neighborhood-equivalence partition -- units with identical closed
  neighborhoods are interchangeable and can share statistics, and
* square colorings -- color classes whose members are far enough apart
  that their closed neighborhoods can be driven independently during
  initialization.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedError,
    IndexOutOfRangeError,
    InfeasibleError,
    SelfLoopError,
)


@dataclass(frozen=True)
class InterferenceGraph:
    """Undirected connected graph whose edges mark mutual reward influence.

    ``neighbors[i]`` is a sorted tuple of the units adjacent to ``i``.  The
    closed neighborhood of a unit (itself plus its neighbors) indexes every
    per-unit table in the simulator, always in canonical order: the unit
    itself first, then its neighbors in ascending index order.
    """

    n_units: int
    neighbors: tuple

    def degree(self, unit):
        return len(self.neighbors[unit])

    @property
    def degrees(self):
        return tuple(len(nb) for nb in self.neighbors)

    @property
    def max_degree(self):
        return max((len(nb) for nb in self.neighbors), default=0)

    @property
    def n_edges(self):
        return sum(len(nb) for nb in self.neighbors) // 2

    def closed_neighborhood(self, unit):
        """Canonical index order for unit-local tables: self, then neighbors."""
        return (unit, *self.neighbors[unit])

    def has_edge(self, i, j):
        return j in self.neighbors[i]

    def edges(self):
        """Sorted list of edges as (i, j) pairs with i < j."""
        return [(i, j) for i in range(self.n_units) for j in self.neighbors[i] if i < j]


def _check_unit(graph_size, unit):
    if not 0 <= unit < graph_size:
        raise IndexOutOfRangeError(f"unit {unit} outside [0, {graph_size})")


def build_graph(n_units, edges):
    """Validate an edge list and construct an :class:`InterferenceGraph`.

    Duplicate edges are deduplicated.  Self loops, out-of-range indices,
    and disconnected results are rejected.
    """
    n_units = int(n_units)
    if n_units < 1:
        raise ValueError("n_units must be at least 1")
    adjacency = [set() for _ in range(n_units)]
    for i, j in edges:
        i, j = int(i), int(j)
        _check_unit(n_units, i)
        _check_unit(n_units, j)
        if i == j:
            raise SelfLoopError(f"self loop at unit {i}")
        adjacency[i].add(j)
        adjacency[j].add(i)

    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    if len(seen) != n_units:
        missing = sorted(set(range(n_units)) - seen)
        raise DisconnectedError(f"units unreachable from 0: {missing}")

    return InterferenceGraph(n_units, tuple(tuple(sorted(nb)) for nb in adjacency))


def complete_graph(n_units):
    return build_graph(n_units, [(i, j) for i in range(n_units) for j in range(i + 1, n_units)])


def save_graph(graph, path):
    with open(path, "w") as fh:
        json.dump({"n": graph.n_units, "edges": graph.edges()}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_graph(path):
    with open(path) as fh:
        payload = json.load(fh)
    return build_graph(payload["n"], payload["edges"])


@dataclass(frozen=True)
class NeighborhoodPartition:
    """Grouping of units by identical closed neighborhoods.

    Classes are ordered by smallest member; ``common_degrees[j]`` is the
    degree shared by every member of class j, and ``class_of[i]`` maps a
    unit to its class index.
    """

    classes: tuple
    sizes: tuple
    common_degrees: tuple
    class_of: tuple

    @property
    def n_classes(self):
        return len(self.classes)

    def config_space_size(self, k):
        """Total count of distinct class-level local configurations."""
        return sum(k ** (d + 1) for d in self.common_degrees)


def neighborhood_partition(graph):
    """Partition units into classes with identical closed neighborhoods.

    Two units land in the same class exactly when each is contained in the
    other's closed neighborhood and those neighborhoods coincide as sets;
    members consequently share a degree and observe the same local
    configuration in every round.
    """
    groups = {}
    for i in range(graph.n_units):
        key = frozenset(graph.closed_neighborhood(i))
        groups.setdefault(key, []).append(i)
    classes = sorted((tuple(sorted(members)) for members in groups.values()), key=lambda c: c[0])
    class_of = [0] * graph.n_units
    for j, members in enumerate(classes):
        for i in members:
            class_of[i] = j
        degrees = {graph.degree(i) for i in members}
        assert len(degrees) == 1  # identical neighborhoods force a shared degree
    return NeighborhoodPartition(
        classes=tuple(classes),
        sizes=tuple(len(c) for c in classes),
        common_degrees=tuple(graph.degree(c[0]) for c in classes),
        class_of=tuple(class_of),
    )


def is_doubly_independent(graph, units):
    """Check that no two units are adjacent nor share a neighbor outside the set."""
    units = [int(u) for u in units]
    for u in units:
        _check_unit(graph.n_units, u)
    inside = set(units)
    sets = {u: set(graph.neighbors[u]) for u in units}
    for a_idx, u in enumerate(units):
        for v in units[a_idx + 1 :]:
            if u == v:
                continue
            if graph.has_edge(u, v):
                return False
            if any(w not in inside for w in sets[u] & sets[v]):
                return False
    return True


@dataclass(frozen=True)
class SquareColoring:
    """Color classes from :func:`greedy_square_coloring`.

    ``max_degrees[l]`` is the largest degree inside class l; it sets the
    length of that class's initialization block.
    """

    color_classes: tuple
    max_degrees: tuple

    @property
    def n_colors(self):
        return len(self.color_classes)


def greedy_square_coloring(graph):
    """Color units so same-colored units are neither adjacent nor share any neighbor.

    Units are visited in ascending index order and each receives the
    smallest color not present among colored units within distance two.
    The stricter no-shared-neighbor-anywhere rule (rather than only outside
    the class) keeps the class count at most max_degree**2 + 1, and every
    resulting class is doubly independent.
    """
    nbr = [set(nb) for nb in graph.neighbors]
    color = [-1] * graph.n_units
    for u in range(graph.n_units):
        near = set(nbr[u])
        for v in nbr[u]:
            near |= nbr[v]
        near.discard(u)
        taken = {color[w] for w in near if color[w] >= 0}
        c = 0
        while c in taken:
            c += 1
        color[u] = c
    n_colors = max(color) + 1
    classes = tuple(
        tuple(i for i in range(graph.n_units) if color[i] == c) for c in range(n_colors)
    )
    max_degrees = tuple(max(graph.degree(i) for i in members) for members in classes)
    return SquareColoring(color_classes=classes, max_degrees=max_degrees)


def clique_sparse_graph(cluster_sizes, r, seed):
    """Disjoint complete clusters joined by exactly min(r, feasible) random cross edges per pair.

    Every pair of clusters receives its cross edges independently and
    uniformly at random under the given seed.  With more than one cluster,
    r must be positive so the result is connected.
    """
    cluster_sizes = [int(s) for s in cluster_sizes]
    if not cluster_sizes or any(s < 1 for s in cluster_sizes):
        raise ValueError("cluster sizes must be positive")
    r = int(r)
    if r < 0:
        raise ValueError("r must be nonnegative")
    if len(cluster_sizes) > 1 and r == 0:
        raise InfeasibleError("cannot connect multiple clusters with r = 0")

    rng = np.random.default_rng(seed)
    offsets = np.concatenate([[0], np.cumsum(cluster_sizes)])
    n_units = int(offsets[-1])
    clusters = [list(range(offsets[c], offsets[c + 1])) for c in range(len(cluster_sizes))]

    edges = []
    for members in clusters:
        edges.extend((i, j) for a, i in enumerate(members) for j in members[a + 1 :])
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            pairs = [(i, j) for i in clusters[a] for j in clusters[b]]
            take = min(r, len(pairs))
            chosen = rng.choice(len(pairs), size=take, replace=False)
            edges.extend(pairs[idx] for idx in sorted(int(c) for c in chosen))
    return build_graph(n_units, edges)


def random_bounded_degree_graph(n_units, max_degree, seed):
    """Random connected graph with every degree at most ``max_degree``.

    Starts from a random spanning tree that honors the bound, then adds
    non-tree edges in random order while capacity remains.  Deterministic
    under the seed.
    """
    n_units = int(n_units)
    max_degree = int(max_degree)
    if n_units < 1:
        raise ValueError("n_units must be at least 1")
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    if n_units * max_degree < 2 * (n_units - 1):
        raise InfeasibleError(
            f"no connected graph on {n_units} units fits degree bound {max_degree}"
        )

    rng = np.random.default_rng(seed)
    order = rng.permutation(n_units)
    degree = [0] * n_units
    edges = set()

    def add(i, j):
        edges.add((min(i, j), max(i, j)))
        degree[i] += 1
        degree[j] += 1

    for t in range(1, n_units):
        candidates = [int(order[s]) for s in range(t) if degree[order[s]] < max_degree]
        add(int(order[t]), candidates[int(rng.integers(len(candidates)))])

    spare = [
        (i, j)
        for i in range(n_units)
        for j in range(i + 1, n_units)
        if (i, j) not in edges
    ]
    for idx in rng.permutation(len(spare)):
        i, j = spare[int(idx)]
        if degree[i] < max_degree and degree[j] < max_degree:
            add(i, j)
    return build_graph(n_units, sorted(edges))
