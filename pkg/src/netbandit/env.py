"""Bandit environments: mean tables, reward sampling, and regret accounting.

A full treatment assignment is a length-``n_units`` arm vector.  Each
unit's expected reward depends only on the arms inside its closed
neighborhood, encoded as a base-k integer (the local configuration code).
Canonical digit order matches the closed-neighborhood order: the unit's
own arm is the least-significant digit, followed by its neighbors in
ascending index order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ArmOutOfRangeError, IndexOutOfRangeError, TooLargeError
from .graph import build_graph

DEFAULT_ENUM_BUDGET = 2**20


class LocalConfigCodec:
    """Vectorized base-k encoding of every unit's local configuration.

    Per-unit tables are stored flattened back to back; ``offsets[i]`` is
    the start of unit i's block of length ``k ** (degree(i) + 1)``.
    """

    def __init__(self, graph, k):
        k = int(k)
        if k < 2:
            raise ValueError("k must be at least 2")
        self.graph = graph
        self.k = k
        degrees = np.asarray(graph.degrees, dtype=np.int64)
        self.table_sizes = (k ** (degrees + 1)).astype(np.int64)
        self.offsets = np.concatenate(([0], np.cumsum(self.table_sizes)[:-1]))
        self.flat_size = int(self.table_sizes.sum())
        width = graph.max_degree + 1
        self._idx = np.zeros((graph.n_units, width), dtype=np.int64)
        self._wgt = np.zeros((graph.n_units, width), dtype=np.int64)
        influence = [[] for _ in range(graph.n_units)]
        for i in range(graph.n_units):
            order = graph.closed_neighborhood(i)
            self._idx[i, : len(order)] = order
            self._wgt[i, : len(order)] = k ** np.arange(len(order), dtype=np.int64)
            for pos, u in enumerate(order):
                influence[u].append((i, k**pos))
        # units whose local code shifts when u's arm changes, with digit weights
        self.influence = tuple(tuple(pairs) for pairs in influence)

    def codes(self, assignment):
        """Local configuration code of every unit under one assignment."""
        a = np.asarray(assignment, dtype=np.int64)
        return (a[self._idx] * self._wgt).sum(axis=1)

    def codes_batch(self, assignments):
        """Row-wise :meth:`codes` for a [n_rounds, n_units] arm matrix."""
        a = np.asarray(assignments, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        for w in range(self._idx.shape[1]):
            out += a[:, self._idx[:, w]] * self._wgt[None, :, w]
        return out

    def flat_codes(self, assignment):
        return self.codes(assignment) + self.offsets

    def flat_codes_batch(self, assignments):
        return self.codes_batch(assignments) + self.offsets[None, :]

    def split(self, flat):
        """View a flat table as the per-unit list of arrays."""
        flat = np.asarray(flat)
        return [
            flat[self.offsets[i] : self.offsets[i] + self.table_sizes[i]]
            for i in range(self.graph.n_units)
        ]


def _validate_assignment(assignment, n_units, k):
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (n_units,):
        raise ValueError(f"assignment must have shape ({n_units},)")
    if a.min(initial=0) < 0 or a.max(initial=0) >= k:
        raise ArmOutOfRangeError(f"arms must lie in [0, {k})")
    return a


def local_config_of(graph, assignment, unit, k):
    """Base-k code of one unit's local configuration under an assignment."""
    if not 0 <= unit < graph.n_units:
        raise IndexOutOfRangeError(f"unit {unit} outside [0, {graph.n_units})")
    a = _validate_assignment(assignment, graph.n_units, k)
    order = graph.closed_neighborhood(unit)
    return int(sum(int(a[u]) * k**pos for pos, u in enumerate(order)))


def decode_local_config(graph, unit, k, code):
    """Arms over the closed neighborhood (canonical order) encoded by ``code``."""
    d = graph.degree(unit)
    if not 0 <= code < k ** (d + 1):
        raise ValueError(f"code {code} outside [0, {k ** (d + 1)})")
    return np.array([(code // k**pos) % k for pos in range(d + 1)], dtype=np.int64)


def enumerate_assignments(n_units, k):
    """All k**n_units assignments in lexicographic order (unit 0 most significant)."""
    count = k**n_units
    reps = k ** np.arange(n_units - 1, -1, -1, dtype=np.int64)
    return ((np.arange(count, dtype=np.int64)[:, None] // reps[None, :]) % k).astype(np.int16)


def lex_rank(assignment, k):
    """Position of an assignment in the lexicographic enumeration."""
    a = np.asarray(assignment, dtype=np.int64)
    reps = k ** np.arange(len(a) - 1, -1, -1, dtype=np.int64)
    return int(a @ reps)


class BanditInstance:
    """A graph, an arm count, per-unit mean tables, and a noise level.

    ``means[i][c]`` is unit i's expected reward when its local
    configuration encodes to c.  Observed rewards add independent Gaussian
    noise with standard deviation ``noise_sd`` (1 unless overridden).
    """

    def __init__(self, graph, k, means, noise_sd=1.0):
        k = int(k)
        if k < 2:
            raise ValueError("k must be at least 2")
        if float(noise_sd) < 0:
            raise ValueError("noise_sd must be nonnegative")
        means = tuple(np.asarray(m, dtype=np.float64) for m in means)
        if len(means) != graph.n_units:
            raise ValueError("one mean table per unit required")
        for i, table in enumerate(means):
            expected = k ** (graph.degree(i) + 1)
            if table.shape != (expected,):
                raise ValueError(f"unit {i} mean table must have length {expected}")
            if table.min() < 0.0 or table.max() > 1.0:
                raise ValueError("mean rewards must lie in [0, 1]")
        self.graph = graph
        self.k = k
        self.means = means
        self.noise_sd = float(noise_sd)
        self._codec = None
        self._flat_means = None
        self._mean_totals = None
        self._optimum = None

    @property
    def n_units(self):
        return self.graph.n_units

    @property
    def codec(self):
        if self._codec is None:
            self._codec = LocalConfigCodec(self.graph, self.k)
        return self._codec

    @property
    def flat_means(self):
        if self._flat_means is None:
            self._flat_means = np.concatenate(self.means)
        return self._flat_means

    def expected_total_reward(self, assignment):
        """Sum over units of the mean reward at each unit's local code."""
        a = _validate_assignment(assignment, self.n_units, self.k)
        flat = self.flat_means
        total = 0.0
        for c in self.codec.flat_codes(a):
            total += flat[c]
        return float(total)

    def sample_rewards(self, assignment, rng):
        """One noisy reward per unit; the generator stream always advances."""
        a = _validate_assignment(assignment, self.n_units, self.k)
        mean = self.flat_means[self.codec.flat_codes(a)]
        return mean + self.noise_sd * rng.standard_normal(self.n_units)

    def mean_totals(self, budget=DEFAULT_ENUM_BUDGET):
        """Expected total reward of every assignment, in lexicographic order.

        Accumulated unit by unit so entry ``lex_rank(a)`` is bit-identical
        to ``expected_total_reward(a)``.
        """
        if self._mean_totals is None:
            count = self.k**self.n_units
            if count > budget:
                raise TooLargeError(f"{count} assignments exceed budget {budget}")
            flat_codes = self.codec.flat_codes_batch(enumerate_assignments(self.n_units, self.k))
            totals = np.zeros(count)
            flat = self.flat_means
            for i in range(self.n_units):
                totals += flat[flat_codes[:, i]]
            self._mean_totals = totals
        return self._mean_totals

    def optimum(self, budget=DEFAULT_ENUM_BUDGET):
        """Best assignment and its value; lexicographically smallest among ties."""
        if self._optimum is None:
            totals = self.mean_totals(budget)
            idx = int(np.argmax(totals))
            best = enumerate_assignments(self.n_units, self.k)[idx].astype(np.int64)
            self._optimum = (best, float(totals[idx]))
        return self._optimum


def optimal_assignment(inst, mode="exact", budget=DEFAULT_ENUM_BUDGET, restarts=16, rng=None):
    """Maximize expected total reward over assignments.

    Exhaustive modes guarantee the maximum with lexicographic tie-breaking;
    local search only returns a value no better than it.
    """
    if mode in ("exact", "auto"):
        try:
            return inst.optimum(budget)
        except TooLargeError:
            if mode == "exact":
                raise
    from .oracle import coordinate_ascent_argmax

    assignment, _ = coordinate_ascent_argmax(inst.graph, inst.k, inst.means, restarts, rng)
    return assignment, inst.expected_total_reward(assignment)


def regret_step(inst, assignment, opt_value):
    """Per-round expected regret, averaged over units."""
    return (opt_value - inst.expected_total_reward(assignment)) / inst.n_units


@dataclass
class RegretTrace:
    """Per-round expected regret and its running sum."""

    instantaneous: np.ndarray
    cumulative: np.ndarray

    @classmethod
    def from_instantaneous(cls, values):
        values = np.asarray(values, dtype=np.float64)
        return cls(instantaneous=values, cumulative=np.cumsum(values))

    @property
    def n_rounds(self):
        return len(self.instantaneous)

    @property
    def final(self):
        return float(self.cumulative[-1]) if len(self.cumulative) else 0.0

    def after(self, start):
        """Trace restricted to rounds from ``start`` on (fresh running sum)."""
        return RegretTrace.from_instantaneous(self.instantaneous[start:])


def save_instance(inst, path):
    payload = {
        "graph": {"n": inst.graph.n_units, "edges": inst.graph.edges()},
        "k": inst.k,
        "means": [table.tolist() for table in inst.means],
    }
    if inst.noise_sd != 1.0:
        payload["noise_sd"] = inst.noise_sd
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_instance(path):
    with open(path) as fh:
        payload = json.load(fh)
    graph = build_graph(payload["graph"]["n"], payload["graph"]["edges"])
    return BanditInstance(graph, payload["k"], payload["means"], payload.get("noise_sd", 1.0))
