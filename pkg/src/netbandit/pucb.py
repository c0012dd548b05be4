"""Partition-level UCB over an interference graph.

Initialization sweeps the graph one color class at a time so that every
unit realizes each of its local configurations a known number of times.
Afterwards the learner keeps per-unit count/sum tables and each round
plays the assignment maximizing a sum of class-level upper confidence
bounds: units with identical closed neighborhoods observe identical local
configurations, so their class shares a single exploration bonus of width
sqrt(2 * log(2/delta) * m_j / n).  The maximization runs through the
linear oracle on per-unit score tables with the bonus split evenly across
class members, which reproduces the class-level objective exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .base import BanditPolicy, as_generator, resolve_log_confidence
from .env import DEFAULT_ENUM_BUDGET, LocalConfigCodec
from .errors import (
    ArmOutOfRangeError,
    HorizonTooShortError,
    InvalidColoringError,
    TooLargeError,
    UnexploredError,
)
from .graph import complete_graph, greedy_square_coloring, is_doubly_independent, neighborhood_partition
from .oracle import (
    DEFAULT_RESTARTS,
    ExhaustiveEvaluator,
    coordinate_ascent_argmax,
    maximize,
    resolve_oracle_method,
)


class InitSchedule:
    """Deterministic exploration rounds derived from a square coloring.

    The block for color class l lasts k**(n_l + 1) rounds, n_l being the
    class's largest degree.  Writing round r of the block in base k as
    digits (g_0, ..., g_{n_l}), each class member plays g_0 while its
    neighbors play g_1, ..., g_d in ascending unit order; digits beyond a
    member's degree are unused for it, and uninvolved units play arm 0.
    Class members are doubly independent, so their closed neighborhoods
    are disjoint and these writes never collide.
    """

    def __init__(self, assignments, blocks):
        self.assignments = assignments
        self.blocks = blocks

    @property
    def n_rounds(self):
        return len(self.assignments)


def build_init_schedule(graph, coloring, k):
    k = int(k)
    for members in coloring.color_classes:
        if not is_doubly_independent(graph, members):
            raise InvalidColoringError(f"color class {members} is not doubly independent")
    rows = []
    blocks = []
    start = 0
    for members, n_l in zip(coloring.color_classes, coloring.max_degrees):
        length = k ** (n_l + 1)
        block = np.zeros((length, graph.n_units), dtype=np.int64)
        for pos in range(n_l + 1):
            digits = (np.arange(length, dtype=np.int64) // k**pos) % k
            for i in members:
                order = graph.closed_neighborhood(i)
                if pos < len(order):
                    block[:, order[pos]] = digits
        rows.append(block)
        blocks.append((start, start + length, members))
        start += length
    return InitSchedule(np.concatenate(rows, axis=0), tuple(blocks))


class CountTable:
    """Per-unit observation counts and reward sums, flattened back to back."""

    def __init__(self, graph, k):
        self.codec = LocalConfigCodec(graph, k)
        self.counts = np.zeros(self.codec.flat_size, dtype=np.int64)
        self.sums = np.zeros(self.codec.flat_size)
        self.rounds = 0

    def update(self, assignment, rewards):
        flat = self.codec.flat_codes(assignment)
        self.counts[flat] += 1
        self.sums[flat] += rewards
        self.rounds += 1

    def counts_of(self, unit):
        off = self.codec.offsets[unit]
        return self.counts[off : off + self.codec.table_sizes[unit]]

    def sums_of(self, unit):
        off = self.codec.offsets[unit]
        return self.sums[off : off + self.codec.table_sizes[unit]]

    def means_of(self, unit):
        """Empirical means with unobserved configurations reported as 0."""
        counts = self.counts_of(unit)
        return np.divide(
            self.sums_of(unit),
            counts,
            out=np.zeros(len(counts)),
            where=counts > 0,
        )


def update_counts(state, graph, k, assignment, rewards):
    """Record one round of observations for every unit."""
    if state.codec.graph != graph or state.codec.k != int(k):
        raise ValueError("count table was built for a different graph or arm count")
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.min(initial=0) < 0 or assignment.max(initial=0) >= k:
        raise ArmOutOfRangeError(f"arms must lie in [0, {k})")
    state.update(assignment, np.asarray(rewards, dtype=np.float64))


def class_flat_code_tables(graph, k, partition, codec=None):
    """Per class: matrix of member flat-table positions for each class config.

    Row m of table j gives, for every configuration of class j encoded
    under its representative (smallest member), where member m's own table
    stores that configuration.  Members share a closed neighborhood but
    order it differently (self first), so the digit positions permute.
    """
    codec = codec or LocalConfigCodec(graph, k)
    tables = []
    for members, d in zip(partition.classes, partition.common_degrees):
        rep_order = graph.closed_neighborhood(members[0])
        width = d + 1
        digits = (np.arange(k**width, dtype=np.int64)[:, None] // k ** np.arange(width)) % k
        rows = []
        for i in members:
            pos = {u: q for q, u in enumerate(graph.closed_neighborhood(i))}
            weights = np.array([k ** pos[u] for u in rep_order], dtype=np.int64)
            rows.append(digits @ weights + codec.offsets[i])
        tables.append(np.stack(rows))
    return tables


def partition_ucb(state, partition, j, code, delta):
    """Class-level upper confidence bound at one class configuration.

    ``code`` is the configuration encoded under the class representative.
    Members share counts at corresponding configurations, so the bonus
    uses the representative's count.
    """
    members = partition.classes[j]
    m_j = partition.sizes[j]
    codes = class_flat_code_tables(state.codec.graph, state.codec.k, partition, state.codec)[j][:, code]
    n = int(state.counts[codes[0]])
    if n < 1:
        raise UnexploredError(f"class {j} configuration {code} has no observations")
    mean_sum = float((state.sums[codes] / state.counts[codes]).sum())
    return mean_sum + math.sqrt(2.0 * math.log(2.0 / delta) * m_j / n)


def ucb_score_tables(state, partition, delta):
    """Per-unit score tables whose oracle objective equals the class-level UCB sum.

    Each unit's table is its empirical mean plus the class bonus split
    evenly across the m_j members; summing over a class restores
    sqrt(2 * log(2/delta) * m_j / n) exactly.
    """
    if state.counts.min() < 1:
        raise UnexploredError("every configuration needs at least one observation")
    log_term = math.log(2.0 / delta)
    m_entry = np.repeat(
        np.asarray(partition.sizes, dtype=np.float64)[np.asarray(partition.class_of)],
        state.codec.table_sizes,
    )
    flat = state.sums / state.counts + np.sqrt(2.0 * log_term / (m_entry * state.counts))
    return state.codec.split(flat)


def select_treatment(
    state,
    partition,
    graph,
    k,
    delta,
    mode="auto",
    budget=DEFAULT_ENUM_BUDGET,
    restarts=DEFAULT_RESTARTS,
    rng=None,
):
    """Assignment maximizing the sum of class-level confidence bounds."""
    tables = ucb_score_tables(state, partition, delta)
    assignment, _ = maximize(graph, k, tables, mode=mode, budget=budget, restarts=restarts, rng=rng)
    return assignment


def count_confidence_violations(state, partition, flat_true_means, delta, code_tables=None):
    """How many class configurations currently violate their confidence bound.

    Returns (violations, checks) over all observed (class, configuration)
    pairs: a violation means |empirical class mean sum - true class mean
    sum| exceeds sqrt(2 * log(2/delta) * m_j / n).
    """
    log_term = math.log(2.0 / delta)
    if code_tables is None:
        code_tables = class_flat_code_tables(state.codec.graph, state.codec.k, partition, state.codec)
    violations = 0
    checks = 0
    for j, codes in enumerate(code_tables):
        n = state.counts[codes[0]]
        seen = n >= 1
        if not seen.any():
            continue
        emp = (state.sums[codes] / np.maximum(state.counts[codes], 1)).sum(axis=0)
        true = flat_true_means[codes].sum(axis=0)
        bonus = np.sqrt(2.0 * log_term * partition.sizes[j] / np.maximum(n, 1))
        violations += int((np.abs(emp - true) > bonus)[seen].sum())
        checks += int(seen.sum())
    return violations, checks


class PartitionedUCB(BanditPolicy):
    """UCB learner pooling confidence bounds across neighborhood-equivalent units.

    Runs the full deterministic initialization schedule, then each round
    rebuilds the per-unit score tables from scratch and plays the oracle
    argmax.  ``believed_graph`` lets the learner run against a different
    interference structure than the environment's (the environment still
    samples rewards from the true instance); by default the true graph is
    used.
    """

    def __init__(
        self,
        horizon,
        delta=None,
        use_practical_delta=False,
        oracle_mode="auto",
        oracle_budget=DEFAULT_ENUM_BUDGET,
        oracle_restarts=DEFAULT_RESTARTS,
        believed_graph=None,
    ):
        self.horizon = horizon
        self.delta = delta
        self.use_practical_delta = use_practical_delta
        self.oracle_mode = oracle_mode
        self.oracle_budget = oracle_budget
        self.oracle_restarts = oracle_restarts
        self.believed_graph = believed_graph

    def _believed(self, instance):
        return self.believed_graph if self.believed_graph is not None else instance.graph

    def fit(self, instance, rng=None):
        rng = as_generator(rng)
        graph = self._believed(instance)
        if graph.n_units != instance.n_units:
            raise ValueError("believed graph must cover the same units")
        k = instance.k
        horizon = int(self.horizon)

        partition = neighborhood_partition(graph)
        coloring = greedy_square_coloring(graph)
        schedule = build_init_schedule(graph, coloring, k)
        t0 = schedule.n_rounds
        if horizon < t0:
            raise HorizonTooShortError(f"horizon {horizon} shorter than {t0} init rounds")
        self.delta_, self.log_term_ = resolve_log_confidence(
            self.delta,
            self.use_practical_delta,
            instance.n_units,
            horizon,
            partition.config_space_size(k),
        )
        self.partition_ = partition
        self.coloring_ = coloring
        self.n_init_rounds_ = t0

        self.oracle_method_ = resolve_oracle_method(
            self.oracle_mode, graph.n_units, k, self.oracle_budget
        )
        evaluator = (
            ExhaustiveEvaluator(graph, k, self.oracle_budget)
            if self.oracle_method_ == "exact"
            else None
        )
        counts = CountTable(graph, k)

        totals = instance.mean_totals()
        opt_value = float(totals.max())
        reps = k ** np.arange(instance.n_units - 1, -1, -1, dtype=np.int64)
        n = instance.n_units
        instantaneous = np.empty(horizon)

        ranks = schedule.assignments @ reps
        for t in range(t0):
            assignment = schedule.assignments[t]
            counts.update(assignment, instance.sample_rewards(assignment, rng))
            instantaneous[t] = (opt_value - totals[ranks[t]]) / n
            self._after_round(t, counts)

        m_entry = np.repeat(
            np.asarray(partition.sizes, dtype=np.float64)[np.asarray(partition.class_of)],
            counts.codec.table_sizes,
        )
        bonus_coef = 2.0 * self.log_term_ / m_entry
        for t in range(t0, horizon):
            flat = counts.sums / counts.counts + np.sqrt(bonus_coef / counts.counts)
            if evaluator is not None:
                assignment, _ = evaluator.argmax(flat)
            else:
                assignment, _ = coordinate_ascent_argmax(
                    graph, k, flat, self.oracle_restarts, rng
                )
            counts.update(assignment, instance.sample_rewards(assignment, rng))
            instantaneous[t] = (opt_value - totals[int(assignment @ reps)]) / n
            self._after_round(t, counts)

        self.counts_ = counts
        return self._finish(instantaneous)

    def _after_round(self, t, counts):
        """Hook for diagnostics; called after every count update."""


class UnknownGraphUCB(PartitionedUCB):
    """Fallback when the interference graph is unknown: assume it is complete.

    The believed complete graph has a single class of size n_units with
    common degree n_units - 1, so tables are indexed by the full
    assignment and the whole space must fit the oracle budget.
    """

    def __init__(
        self,
        horizon,
        delta=None,
        use_practical_delta=False,
        oracle_mode="auto",
        oracle_budget=DEFAULT_ENUM_BUDGET,
        oracle_restarts=DEFAULT_RESTARTS,
    ):
        super().__init__(
            horizon,
            delta=delta,
            use_practical_delta=use_practical_delta,
            oracle_mode=oracle_mode,
            oracle_budget=oracle_budget,
            oracle_restarts=oracle_restarts,
        )

    def _believed(self, instance):
        if instance.k**instance.n_units > self.oracle_budget:
            raise TooLargeError("assignment space exceeds the oracle budget")
        return complete_graph(instance.n_units)
