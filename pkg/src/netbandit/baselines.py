"""Baseline policies the partitioned learner is compared against.

Two are structure-blind (classical UCB and action elimination treat each
full assignment as an opaque arm and never index state by the graph), and
two exploit the graph through per-unit tables (the per-unit UCB variant
and explore-then-commit).
"""

from __future__ import annotations

import math

import numpy as np

from .base import BanditPolicy, as_generator, resolve_log_confidence
from .env import DEFAULT_ENUM_BUDGET, enumerate_assignments
from .errors import HorizonTooShortError, TooLargeError
from .graph import greedy_square_coloring
from .oracle import (
    DEFAULT_RESTARTS,
    ExhaustiveEvaluator,
    coordinate_ascent_argmax,
    maximize,
    resolve_oracle_method,
)
from .pucb import CountTable, build_init_schedule


class ClassicalUCB(BanditPolicy):
    """UCB over the k**n_units assignments as independent arms.

    Pulls every arm once in lexicographic order, then plays the largest
    mean-of-average-rewards plus sqrt(2*log(2/delta) / (n_units * n_arm)).
    Blind to the graph: state is indexed by arm identity only.
    """

    def __init__(self, horizon, delta=None, use_practical_delta=False, arm_budget=DEFAULT_ENUM_BUDGET):
        self.horizon = horizon
        self.delta = delta
        self.use_practical_delta = use_practical_delta
        self.arm_budget = arm_budget

    def fit(self, instance, rng=None):
        rng = as_generator(rng)
        n, k = instance.n_units, instance.k
        n_arms = k**n
        if n_arms > self.arm_budget:
            raise TooLargeError(f"{n_arms} arms exceed budget {self.arm_budget}")
        horizon = int(self.horizon)
        self.delta_, self.log_term_ = resolve_log_confidence(
            self.delta, self.use_practical_delta, n, horizon, n_arms
        )
        arms = enumerate_assignments(n, k)
        totals = instance.mean_totals()
        opt_value = float(totals.max())

        counts = np.zeros(n_arms, dtype=np.int64)
        sums = np.zeros(n_arms)
        radius_coef = 2.0 * self.log_term_ / n
        instantaneous = np.empty(horizon)
        for t in range(horizon):
            if t < n_arms:
                arm = t
            else:
                arm = int(np.argmax(sums / counts + np.sqrt(radius_coef / counts)))
            rewards = instance.sample_rewards(arms[arm], rng)
            counts[arm] += 1
            sums[arm] += rewards.mean()
            instantaneous[t] = (opt_value - totals[arm]) / n

        self.n_init_rounds_ = min(n_arms, horizon)
        self.oracle_method_ = None
        self.counts_ = counts
        return self._finish(instantaneous)


class CombinatorialUCB(BanditPolicy):
    """Per-unit UCB without neighborhood pooling.

    Runs the same initialization schedule as the partitioned learner, then
    plays the oracle argmax of mean + sqrt(3*ln(t) / (2*n)) per unit and
    configuration, t counting completed rounds.
    """

    def __init__(
        self,
        horizon,
        oracle_mode="auto",
        oracle_budget=DEFAULT_ENUM_BUDGET,
        oracle_restarts=DEFAULT_RESTARTS,
        believed_graph=None,
    ):
        self.horizon = horizon
        self.oracle_mode = oracle_mode
        self.oracle_budget = oracle_budget
        self.oracle_restarts = oracle_restarts
        self.believed_graph = believed_graph

    def fit(self, instance, rng=None):
        rng = as_generator(rng)
        graph = self.believed_graph if self.believed_graph is not None else instance.graph
        if graph.n_units != instance.n_units:
            raise ValueError("believed graph must cover the same units")
        k = instance.k
        horizon = int(self.horizon)
        schedule = build_init_schedule(graph, greedy_square_coloring(graph), k)
        t0 = schedule.n_rounds
        if horizon < t0:
            raise HorizonTooShortError(f"horizon {horizon} shorter than {t0} init rounds")
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

        for t in range(t0, horizon):
            flat = counts.sums / counts.counts + np.sqrt(
                1.5 * math.log(counts.rounds) / counts.counts
            )
            if evaluator is not None:
                assignment, _ = evaluator.argmax(flat)
            else:
                assignment, _ = coordinate_ascent_argmax(graph, k, flat, self.oracle_restarts, rng)
            counts.update(assignment, instance.sample_rewards(assignment, rng))
            instantaneous[t] = (opt_value - totals[int(assignment @ reps)]) / n

        self.counts_ = counts
        return self._finish(instantaneous)


class NetworkExploreThenCommit(BanditPolicy):
    """Uniform exploration, least-squares style estimates, then commit.

    Phase one plays uniformly random assignments for ``explore_rounds``
    rounds (default ceil(T**(2/3) * (k**(max_degree+1))**(1/3))) and
    estimates every local mean by its sample average, with never-observed
    configurations estimated at 0.  Phase two commits to the oracle argmax
    of the estimates.
    """

    def __init__(
        self,
        horizon,
        explore_rounds=None,
        oracle_mode="auto",
        oracle_budget=DEFAULT_ENUM_BUDGET,
        oracle_restarts=DEFAULT_RESTARTS,
    ):
        self.horizon = horizon
        self.explore_rounds = explore_rounds
        self.oracle_mode = oracle_mode
        self.oracle_budget = oracle_budget
        self.oracle_restarts = oracle_restarts

    def fit(self, instance, rng=None):
        rng = as_generator(rng)
        graph, k = instance.graph, instance.k
        n = instance.n_units
        horizon = int(self.horizon)
        if self.explore_rounds is None:
            t1 = math.ceil(horizon ** (2 / 3) * (k ** (graph.max_degree + 1)) ** (1 / 3))
        else:
            t1 = int(self.explore_rounds)
        if not 1 <= t1 <= horizon:
            raise HorizonTooShortError(f"exploration length {t1} must lie in [1, {horizon}]")
        self.explore_rounds_ = t1

        codec = instance.codec
        arms = rng.integers(0, k, size=(t1, n), dtype=np.int64)
        flat_codes = codec.flat_codes_batch(arms)
        mean_at = instance.flat_means[flat_codes]
        rewards = mean_at + instance.noise_sd * rng.standard_normal((t1, n))

        counts = np.bincount(flat_codes.ravel(), minlength=codec.flat_size)
        sums = np.bincount(flat_codes.ravel(), weights=rewards.ravel(), minlength=codec.flat_size)
        estimates = np.divide(sums, counts, out=np.zeros(codec.flat_size), where=counts > 0)
        self.estimates_ = codec.split(estimates)
        self.explore_counts_ = codec.split(counts)

        self.oracle_method_ = resolve_oracle_method(self.oracle_mode, n, k, self.oracle_budget)
        committed, _ = maximize(
            graph,
            k,
            codec.split(estimates),
            mode=self.oracle_method_,
            budget=self.oracle_budget,
            restarts=self.oracle_restarts,
            rng=rng,
        )
        self.committed_ = committed

        totals = instance.mean_totals()
        opt_value = float(totals.max())
        reps = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
        instantaneous = np.empty(horizon)
        instantaneous[:t1] = (opt_value - totals[arms @ reps]) / n
        instantaneous[t1:] = (opt_value - totals[int(committed @ reps)]) / n
        return self._finish(instantaneous)


class ActionElimination(BanditPolicy):
    """Epoch-based elimination over the full assignment space.

    Every epoch plays each surviving assignment once (ascending order);
    after epoch e, arms whose mean + radius fall below the best
    mean - radius are dropped, radius(e) = sqrt(2*log(2*k**n*T) / (n*e)).
    Blind to the graph, like :class:`ClassicalUCB`.
    """

    def __init__(self, horizon, arm_budget=DEFAULT_ENUM_BUDGET):
        self.horizon = horizon
        self.arm_budget = arm_budget

    def fit(self, instance, rng=None):
        rng = as_generator(rng)
        n, k = instance.n_units, instance.k
        n_arms = k**n
        if n_arms > self.arm_budget:
            raise TooLargeError(f"{n_arms} arms exceed budget {self.arm_budget}")
        horizon = int(self.horizon)
        arms = enumerate_assignments(n, k)
        totals = instance.mean_totals()
        opt_value = float(totals.max())

        log_term = math.log(2.0 * n_arms * horizon)
        active = np.arange(n_arms)
        sums = np.zeros(n_arms)
        instantaneous = np.empty(horizon)
        t = 0
        epoch = 0
        while t < horizon:
            epoch += 1
            full_epoch = True
            for arm in active:
                if t == horizon:
                    full_epoch = False
                    break
                rewards = instance.sample_rewards(arms[arm], rng)
                sums[arm] += rewards.mean()
                instantaneous[t] = (opt_value - totals[arm]) / n
                t += 1
            if full_epoch and len(active) > 1:
                means = sums[active] / epoch
                radius = math.sqrt(2.0 * log_term / (n * epoch))
                keep = means + radius >= (means - radius).max()
                active = active[keep]

        self.n_epochs_ = epoch
        self.surviving_arms_ = active
        self.oracle_method_ = None
        return self._finish(instantaneous)
