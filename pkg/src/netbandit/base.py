"""Shared machinery for the treatment-assignment policies.

Policies follow the scikit-learn estimator protocol: hyperparameters are
stored verbatim by ``__init__`` (so ``get_params`` / ``set_params`` /
``clone`` work), ``fit(instance, rng)`` simulates the full interaction
loop, and results land on trailing-underscore attributes, chiefly
``trace_``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator

from .env import RegretTrace


def as_generator(rng):
    """Accept a Generator, SeedSequence, int seed, or None (seed 0)."""
    if rng is None:
        return np.random.default_rng(0)
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def resolve_log_confidence(delta, use_practical, n_units, horizon, config_space_size):
    """Confidence level as (delta, log(2/delta)).

    Priority: an explicit delta wins; otherwise the practical flag selects
    log(2/delta) = (n_units/5) * log(50); otherwise the default is
    delta = 1 / (horizon**2 * n_units * config_space_size), the level under
    which a union bound over all rounds and class configurations holds.
    """
    if delta is not None:
        delta = float(delta)
        if not 0.0 < delta <= 2.0:
            raise ValueError("delta must lie in (0, 2]")
        return delta, math.log(2.0 / delta)
    if use_practical:
        log_term = (n_units / 5.0) * math.log(50.0)
        return 2.0 * math.exp(-log_term), log_term
    delta = 1.0 / (float(horizon) ** 2 * n_units * config_space_size)
    return delta, math.log(2.0 / delta)


class BanditPolicy(BaseEstimator):
    """Base class for online treatment-assignment policies."""

    def fit(self, instance, rng=None):
        raise NotImplementedError

    def _finish(self, instantaneous):
        self.trace_ = RegretTrace.from_instantaneous(instantaneous)
        return self
