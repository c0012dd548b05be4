"""Instance generators: random tables and calibrated hard cases.

The hard cases hide their optimum behind a single rewarded local pattern
whose gap is sized against the horizon, so that distinguishing it from
flat-zero tables is statistically expensive.
"""

from __future__ import annotations

import math

import numpy as np

from .env import BanditInstance
from .errors import DecoyArmError, HorizonTooShortError
from .graph import build_graph, neighborhood_partition


def _rng_from(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_instance(graph, k, seed, noise_sd=1.0):
    """Independent uniform [0, 1] mean for every unit and local configuration."""
    rng = _rng_from(seed)
    means = [rng.random(k ** (graph.degree(i) + 1)) for i in range(graph.n_units)]
    return BanditInstance(graph, k, means, noise_sd=noise_sd)


def _all_ones_code(k, degree):
    # every digit of the closed neighborhood set to arm 1
    return (k ** (degree + 1) - 1) // (k - 1)


def needle_instance(graph, k, horizon, gap_scale=1.0):
    """Zero reward except when a unit's whole neighborhood plays arm 1.

    Unit i earns gap_i = gap_scale * sqrt((k-1)**(D_j+1) / (horizon * M * m_j))
    exactly at its all-ones local configuration, where j is its class, M
    the class count, and m_j the class size.  The horizon must satisfy
    horizon >= 4 * (k-1)**(max_degree+1) / M so every gap stays below 1/2;
    the unique optimum is then the all-ones assignment.
    """
    k = int(k)
    if not 0.0 < gap_scale <= 1.0:
        raise ValueError("gap_scale must lie in (0, 1]")
    partition = neighborhood_partition(graph)
    m_count = partition.n_classes
    threshold = 4.0 * (k - 1) ** (graph.max_degree + 1) / m_count
    if horizon < threshold:
        raise HorizonTooShortError(
            f"horizon {horizon} below {threshold:.6g}; gaps would exceed 1/2"
        )
    means = []
    for i in range(graph.n_units):
        j = int(partition.class_of[i])
        d = partition.common_degrees[j]
        gap = gap_scale * math.sqrt(
            (k - 1) ** (d + 1) / (horizon * m_count * partition.sizes[j])
        )
        table = np.zeros(k ** (d + 1))
        table[_all_ones_code(k, d)] = gap
        means.append(table)
    return BanditInstance(graph, k, means)


def confusing_instance(base, decoy):
    """Variant of a needle instance whose best assignment is a decoy.

    The decoy must assign no unit arm 1.  Wherever a unit's local
    configuration matches the decoy, its mean doubles the needle gap, so
    the decoy strictly dominates the all-ones pattern while every
    assignment mixing the two stays below it.
    """
    graph, k = base.graph, base.k
    decoy = np.asarray(decoy, dtype=np.int64)
    if decoy.shape != (graph.n_units,):
        raise ValueError(f"decoy must have shape ({graph.n_units},)")
    if decoy.min(initial=0) < 0 or decoy.max(initial=0) >= k:
        raise ValueError(f"decoy arms must lie in [0, {k})")
    if (decoy == 1).any():
        raise DecoyArmError("the decoy may not assign arm 1 to any unit")
    means = []
    decoy_codes = base.codec.codes(decoy)
    for i in range(graph.n_units):
        table = base.means[i].copy()
        gap = table[_all_ones_code(k, graph.degree(i))]
        table[decoy_codes[i]] = 2.0 * gap
        means.append(table)
    return BanditInstance(graph, k, means, noise_sd=base.noise_sd)


def star_instance(n_leaves, k, gap, seed=0):
    """Star graph whose center hides one slightly better configuration.

    Leaves earn a flat 1/2; the center earns 1/2 everywhere except one
    uniformly chosen configuration worth 1/2 + gap.
    """
    n_leaves = int(n_leaves)
    k = int(k)
    if n_leaves < 0:
        raise ValueError("n_leaves must be nonnegative")
    if not 0.0 < gap <= 0.5:
        raise ValueError("gap must lie in (0, 1/2]")
    rng = _rng_from(seed)
    graph = build_graph(n_leaves + 1, [(0, leaf) for leaf in range(1, n_leaves + 1)])
    center = np.full(k ** (n_leaves + 1), 0.5)
    center[int(rng.integers(len(center)))] = 0.5 + gap
    means = [center] + [np.full(k**2, 0.5) for _ in range(n_leaves)]
    return BanditInstance(graph, k, means)
