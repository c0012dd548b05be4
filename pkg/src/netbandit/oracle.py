"""Linear-maximization oracles over per-unit score tables.

Given one score table per unit (indexed by local configuration code), the
oracle finds the assignment maximizing the sum of per-unit scores.  The
exact path enumerates assignments with a mixed-radix reflected Gray code
so each step flips a single unit's arm and touches only the tables of that
unit's closed neighborhood; the fallback is restarted coordinate ascent.
"""

from __future__ import annotations

import numpy as np

from .env import DEFAULT_ENUM_BUDGET, LocalConfigCodec, enumerate_assignments, lex_rank
from .errors import TooLargeError

DEFAULT_RESTARTS = 16
ORACLE_MODES = ("exact", "local", "auto")


def _flat_tables(codec, tables):
    if isinstance(tables, np.ndarray) and tables.ndim == 1:
        flat = tables
        if flat.shape != (codec.flat_size,):
            raise ValueError("flat score table has the wrong length")
    else:
        if len(tables) != codec.graph.n_units:
            raise ValueError("one score table per unit required")
        for i, t in enumerate(tables):
            if np.shape(t) != (int(codec.table_sizes[i]),):
                raise ValueError(f"unit {i} score table must have length {codec.table_sizes[i]}")
        flat = np.concatenate([np.asarray(t, dtype=np.float64) for t in tables])
    if not np.all(np.isfinite(flat)):
        raise ValueError("score tables must be finite")
    return flat


def _refold(flat, codes):
    total = 0.0
    for c in codes:
        total += flat[c]
    return float(total)


def resolve_oracle_method(mode, n_units, k, budget=DEFAULT_ENUM_BUDGET):
    """Which path ``maximize`` takes: "exact" or "local"."""
    if mode not in ORACLE_MODES:
        raise ValueError(f"mode must be one of {ORACLE_MODES}")
    if mode == "auto":
        return "exact" if k**n_units <= budget else "local"
    return mode


class ExhaustiveEvaluator:
    """Exact maximizer backed by a precomputed code matrix.

    Enumerates all assignments once per (graph, k) and answers repeated
    argmax queries with vectorized table gathers.  Totals accumulate unit
    by unit, matching ``BanditInstance.expected_total_reward`` bit for bit.
    """

    def __init__(self, graph, k, budget=DEFAULT_ENUM_BUDGET):
        count = k**graph.n_units
        if count > budget:
            raise TooLargeError(f"{count} assignments exceed budget {budget}")
        self.graph = graph
        self.k = int(k)
        self.codec = LocalConfigCodec(graph, k)
        self.assignments = enumerate_assignments(graph.n_units, k)
        self._flat_codes = self.codec.flat_codes_batch(self.assignments)

    def totals(self, tables):
        flat = _flat_tables(self.codec, tables)
        out = np.zeros(len(self.assignments))
        for i in range(self.graph.n_units):
            out += flat[self._flat_codes[:, i]]
        return out

    def argmax(self, tables):
        """Best assignment and value; first (lexicographically smallest) among ties."""
        totals = self.totals(tables)
        idx = int(np.argmax(totals))
        return self.assignments[idx].astype(np.int64), float(totals[idx])

    def rank_of(self, assignment):
        return lex_rank(assignment, self.k)


def brute_force_argmax(graph, k, tables, budget=DEFAULT_ENUM_BUDGET):
    """Exact argmax by Gray-code enumeration with incremental re-evaluation.

    Consecutive assignments differ in one unit's arm, so each step adjusts
    only the scores of that unit's closed neighborhood.  Candidate bests
    are re-evaluated from scratch before acceptance, which keeps the
    returned value free of accumulated rounding and makes tie-breaking
    (lexicographically smallest assignment) exact.
    """
    n = graph.n_units
    k = int(k)
    if k**n > budget:
        raise TooLargeError(f"{k ** n} assignments exceed budget {budget}")
    codec = LocalConfigCodec(graph, k)
    flat = _flat_tables(codec, tables).tolist()
    influence = codec.influence
    offsets = codec.offsets

    codes = [int(offsets[i]) for i in range(n)]
    total = 0.0
    for c in codes:
        total += flat[c]
    best_val = total
    best = (0,) * n
    margin = 1e-9 * max(1, n)

    a = [0] * n
    direction = [1] * n
    focus = list(range(n + 1))
    while True:
        j = focus[0]
        focus[0] = 0
        if j == n:
            break
        d = direction[j]
        a[j] += d
        if a[j] == 0 or a[j] == k - 1:
            direction[j] = -d
            focus[j] = focus[j + 1]
            focus[j + 1] = j + 1
        for i, w in influence[j]:
            c = codes[i] + d * w
            total += flat[c] - flat[codes[i]]
            codes[i] = c
        if total >= best_val - margin:
            exact = 0.0
            for c in codes:
                exact += flat[c]
            if exact > best_val or (exact == best_val and tuple(a) < best):
                best_val = exact
                best = tuple(a)
    return np.array(best, dtype=np.int64), float(best_val)


def coordinate_ascent_argmax(graph, k, tables, restarts=DEFAULT_RESTARTS, rng=None):
    """Restarted coordinate ascent over assignments.

    Each sweep sets every unit's arm to the choice maximizing the total
    score given the rest (smallest arm among ties) and stops once a full
    sweep changes nothing.  Never beats the exhaustive maximum.
    """
    if restarts < 1:
        raise ValueError("restarts must be positive")
    n = graph.n_units
    k = int(k)
    rng = np.random.default_rng(0) if rng is None else rng
    codec = LocalConfigCodec(graph, k)
    flat = _flat_tables(codec, tables).tolist()
    influence = codec.influence
    offsets = codec.offsets

    best = None
    best_val = -np.inf
    starts = rng.integers(0, k, size=(restarts, n))
    for start in starts:
        a = [int(x) for x in start]
        codes = [int(c) for c in codec.flat_codes(a)]
        while True:
            changed = False
            for u in range(n):
                cur = a[u]
                scores = []
                for v in range(k):
                    shift = v - cur
                    s = 0.0
                    for i, w in influence[u]:
                        s += flat[codes[i] + shift * w]
                    scores.append(s)
                pick = max(range(k), key=lambda v: (scores[v], -v))
                if pick != cur:
                    shift = pick - cur
                    for i, w in influence[u]:
                        codes[i] += shift * w
                    a[u] = pick
                    changed = True
            if not changed:
                break
        value = 0.0
        for c in codes:
            value += flat[c]
        if value > best_val or (value == best_val and (best is None or tuple(a) < best)):
            best_val = value
            best = tuple(a)
    return np.array(best, dtype=np.int64), float(best_val)


def maximize(
    graph,
    k,
    tables,
    mode="auto",
    budget=DEFAULT_ENUM_BUDGET,
    restarts=DEFAULT_RESTARTS,
    rng=None,
):
    """Dispatch to the exact or local-search oracle according to ``mode``."""
    method = resolve_oracle_method(mode, graph.n_units, k, budget)
    if method == "exact":
        return brute_force_argmax(graph, k, tables, budget)
    return coordinate_ascent_argmax(graph, k, tables, restarts, rng)
