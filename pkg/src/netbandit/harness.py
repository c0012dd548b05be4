"""Reproducible regret experiments over a roster of policies.

Seeding scheme: all randomness derives from ``base_seed`` through numpy
SeedSequence spawn keys, one stream per purpose --

* instance of run r:    spawn_key (1, r)   (or (1, 0) with fixed_instance)
* algorithm a of run r: spawn_key (2, r, a)
* per-n derivations in sweeps: spawn keys (3, n) / (4, n)

so every algorithm consumes an independent stream and reruns of the same
config are bit-identical, regardless of worker count.
"""

from __future__ import annotations

import hashlib
import inspect
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import ActionElimination, ClassicalUCB, CombinatorialUCB, NetworkExploreThenCommit
from .env import BanditInstance
from .errors import ConfigError, InvalidColoringError, TooLargeError
from .graph import (
    InterferenceGraph,
    build_graph,
    clique_sparse_graph,
    greedy_square_coloring,
    is_doubly_independent,
    load_graph,
    neighborhood_partition,
    random_bounded_degree_graph,
)
from .instances import confusing_instance, needle_instance, random_instance
from .pucb import PartitionedUCB, UnknownGraphUCB, build_init_schedule

ALGORITHMS = {
    "partitioned_ucb": PartitionedUCB,
    "unknown_graph_ucb": UnknownGraphUCB,
    "classical_ucb": ClassicalUCB,
    "combinatorial_ucb": CombinatorialUCB,
    "network_etc": NetworkExploreThenCommit,
    "action_elimination": ActionElimination,
}

GRAPH_GENERATORS = {
    "random_bounded_degree": random_bounded_degree_graph,
    "clique_sparse": clique_sparse_graph,
}


def stream(base_seed, *key):
    """Independent generator for one purpose; see the module docstring."""
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=key))


def _child_seed(base_seed, *key):
    return int(np.random.SeedSequence(base_seed, spawn_key=key).generate_state(1, np.uint64)[0])


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce an experiment."""

    graph: dict
    horizon: int
    k: int = 2
    n_runs: int = 1
    base_seed: int = 0
    noise_sd: float = 1.0
    instances: dict = field(default_factory=lambda: {"generator": "random", "params": {}})
    fixed_instance: bool = False
    oracle: dict = field(default_factory=lambda: {"mode": "auto"})
    algorithms: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, payload):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(payload) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "graph" not in payload or "horizon" not in payload:
            raise ConfigError("config requires at least 'graph' and 'horizon'")
        return cls(**payload)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {
            "graph": self.graph,
            "horizon": self.horizon,
            "k": self.k,
            "n_runs": self.n_runs,
            "base_seed": self.base_seed,
            "noise_sd": self.noise_sd,
            "instances": self.instances,
            "fixed_instance": self.fixed_instance,
            "oracle": self.oracle,
            "algorithms": self.algorithms,
        }


def resolve_graph(spec):
    """Build the experiment graph from a file, inline edges, or a generator."""
    if "file" in spec:
        return load_graph(spec["file"])
    if "edges" in spec:
        return build_graph(spec["n"], spec["edges"])
    if "generator" in spec:
        name = spec["generator"]
        if name not in GRAPH_GENERATORS:
            raise ConfigError(f"unknown graph generator '{name}'")
        return GRAPH_GENERATORS[name](**spec.get("params", {}))
    raise ConfigError("graph spec needs 'file', 'edges', or 'generator'")


def graph_report(graph, k):
    """Structural metadata recorded in the manifest; validates the structures."""
    partition = neighborhood_partition(graph)
    cover = sorted(i for members in partition.classes for i in members)
    if cover != list(range(graph.n_units)):
        raise InvalidColoringError("partition classes must cover every unit exactly once")
    coloring = greedy_square_coloring(graph)
    for members in coloring.color_classes:
        if not is_doubly_independent(graph, members):
            raise InvalidColoringError(f"color class {members} is not doubly independent")
    if coloring.n_colors > graph.max_degree**2 + 1:
        raise InvalidColoringError("color count exceeds max_degree**2 + 1")
    schedule = build_init_schedule(graph, coloring, k)
    return {
        "n_units": graph.n_units,
        "n_edges": graph.n_edges,
        "max_degree": graph.max_degree,
        "n_classes": partition.n_classes,
        "class_sizes": list(partition.sizes),
        "n_colors": coloring.n_colors,
        "init_rounds": schedule.n_rounds,
    }


def make_instance(config, graph, rng):
    spec = config.instances
    name = spec.get("generator", "random")
    params = dict(spec.get("params", {}))
    if name == "random":
        return random_instance(graph, config.k, rng, noise_sd=config.noise_sd)
    if name == "needle":
        inst = needle_instance(
            graph, config.k, params.get("horizon", config.horizon), params.get("gap_scale", 1.0)
        )
    elif name == "confusing":
        base = needle_instance(
            graph, config.k, params.get("horizon", config.horizon), params.get("gap_scale", 1.0)
        )
        inst = confusing_instance(base, params["decoy"])
    else:
        raise ConfigError(f"unknown instance generator '{name}'")
    if config.noise_sd != 1.0:
        inst = BanditInstance(graph, config.k, inst.means, noise_sd=config.noise_sd)
    return inst


def _jsonable(value):
    if isinstance(value, InterferenceGraph):
        return {"n": value.n_units, "edges": value.edges()}
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer, np.floating)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def config_digest(params):
    canonical = json.dumps(_jsonable(params), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def build_policy(spec, config):
    name = spec.get("name")
    if name not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm '{name}'")
    cls = ALGORITHMS[name]
    accepted = set(inspect.signature(cls.__init__).parameters) - {"self"}
    params = {"horizon": config.horizon}
    for key in ("oracle_mode", "oracle_budget", "oracle_restarts"):
        short = key.removeprefix("oracle_")
        if key in accepted and short in config.oracle:
            params[key] = config.oracle[short]
    overrides = spec.get("params", {})
    unknown = set(overrides) - accepted
    if unknown:
        raise ConfigError(f"algorithm '{name}' does not accept {sorted(unknown)}")
    params.update(overrides)
    return cls(**params)


@dataclass
class RunOutcome:
    label: str
    run: int
    seed_key: tuple
    config_digest: str
    skipped: str = None
    init_rounds: int = 0
    oracle_method: str = None
    instantaneous: np.ndarray = None
    cumulative: np.ndarray = None


def _labels(config):
    labels = [spec.get("label", spec["name"]) for spec in config.algorithms]
    if len(set(labels)) != len(labels):
        raise ConfigError("algorithm labels must be unique; add 'label' keys")
    return labels


def execute_run(config_dict, run_idx):
    """All algorithms of one run; module-level so worker processes can import it."""
    config = ExperimentConfig.from_dict(config_dict)
    graph = resolve_graph(config.graph)
    instance_run = 0 if config.fixed_instance else run_idx
    instance = make_instance(config, graph, stream(config.base_seed, 1, instance_run))
    outcomes = []
    for a_idx, spec in enumerate(config.algorithms):
        label = spec.get("label", spec["name"])
        policy = build_policy(spec, config)
        digest = config_digest({"name": spec["name"], **policy.get_params()})
        outcome = RunOutcome(
            label=label, run=run_idx, seed_key=(2, run_idx, a_idx), config_digest=digest
        )
        try:
            policy.fit(instance, stream(config.base_seed, 2, run_idx, a_idx))
        except TooLargeError as exc:
            outcome.skipped = str(exc)
        else:
            outcome.init_rounds = int(getattr(policy, "n_init_rounds_", 0))
            outcome.oracle_method = getattr(policy, "oracle_method_", None)
            outcome.instantaneous = policy.trace_.instantaneous
            outcome.cumulative = policy.trace_.cumulative
        outcomes.append(outcome)
    return outcomes


@dataclass
class AlgorithmAggregate:
    label: str
    n_runs: int
    config_digest: str
    skipped: str = None
    init_rounds: int = 0
    oracle_method: str = None
    instantaneous: np.ndarray = None  # [n_runs, horizon]
    cumulative: np.ndarray = None
    mean_cumulative: np.ndarray = None
    std_cumulative: np.ndarray = None
    per_run_final: np.ndarray = None

    @property
    def final_mean(self):
        return float(self.mean_cumulative[-1]) if self.mean_cumulative is not None else None

    @property
    def final_std(self):
        return float(self.std_cumulative[-1]) if self.std_cumulative is not None else None

    @property
    def final_stderr(self):
        return self.final_std / np.sqrt(self.n_runs) if self.final_std is not None else None

    @property
    def post_init_final_mean(self):
        if self.cumulative is None:
            return None
        start = self.cumulative[:, self.init_rounds - 1] if self.init_rounds else 0.0
        return float((self.cumulative[:, -1] - start).mean())


@dataclass
class ExperimentResult:
    config: dict
    graph_stats: dict
    algorithms: dict


def run_experiment(config, workers=1):
    """Execute every algorithm on every run and aggregate regret curves.

    Runs draw fresh instances unless ``fixed_instance`` is set; each
    algorithm sees the same per-run instance but its own stream.  Results
    are deterministic in ``base_seed`` and independent of ``workers``.
    """
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    if not config.algorithms:
        raise ConfigError("config lists no algorithms")
    labels = _labels(config)
    graph = resolve_graph(config.graph)
    stats = graph_report(graph, config.k)

    config_dict = config.to_dict()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_run = list(pool.map(execute_run, [config_dict] * config.n_runs, range(config.n_runs)))
    else:
        per_run = [execute_run(config_dict, r) for r in range(config.n_runs)]

    aggregates = {}
    for a_idx, label in enumerate(labels):
        outcomes = [row[a_idx] for row in per_run]
        first = outcomes[0]
        agg = AlgorithmAggregate(
            label=label,
            n_runs=config.n_runs,
            config_digest=first.config_digest,
            skipped=first.skipped,
            init_rounds=first.init_rounds,
            oracle_method=first.oracle_method,
        )
        if first.skipped is None:
            agg.instantaneous = np.stack([o.instantaneous for o in outcomes])
            agg.cumulative = np.stack([o.cumulative for o in outcomes])
            agg.mean_cumulative = agg.cumulative.mean(axis=0)
            agg.std_cumulative = agg.cumulative.std(axis=0)
            agg.per_run_final = agg.cumulative[:, -1].copy()
        aggregates[label] = agg

    resolved = dict(config_dict)
    resolved["graph"] = {"n": graph.n_units, "edges": graph.edges()}
    return ExperimentResult(config=resolved, graph_stats=stats, algorithms=aggregates)


def sweep_n(config, n_values, workers=1):
    """Rerun an experiment across unit counts with horizon 10 * k**n.

    The graph spec must use a generator taking ``n_units``; its seed and
    the per-n base seed derive deterministically from the configured ones.
    """
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    if "generator" not in config.graph:
        raise ConfigError("sweeps need a generator-based graph spec")
    results = {}
    for n in n_values:
        n = int(n)
        spec = {
            "generator": config.graph["generator"],
            "params": {
                **config.graph.get("params", {}),
                "n_units": n,
                "seed": _child_seed(config.base_seed, 3, n),
            },
        }
        sub = ExperimentConfig.from_dict(
            {
                **config.to_dict(),
                "graph": spec,
                "horizon": 10 * config.k**n,
                "base_seed": _child_seed(config.base_seed, 4, n),
            }
        )
        results[n] = run_experiment(sub, workers=workers)
    return results


def _fmt(value):
    return repr(float(value))


def emit_results(result, out_dir):
    """Write records.jsonl, per-run trace CSVs, aggregate.csv, and manifest.json.

    Emission is a pure function of the result: re-emitting produces
    byte-identical files.
    """
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    base_seed = result.config["base_seed"]

    records = []
    for label, agg in result.algorithms.items():
        for r in range(agg.n_runs):
            record = {
                "algorithm": label,
                "base_seed": base_seed,
                "run": r,
                "config_digest": agg.config_digest,
                "init_rounds": agg.init_rounds,
            }
            if agg.skipped is not None:
                record.update({"skipped": agg.skipped, "final_regret": None, "trace": None})
            else:
                trace_rel = f"traces/{label}_run{r:03d}.csv"
                cumulative = agg.cumulative[r]
                instantaneous = agg.instantaneous[r]
                start = cumulative[agg.init_rounds - 1] if agg.init_rounds else 0.0
                record.update(
                    {
                        "final_regret": float(cumulative[-1]),
                        "post_init_final_regret": float(cumulative[-1] - start),
                        "trace": trace_rel,
                    }
                )
                with open(out / trace_rel, "w") as fh:
                    fh.write("t,instantaneous,cumulative\n")
                    for t in range(len(cumulative)):
                        fh.write(f"{t + 1},{_fmt(instantaneous[t])},{_fmt(cumulative[t])}\n")
            records.append(record)

    with open(out / "records.jsonl", "w") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    with open(out / "aggregate.csv", "w") as fh:
        fh.write("t,algorithm,mean,std\n")
        for label, agg in result.algorithms.items():
            if agg.skipped is not None:
                continue
            for t in range(len(agg.mean_cumulative)):
                fh.write(
                    f"{t + 1},{label},{_fmt(agg.mean_cumulative[t])},{_fmt(agg.std_cumulative[t])}\n"
                )

    manifest = {
        "config": result.config,
        "package_version": __version__,
        "graph": result.graph_stats,
        "oracle_methods": {label: agg.oracle_method for label, agg in result.algorithms.items()},
        "skipped": {
            label: agg.skipped for label, agg in result.algorithms.items() if agg.skipped
        },
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def emit_sweep(results, out_dir):
    """Per-n subdirectories plus a summary CSV of final regrets."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "summary.csv", "w") as fh:
        fh.write("n_units,algorithm,final_mean,final_std,final_stderr\n")
        for n in sorted(results):
            result = results[n]
            emit_results(result, out / f"n_{n:02d}")
            for label, agg in result.algorithms.items():
                if agg.skipped is not None:
                    continue
                fh.write(
                    f"{n},{label},{_fmt(agg.final_mean)},{_fmt(agg.final_std)},"
                    f"{_fmt(agg.final_stderr)}\n"
                )
    return out
