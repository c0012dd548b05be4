"""Multi-armed bandits on interference graphs.

Units sit on a graph; each round every unit pulls an arm and its mean
reward depends on its own arm and its neighbors' arms.  The package
provides the partition-level UCB policy built on neighborhood
equivalence classes, an unknown-graph variant, classical and
combinatorial UCB baselines, explore-then-commit, action elimination,
hard problem instances, and a reproducible experiment harness.
"""

__version__ = "0.1.0"

from .baselines import (
    ActionElimination,
    ClassicalUCB,
    CombinatorialUCB,
    NetworkExploreThenCommit,
)
from .env import (
    BanditInstance,
    LocalConfigCodec,
    RegretTrace,
    enumerate_assignments,
    lex_rank,
    load_instance,
    local_config_of,
    optimal_assignment,
    save_instance,
)
from .graph import (
    InterferenceGraph,
    NeighborhoodPartition,
    SquareColoring,
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
from .harness import ExperimentConfig, emit_results, emit_sweep, run_experiment, sweep_n
from .instances import confusing_instance, needle_instance, random_instance, star_instance
from .oracle import brute_force_argmax, coordinate_ascent_argmax, maximize
from .pucb import (
    CountTable,
    PartitionedUCB,
    UnknownGraphUCB,
    build_init_schedule,
    count_confidence_violations,
    partition_ucb,
    select_treatment,
    ucb_score_tables,
    update_counts,
)

__all__ = [
    "ActionElimination",
    "BanditInstance",
    "ClassicalUCB",
    "CombinatorialUCB",
    "CountTable",
    "ExperimentConfig",
    "InterferenceGraph",
    "LocalConfigCodec",
    "NeighborhoodPartition",
    "NetworkExploreThenCommit",
    "PartitionedUCB",
    "RegretTrace",
    "SquareColoring",
    "UnknownGraphUCB",
    "__version__",
    "brute_force_argmax",
    "build_graph",
    "build_init_schedule",
    "clique_sparse_graph",
    "complete_graph",
    "confusing_instance",
    "coordinate_ascent_argmax",
    "count_confidence_violations",
    "emit_results",
    "emit_sweep",
    "enumerate_assignments",
    "greedy_square_coloring",
    "is_doubly_independent",
    "lex_rank",
    "load_graph",
    "load_instance",
    "local_config_of",
    "maximize",
    "needle_instance",
    "neighborhood_partition",
    "optimal_assignment",
    "partition_ucb",
    "random_bounded_degree_graph",
    "random_instance",
    "run_experiment",
    "save_graph",
    "save_instance",
    "select_treatment",
    "star_instance",
    "sweep_n",
    "ucb_score_tables",
    "update_counts",
]
