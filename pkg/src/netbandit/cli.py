"""Command line front end: run experiments, sweep sizes, inspect graphs."""

import functools

import click

from . import __version__
from .env import BanditInstance, save_instance
from .errors import NetbanditError
from .graph import greedy_square_coloring, load_graph, neighborhood_partition
from .harness import ExperimentConfig, emit_results, emit_sweep, run_experiment, sweep_n
from .instances import confusing_instance, needle_instance, random_instance, star_instance
from .pucb import build_init_schedule


def _friendly(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NetbanditError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
@click.version_option(__version__)
def main():
    """Bandit experiments on interference graphs."""


def _load_config(path, oracle, fixed_instance):
    config = ExperimentConfig.from_json(path)
    if oracle is not None:
        config.oracle = {**config.oracle, "mode": oracle}
    if fixed_instance:
        config.fixed_instance = True
    return config


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--workers", default=1, show_default=True)
@click.option("--oracle", type=click.Choice(["exact", "local", "auto"]), default=None)
@click.option("--fixed-instance", is_flag=True, help="Reuse the run-0 instance for every run.")
@_friendly
def run(config_path, out_dir, workers, oracle, fixed_instance):
    """Run every configured algorithm and write results under OUT."""
    config = _load_config(config_path, oracle, fixed_instance)
    result = run_experiment(config, workers=workers)
    emit_results(result, out_dir)
    for label, agg in result.algorithms.items():
        if agg.skipped is not None:
            click.echo(f"{label}: skipped ({agg.skipped})")
        else:
            click.echo(
                f"{label}: final regret {agg.final_mean:.4f} "
                f"+/- {agg.final_stderr:.4f} over {agg.n_runs} runs"
            )
    click.echo(f"results written to {out_dir}")


@main.command("sweep-n")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--n-values", required=True, help="Comma-separated unit counts, e.g. 4,6,8.")
@click.option("--workers", default=1, show_default=True)
@_friendly
def sweep_n_cmd(config_path, out_dir, n_values, workers):
    """Rerun the config across unit counts with horizon 10 * k**n."""
    config = ExperimentConfig.from_json(config_path)
    values = [int(v) for v in n_values.split(",")]
    results = sweep_n(config, values, workers=workers)
    emit_sweep(results, out_dir)
    for n in sorted(results):
        for label, agg in results[n].algorithms.items():
            if agg.skipped is None:
                click.echo(f"n={n} {label}: final regret {agg.final_mean:.4f}")
            else:
                click.echo(f"n={n} {label}: skipped ({agg.skipped})")
    click.echo(f"sweep written to {out_dir}")


@main.command("graph-info")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("-k", "--arms", default=2, show_default=True, help="Arms per unit for round counts.")
@_friendly
def graph_info(graph_path, arms):
    """Print partition, coloring, and initialization stats for a graph file."""
    graph = load_graph(graph_path)
    partition = neighborhood_partition(graph)
    coloring = greedy_square_coloring(graph)
    schedule = build_init_schedule(graph, coloring, arms)
    click.echo(f"units: {graph.n_units}")
    click.echo(f"edges: {graph.n_edges}")
    click.echo(f"max degree: {graph.max_degree}")
    click.echo(f"partition classes: {partition.n_classes}")
    for members, degree in zip(partition.classes, partition.common_degrees):
        click.echo(f"  {list(members)} (degree {degree})")
    click.echo(f"colors: {coloring.n_colors}")
    for members in coloring.color_classes:
        click.echo(f"  {list(members)}")
    click.echo(f"config space size (k={arms}): {partition.config_space_size(arms)}")
    click.echo(f"init rounds (k={arms}): {schedule.n_rounds}")


@main.command("gen-instance")
@click.option(
    "--type",
    "kind",
    required=True,
    type=click.Choice(["random", "needle", "star", "confusing"]),
)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--graph", "graph_path", type=click.Path(exists=True), help="All types but star.")
@click.option("-k", "--arms", default=2, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--noise-sd", default=1.0, show_default=True)
@click.option("--horizon", default=None, type=int, help="Gap calibration for needle/confusing.")
@click.option("--gap-scale", default=1.0, show_default=True, help="For needle/confusing.")
@click.option("--decoy", default=None, help="Comma-separated decoy arms for confusing.")
@click.option("--n-leaves", default=4, show_default=True, help="For star.")
@click.option("--gap", default=0.25, show_default=True, help="For star.")
@_friendly
def gen_instance(kind, out_path, graph_path, arms, seed, noise_sd, horizon, gap_scale, decoy, n_leaves, gap):
    """Generate an instance file for later runs."""
    if kind == "star":
        instance = star_instance(n_leaves, arms, gap, seed=seed)
    else:
        if graph_path is None:
            raise click.UsageError(f"--graph is required for type '{kind}'")
        graph = load_graph(graph_path)
        if kind == "random":
            instance = random_instance(graph, arms, seed, noise_sd=noise_sd)
        else:
            if horizon is None:
                raise click.UsageError(f"--horizon is required for type '{kind}'")
            instance = needle_instance(graph, arms, horizon, gap_scale)
            if kind == "confusing":
                if decoy is None:
                    raise click.UsageError("--decoy is required for type 'confusing'")
                instance = confusing_instance(instance, [int(v) for v in decoy.split(",")])
    if noise_sd != 1.0 and instance.noise_sd != noise_sd:
        instance = BanditInstance(instance.graph, instance.k, instance.means, noise_sd=noise_sd)
    save_instance(instance, out_path)
    click.echo(f"wrote {kind} instance ({instance.graph.n_units} units, k={instance.k}) to {out_path}")


if __name__ == "__main__":
    main()
