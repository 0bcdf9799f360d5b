"""Command line interface: run experiments, verify learned networks against
a target, export benchmark instances, and serve the live session service.

Exit codes: 0 success, 2 collapse in any run (or failed verification),
3 configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import benchmarks
from .acquisition import (
    AcquisitionConfig,
    Algorithm,
    FindScopeVariant,
    Status,
    networks_equivalent,
    run as run_acquisition,
)
from .harness import ExperimentPlan, run_experiment
from .model import Instance, _constraint_from_dict
from .oracle import SimulatedOracle
from .solver import QGenMode, SearchConfig, ValHeuristic, VarHeuristic

_ALGOS = {"quacq": Algorithm.QUACQ, "multiacq": Algorithm.MULTIACQ, "mquacq": Algorithm.MQUACQ}
_VARS = {h.value: h for h in VarHeuristic}
_VALS = {h.value: h for h in ValHeuristic}


def _fail_config(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(3)


@click.group()
def main():
    """Constraint-acquisition workbench."""


@main.command("run")
@click.option("--benchmark", default=None, help="benchmark name (see `acqlab benchmarks`)")
@click.option("--instance", "instance_path", type=click.Path(exists=True), default=None,
              help="instance file to run instead of a named benchmark")
@click.option("--size", type=int, default=None, help="size parameter where the family takes one")
@click.option("--algo", type=click.Choice(sorted(_ALGOS)), default="mquacq")
@click.option("--findscope", type=click.Choice(["1", "2"]), default="2")
@click.option("--qgen", type=click.Choice(["max", "maxb"]), default="max")
@click.option("--var", "var_h", type=click.Choice(sorted(_VARS)), default=None,
              help="variable ordering (default: domwdeg for max, bdeg for maxb)")
@click.option("--val", "val_h", type=click.Choice(sorted(_VALS)), default="random")
@click.option("--cutmin", type=float, default=1.0, help="first query-generation cutoff (secs)")
@click.option("--cutmax", type=float, default=5.0, help="second query-generation cutoff (secs)")
@click.option("--runs", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--language-level", type=int, default=1, help="bias-size sweep level (1 = problem language)")
@click.option("--out", type=click.Path(), default=None, help="report path (.csv with .json mirror, or .json)")
@click.option("--curves", is_flag=True, help="sample (queries, |C_L|, elapsed) after each learned constraint")
def run_cmd(benchmark, instance_path, size, algo, findscope, qgen, var_h, val_h,
            cutmin, cutmax, runs, seed, language_level, out, curves):
    """Run seeded acquisition experiments on a benchmark or instance file."""
    if (benchmark is None) == (instance_path is None):
        _fail_config("give exactly one of --benchmark or --instance")
    instance = None
    params = {}
    if instance_path is not None:
        try:
            instance = Instance.load(instance_path)
        except (ValueError, KeyError) as exc:
            _fail_config(f"bad instance file: {exc}")
        benchmark = instance.name or Path(instance_path).stem
    if size is not None:
        size_key = {"latin": "n", "examtt": "courses", "rlfap": "n", "golomb": "marks", "sudoku": "box"}
        if benchmark not in size_key:
            _fail_config(f"benchmark {benchmark!r} takes no --size")
        params[size_key[benchmark]] = size
    mode = QGenMode.MAX_B_PARTIAL if qgen == "maxb" else QGenMode.MAX_COMPLETE
    if var_h is None:
        var_h = "bdeg" if qgen == "maxb" else "domwdeg"
    if runs < 1:
        _fail_config("--runs must be at least 1")
    try:
        search = SearchConfig(
            var_heuristic=_VARS[var_h],
            val_heuristic=_VALS[val_h],
            cut_min=cutmin,
            cut_max=cutmax,
            mode=mode,
        )
    except ValueError as exc:
        _fail_config(str(exc))
    config = AcquisitionConfig(
        algorithm=_ALGOS[algo],
        findscope_variant=FindScopeVariant.V2 if findscope == "2" else FindScopeVariant.V1,
        search=search,
    )
    plan = ExperimentPlan(
        benchmark=benchmark,
        params=params,
        config=config,
        runs=runs,
        master_seed=seed,
        curves=curves,
        language_level=language_level,
    )
    try:
        report = run_experiment(plan, instance=instance)
    except (benchmarks.UnknownBenchmark, benchmarks.InvalidParams) as exc:
        _fail_config(str(exc))
    agg = report.aggregate()
    click.echo(f"{plan.fingerprint()}")
    click.echo(
        f"runs={agg['runs']} statuses={agg['statuses']} "
        f"#q={agg['total_queries_mean']:.1f}±{agg['total_queries_std']:.1f} "
        f"|C_L|={agg['learned_size_mean']:.1f} q̄={agg['avg_query_size_mean']:.1f} "
        f"#q_c={agg['complete_queries_mean']:.1f} T̄={agg['avg_wait_mean']:.3f}s "
        f"Tmax={agg['max_wait_mean']:.2f}s Ttotal={agg['total_time_mean']:.2f}s"
    )
    if out:
        report.write(out)
        click.echo(f"report written to {out}")
    sys.exit(2 if report.any_collapse else 0)


@main.command("verify")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--learned", "learned_path", type=click.Path(exists=True), default=None,
              help="instance file or JSON constraint list holding the learned network; "
                   "defaults to the `learned` field of the instance file, else a fresh run")
@click.option("--budget", type=float, default=10.0, help="per-implication solver budget (secs)")
@click.option("--seed", type=int, default=0)
def verify_cmd(instance_path, learned_path, budget, seed):
    """Check mutual entailment between a learned network and the target."""
    doc = json.loads(Path(instance_path).read_text())
    try:
        inst = Instance.from_dict(doc)
    except (ValueError, KeyError) as exc:
        _fail_config(f"bad instance file: {exc}")
    learned = None
    if learned_path is not None:
        ldoc = json.loads(Path(learned_path).read_text())
        if isinstance(ldoc, list):
            learned = [_constraint_from_dict(d) for d in ldoc]
        else:
            learned = [_constraint_from_dict(d) for d in ldoc.get("target", ldoc.get("learned", []))]
    elif "learned" in doc:
        learned = [_constraint_from_dict(d) for d in doc["learned"]]
    if learned is None:
        click.echo("no learned network given; acquiring one with the simulated oracle")
        config = AcquisitionConfig(search=SearchConfig(cut_min=0.5, cut_max=2.0, rng_seed=seed))
        oracle = SimulatedOracle(inst.target, inst.vocabulary.n_variables)
        outcome = run_acquisition(inst, oracle, config)
        click.echo(f"acquisition: {outcome.status.value}, |C_L|={len(outcome.learned)}, "
                   f"#q={outcome.metrics.total_queries}")
        if outcome.status is Status.COLLAPSE:
            sys.exit(2)
        learned = list(outcome.learned)
    ok = networks_equivalent(inst.vocabulary, learned, inst.target, budget=budget)
    click.echo("equivalent" if ok else "NOT equivalent")
    sys.exit(0 if ok else 2)


@main.command("export")
@click.option("--benchmark", required=True)
@click.option("--size", type=int, default=None)
@click.option("--language-level", type=int, default=1)
@click.option("--out", required=True, type=click.Path())
def export_cmd(benchmark, size, language_level, out):
    """Write a benchmark instance to the JSON instance format."""
    params = {}
    if size is not None:
        size_key = {"latin": "n", "examtt": "courses", "rlfap": "n", "golomb": "marks", "sudoku": "box"}
        if benchmark not in size_key:
            _fail_config(f"benchmark {benchmark!r} takes no --size")
        params[size_key[benchmark]] = size
    try:
        inst = benchmarks.build(benchmark, language_level=language_level, **params)
    except (benchmarks.UnknownBenchmark, benchmarks.InvalidParams) as exc:
        _fail_config(str(exc))
    inst.dump(out)
    bias = inst.build_bias()
    click.echo(
        f"{inst.name}: |X|={inst.vocabulary.n_variables} |C_T|={len(inst.target)} "
        f"|B|={len(bias)} -> {out}"
    )


@main.command("benchmarks")
def benchmarks_cmd():
    """List available benchmark names."""
    for name in benchmarks.names():
        click.echo(name)


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--ui", "ui_dir", type=click.Path(exists=True), default=None,
              help="directory with the built web client (e.g. frontend/)")
def serve_cmd(host, port, ui_dir):
    """Serve the live-session API (and the web UI when built)."""
    import uvicorn

    from .session import create_app

    uvicorn.run(create_app(static_dir=ui_dir), host=host, port=port)


if __name__ == "__main__":
    main()
