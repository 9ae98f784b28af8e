"""Command-line entry point tying the modules into reproducible runs.

Every run writes a `manifest.json` (command, parameters, seed, package
version) next to its outputs; identical argv and seed produce byte-identical
files.  Errors exit with a class-specific code and a JSON line on stderr:
2 usage, 3 I/O, 4 format, 5 data/graph validation, 6 simulation, 1 other.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .citest import DataCiModel, Dataset, DecisionPolicy, ThresholdMode, \
    binarize_column
from .errors import (BudgetError, DataError, FormatError, GraphError,
                     SimulationError)
from .evaluation import (ALL_METHODS, DEFAULT_MARKERS, ancestral_ground_truth,
                         bootstrap_scores, curve_rows, permutation_null_roc,
                         pr_curve, read_predictions_csv, roc_curve,
                         run_fixed_graph_experiment,
                         run_random_graph_experiment, write_curve_csv,
                         write_null_band_csv, write_predictions_csv,
                         write_table_csv)
from .graph import load_graph, save_graph
from .icp import icp_predictions
from .patterns import (ICP, LCD, YST, YST_EXT, find_lcd, find_y_structures,
                       score_predictions)
from .randgraph import GraphSamplerParams, fixed_graph, sample_random_graph
from .scm import Intervention, SelectionRule, sample_weights, simulate_paired
from .scm import simulate as scm_simulate
from .separation import GraphOracle
from .enumeration import verify_extended_ystructure, verify_no_sound_3var_rule
from .icp import boost_preselect

EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_DATA = 5
EXIT_SIMULATION = 6

_METHOD_CHOICES = click.Choice([LCD, YST, YST_EXT, ICP])


def _threads_default() -> int:
    env = os.environ.get("SELBIAS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _fail(code: int, kind: str, message: str):
    sys.stderr.write(json.dumps({"error": kind, "code": code,
                                 "message": message}) + "\n")
    sys.exit(code)


def _guarded(fn):
    """Translate package errors into exit codes with JSON diagnostics."""
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FormatError as exc:
            _fail(EXIT_FORMAT, "format", str(exc))
        except (DataError, GraphError, BudgetError) as exc:
            _fail(EXIT_DATA, "data", str(exc))
        except SimulationError as exc:
            _fail(EXIT_SIMULATION, "simulation", str(exc))
        except OSError as exc:
            _fail(EXIT_IO, "io", str(exc))
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _write_manifest(out_dir: Path, command: str, params: dict):
    manifest = {"command": command, "params": params, "version": __version__}
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
        encoding="utf-8")


@click.group()
@click.version_option(__version__)
def main():
    """Constraint-based causal discovery under selection bias."""


@main.command()
@click.option("--graph", "graph_file", type=click.Path(), default=None,
              help="Graph file in the text format.")
@click.option("--fixed-graph", "use_fixed", is_flag=True,
              help="Use the built-in demonstration graph.")
@click.option("--random-p", type=int, default=None,
              help="Sample a random benchmark graph with this many variables.")
@click.option("--n", default=10_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--paired/--no-paired", default=True, show_default=True,
              help="Write both biased and unbiased datasets.")
@click.option("--selection-window", nargs=2, type=float, default=(2.0, 2.5),
              show_default=True)
@click.option("--intervene", default=None,
              help="NODE=VALUE intervention applied to both arms.")
@click.option("--knockout", default=None, help="Knock out this node.")
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
@_guarded
def simulate(graph_file, use_fixed, random_p, n, seed, paired,
             selection_window, intervene, knockout, out_dir):
    """Sample linear-Gaussian data from a graph (CSV + sidecar + model JSON)."""
    sources = sum(x is not None and x is not False
                  for x in (graph_file, use_fixed or None, random_p))
    if sources != 1:
        _fail(EXIT_DATA, "data",
              "choose exactly one of --graph, --fixed-graph, --random-p")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if use_fixed:
        g = fixed_graph()
    elif graph_file is not None:
        g = load_graph(graph_file)
    else:
        g = sample_random_graph(GraphSamplerParams.for_size(random_p),
                                seed=seed)
    iv = None
    if intervene and knockout:
        _fail(EXIT_DATA, "data", "use either --intervene or --knockout")
    if intervene:
        if "=" not in intervene:
            _fail(EXIT_FORMAT, "format", "--intervene expects NODE=VALUE")
        node, _, value = intervene.partition("=")
        iv = Intervention(node, value=float(value))
    elif knockout:
        iv = Intervention(knockout, knockout=True)
    rule = SelectionRule(*selection_window)
    scm = sample_weights(g, seed=seed + 1)
    save_graph(g, out / "graph.txt")
    (out / "scm.json").write_text(scm.to_json() + "\n", encoding="utf-8")
    if paired:
        if iv is None:
            d_s, d_0 = simulate_paired(scm, n, seed=seed + 2, selection=rule)
        else:
            d_s = scm_simulate(scm, n, selection=rule, iv=iv, seed=seed + 3)
            d_0 = scm_simulate(scm, n, selection=None, iv=iv, seed=seed + 4)
        d_s.to_csv(out / "data_biased.csv")
        d_0.to_csv(out / "data_unbiased.csv")
    else:
        d = scm_simulate(scm, n, selection=rule, iv=iv, seed=seed + 2)
        d.to_csv(out / "data_biased.csv")
    _write_manifest(out, "simulate", {
        "graph": str(graph_file), "fixed": bool(use_fixed),
        "random_p": random_p, "n": n, "seed": seed, "paired": paired,
        "selection_window": list(selection_window),
        "intervene": intervene, "knockout": knockout})
    click.echo(f"wrote datasets to {out}")


@main.command()
@click.argument("data_csv", type=click.Path(exists=True))
@click.option("--method", type=_METHOD_CHOICES, required=True)
@click.option("--context", default=None,
              help="Context column (default: sidecar metadata).")
@click.option("--alpha", default=0.01, show_default=True)
@click.option("--dual-threshold", is_flag=True,
              help="Accept at alpha, reject at alpha / #variables.")
@click.option("--context-test", type=click.Choice(["fisherz", "invariance"]),
              default="fisherz", show_default=True)
@click.option("--fixed-v", default=None,
              help="Pin the first auxiliary variable (y-structures).")
@click.option("--preselect", is_flag=True,
              help="Boosting preselection of candidate separators.")
@click.option("--max-preselect", default=8, show_default=True)
@click.option("--max-set-size", default=None, type=int,
              help="Largest parent set tested by the invariance baseline.")
@click.option("--bootstrap", "n_bootstrap", default=0, show_default=True,
              help="Aggregate scores over this many half-subsamples.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), default="predictions.csv",
              show_default=True)
@_guarded
def discover(data_csv, method, context, alpha, dual_threshold, context_test,
             fixed_v, preselect, max_preselect, max_set_size, n_bootstrap,
             seed, out):
    """Mine scored ancestral claims from a dataset CSV."""
    d = Dataset.from_csv(data_csv, context=[context] if context else None)
    if d.context and d.context[0] not in d.discrete \
            and (method == ICP or context_test == "invariance"):
        d = binarize_column(d, d.context[0])

    def run(dataset: Dataset):
        mode = ThresholdMode.DUAL if dual_threshold else ThresholdMode.SINGLE
        policy = DecisionPolicy(alpha=alpha, mode=mode,
                                dual_divisor=len(dataset.columns)
                                if dual_threshold else 1)
        if method == ICP:
            return icp_predictions(dataset, policy=policy,
                                   max_set_size=max_set_size)
        model = DataCiModel(dataset, policy, context_test=context_test)
        cands = None
        if preselect:
            cands = {t: boost_preselect(dataset, t, max_vars=max_preselect)
                     for t in dataset.system_columns}
        if method == LCD:
            if not dataset.context:
                raise DataError("lcd needs a context column")
            hits = find_lcd(model, dataset.context[0], x_candidates=cands)
        else:
            hits = find_y_structures(model, extended=(method == YST_EXT),
                                     fixed_v=fixed_v, x_candidates=cands,
                                     w_candidates=cands)
        return score_predictions(hits)

    if n_bootstrap > 0:
        preds = bootstrap_scores(run, d, n_subsamples=n_bootstrap, seed=seed)
    else:
        preds = run(d)
    write_predictions_csv(preds, out)
    _write_manifest(Path(out).parent, "discover", {
        "data": str(data_csv), "method": method, "alpha": alpha,
        "dual_threshold": dual_threshold, "context_test": context_test,
        "fixed_v": fixed_v, "preselect": preselect,
        "bootstrap": n_bootstrap, "seed": seed})
    click.echo(f"wrote {len(preds)} predictions to {out}")


@main.command(name="oracle-discover")
@click.argument("graph_file", type=click.Path(exists=True))
@click.option("--method", type=click.Choice([LCD, YST, YST_EXT]),
              required=True)
@click.option("--context", default=None)
@click.option("--no-selection", is_flag=True,
              help="Evaluate without conditioning on selection nodes.")
@click.option("--out", type=click.Path(), default="oracle_predictions.csv",
              show_default=True)
@_guarded
def oracle_discover(graph_file, method, context, no_selection, out):
    """Mine patterns from a known graph with the separation oracle."""
    g = load_graph(graph_file)
    oracle = GraphOracle(g, condition_selection=not no_selection)
    if method == LCD:
        ctx = context or (g.context_nodes[0] if g.context_nodes else None)
        if ctx is None:
            raise DataError("lcd needs a context node")
        hits = find_lcd(oracle, ctx)
    else:
        hits = find_y_structures(oracle, extended=(method == YST_EXT),
                                 fixed_v=context)
    preds = score_predictions(hits)
    write_predictions_csv(preds, out)
    click.echo(f"wrote {len(preds)} oracle predictions to {out}")


@main.command()
@click.option("--selection", "n_selection", default=1, show_default=True)
@click.option("--jci/--no-jci", default=True, show_default=True,
              help="Exogeneity background knowledge (required for the check).")
@click.option("--out", type=click.Path(), default=None,
              help="Write the JSON report here instead of stdout.")
@_guarded
def enumerate3(n_selection, jci, out):
    """Exhaustively verify the three-variable impossibility result."""
    if not jci:
        _fail(EXIT_DATA, "data",
              "the three-variable check is defined under --jci")
    report = verify_no_sound_3var_rule(n_selection=n_selection)
    text = json.dumps(report, sort_keys=True, indent=2, default=str)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote report to {out}")
    else:
        click.echo(text)
    if n_selection >= 1 and not report["no_sound_rule_verified"]:
        _fail(EXIT_DATA, "data",
              "a signature bucket forces a claim despite selection")


@main.command(name="verify-yst")
@click.option("--graphs", "n_graphs", default=100_000, show_default=True)
@click.option("--max-selection", default=2, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@_guarded
def verify_yst(n_graphs, max_selection, seed, out):
    """Randomized soundness check of the extended four-variable pattern."""
    report = verify_extended_ystructure(n_graphs, max_selection=max_selection,
                                        seed=seed)
    text = json.dumps(report, sort_keys=True, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote report to {out}")
    else:
        click.echo(text)
    if not report["verified"]:
        _fail(EXIT_DATA, "data",
              f"{report['n_counterexamples']} counterexamples found")


@main.group()
def experiment():
    """Reproduce the simulation studies."""


@experiment.command(name="fixed-graph")
@click.option("--models", default=200, show_default=True)
@click.option("--n", default=10_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--alpha", default=0.01, show_default=True)
@click.option("--threads", default=None, type=int,
              help="Worker processes (default: SELBIAS_THREADS or cores).")
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
@_guarded
def experiment_fixed(models, n, seed, alpha, threads, out_dir):
    """Prediction/TP/FP table per method on biased and unbiased arms."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_fixed_graph_experiment(n_models=models, n=n, seed=seed,
                                      alpha=alpha,
                                      threads=threads or _threads_default())
    write_table_csv(rows, out / "fixed_graph_table.csv")
    _write_manifest(out, "experiment fixed-graph", {
        "models": models, "n": n, "seed": seed, "alpha": alpha})
    click.echo((out / "fixed_graph_table.csv").as_posix())


@experiment.command(name="random-graphs")
@click.option("--p", type=click.Choice(["8", "16"]), default="8",
              show_default=True)
@click.option("--models", default=100, show_default=True)
@click.option("--n", "ns", multiple=True, type=int, default=(10_000,),
              show_default=True, help="Sample sizes (repeat for a sweep).")
@click.option("--seed", default=0, show_default=True)
@click.option("--alpha", default=0.01, show_default=True)
@click.option("--methods", default=",".join(ALL_METHODS), show_default=True)
@click.option("--oracle-patterns", is_flag=True,
              help="Also score pattern instances against the true graph.")
@click.option("--threads", default=None, type=int)
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
@_guarded
def experiment_random(p, models, ns, seed, alpha, methods, oracle_patterns,
                      threads, out_dir):
    """Pooled PR curves over replicate random benchmark graphs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    method_list = [m.strip() for m in methods.split(",") if m.strip()]
    unknown = set(method_list) - set(ALL_METHODS)
    if unknown:
        _fail(EXIT_DATA, "data", f"unknown methods: {sorted(unknown)}")
    written = []
    for n in ns:
        result = run_random_graph_experiment(
            int(p), models, n=n, seed=seed, alpha=alpha, methods=method_list,
            oracle_patterns=oracle_patterns,
            threads=threads or _threads_default())
        path = out / f"random_p{p}_n{n}_pr.csv"
        write_curve_csv(result["pr"], path, "pr")
        written.append(path)
        if oracle_patterns:
            op_path = out / f"random_p{p}_n{n}_oracle_patterns_pr.csv"
            write_curve_csv(result["oracle_pattern_pr"], op_path, "pr")
            written.append(op_path)
        ap_path = out / f"random_p{p}_n{n}_ap.json"
        ap_path.write_text(json.dumps(result["average_precision"],
                                      sort_keys=True, indent=2) + "\n",
                           encoding="utf-8")
        written.append(ap_path)
    _write_manifest(out, "experiment random-graphs", {
        "p": int(p), "models": models, "ns": list(ns), "seed": seed,
        "alpha": alpha, "methods": method_list,
        "oracle_patterns": oracle_patterns})
    for path in written:
        click.echo(path.as_posix())


@main.command(name="eval")
@click.argument("predictions_csv", type=click.Path(exists=True))
@click.option("--truth-graph", type=click.Path(exists=True), required=True,
              help="Graph file whose ancestral relations are the positives.")
@click.option("--kind", type=click.Choice(["pr", "roc"]), default="pr",
              show_default=True)
@click.option("--include-context", is_flag=True,
              help="Count context-sourced pairs as candidates.")
@click.option("--marker", type=float, default=None,
              help="Score threshold for the p=0.01-equivalent cross.")
@click.option("--null-band", type=click.Path(), default=None,
              help="Also write a permutation-null ROC envelope CSV.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), default="curve.csv",
              show_default=True)
@_guarded
def eval_cmd(predictions_csv, truth_graph, kind, include_context, marker,
             null_band, seed, out):
    """Score a prediction CSV against a ground-truth graph."""
    preds = read_predictions_csv(predictions_csv)
    truth = ancestral_ground_truth(load_graph(truth_graph),
                                   include_context=include_context)
    if marker is None and preds:
        marker = DEFAULT_MARKERS.get(preds[0].kind)
    method = preds[0].kind if preds else "none"
    if kind == "pr":
        points = pr_curve(preds, truth, marker_threshold=marker)
    else:
        points = roc_curve(preds, truth, marker_threshold=marker)
    write_curve_csv(curve_rows(method, "data", points, kind), out, kind)
    if null_band:
        if truth.universe is None:
            raise DataError("null band needs a candidate universe")
        rows = permutation_null_roc(len(truth.universe), len(truth.positives),
                                    seed=seed)
        write_null_band_csv(rows, null_band)
    click.echo(out)


if __name__ == "__main__":
    main()
