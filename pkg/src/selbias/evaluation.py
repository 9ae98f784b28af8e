"""Ground-truth construction, PR/ROC evaluation and experiment drivers.

Predictions are ranked by score; curves sweep the unique scores in
descending order, admitting all equally-scored predictions at once, and
mark the operating point where the score passes the p = 0.01 equivalent.
Experiment drivers pool predictions over replicate models (instances keyed
by model and claim) and are deterministic given seed and parameters;
replicates can run on a worker pool without changing any output byte.
"""

from __future__ import annotations

import csv
import dataclasses
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .citest import DataCiModel, Dataset, DecisionPolicy, binarize_column
from .errors import DataError, FormatError
from .graph import Dmg, descendants
from .icp import icp_predictions
from .patterns import (ICP, LCD, YST, YST_EXT, PatternHit, Prediction,
                       _hit_score, find_lcd, find_y_structures, neg_log,
                       score_predictions)
from .randgraph import GraphSamplerParams, fixed_graph, sample_random_graph
from .rngtools import as_generator
from .scm import sample_weights, simulate_paired
from .separation import GraphOracle

__all__ = [
    "GroundTruth", "CurvePoint", "ancestral_ground_truth",
    "oracle_pattern_check", "intervention_effect_scores",
    "intervention_ground_truth", "pr_curve", "roc_curve", "average_precision",
    "bootstrap_scores", "permutation_null_roc", "run_fixed_graph_experiment",
    "run_random_graph_experiment", "write_predictions_csv",
    "read_predictions_csv", "write_curve_csv", "write_table_csv",
    "DEFAULT_MARKERS", "BIASED", "UNBIASED",
]

BIASED = "biased"
UNBIASED = "unbiased"

# score value equivalent to a p-value of 0.01 on each method's score scale
DEFAULT_MARKERS = {LCD: neg_log(0.01), YST: neg_log(0.01),
                   YST_EXT: neg_log(0.01), ICP: 0.01}

GRAPH_ANCESTRAL = "graph_ancestral"
ORACLE_PATTERN = "oracle_pattern"
INTERVENTION_EFFECT = "intervention_effect"


@dataclasses.dataclass(frozen=True)
class GroundTruth:
    """Positive ordered claim pairs plus the candidate universe."""

    positives: frozenset
    provenance: str
    universe: frozenset | None = None

    def __post_init__(self):
        if any(a == b for a, b in self.positives):
            raise DataError("self pairs are not valid positives")
        if self.universe is not None and not self.positives <= self.universe:
            raise DataError("positives must lie inside the universe")


@dataclasses.dataclass(frozen=True)
class CurvePoint:
    threshold: float
    tp: int
    fp: int
    x: float  # recall (pr) or false-positive rate (roc)
    y: float  # precision (pr) or true-positive rate (roc)
    marker: bool = False


def ancestral_ground_truth(g: Dmg, include_context: bool = False) -> GroundTruth:
    """True ancestral claim pairs of a graph over system variables
    (optionally also context-sourced pairs)."""
    system = list(g.system_nodes)
    sources = system + (list(g.context_nodes) if include_context else [])
    universe = set()
    positives = set()
    for a in sources:
        desc = descendants(g, [a])
        for b in system:
            if a == b:
                continue
            universe.add((a, b))
            if b in desc:
                positives.add((a, b))
    return GroundTruth(frozenset(positives), GRAPH_ANCESTRAL,
                       frozenset(universe))


def oracle_pattern_check(g: Dmg, hit: PatternHit,
                         condition_selection: bool = True) -> bool:
    """Re-evaluate a hit's defining constraints on the true graph."""
    m = GraphOracle(g, condition_selection=condition_selection)
    if hit.kind == LCD:
        c, x, y = hit.nodes
        return (m.query(c, y).dependent and m.query(c, x).dependent
                and m.query(x, y).dependent
                and m.query(c, y, [x]).independent)
    if hit.kind in (YST, YST_EXT):
        v, w, x, y = hit.nodes
        core = (m.query(v, y).dependent and m.query(v, y, [x]).independent
                and m.query(v, w).independent
                and m.query(v, w, [x]).dependent)
        if hit.kind == YST_EXT or not core:
            return core
        return (m.query(w, y).dependent and m.query(w, y, [x]).independent)
    raise DataError(f"no oracle pattern defined for kind {hit.kind!r}")


def intervention_effect_scores(obs: Dataset,
                               iv_samples: Mapping[str, np.ndarray]
                               ) -> dict[tuple[str, str], float]:
    """Standardized absolute single-intervention effects |x_ji - mu_j| / sd_j
    over system column pairs."""
    cols = obs.system_columns
    mu = {c: float(obs.column(c).mean()) for c in cols}
    sd = {c: float(obs.column(c).std(ddof=1)) for c in cols}
    for c, s in sd.items():
        if s == 0.0:
            raise DataError(f"zero standard deviation in column {c!r}")
    col_idx = {c: obs.columns.index(c) for c in cols}
    scores = {}
    for i, row in iv_samples.items():
        row = np.asarray(row, dtype=float)
        if row.shape != (len(obs.columns),):
            raise DataError("intervention row must align with columns")
        for j in cols:
            if i == j:
                continue
            scores[(i, j)] = abs(float(row[col_idx[j]]) - mu[j]) / sd[j]
    return scores


def intervention_ground_truth(obs: Dataset,
                              iv_samples: Mapping[str, np.ndarray],
                              t_quantile: float = 0.01) -> GroundTruth:
    """Positives = the top `t_quantile` fraction of standardized effects."""
    if not 0.0 < t_quantile < 1.0:
        raise DataError("t_quantile must be in (0, 1)")
    scores = intervention_effect_scores(obs, iv_samples)
    values = np.array(list(scores.values()))
    t = float(np.quantile(values, 1.0 - t_quantile))
    positives = frozenset(pair for pair, s in scores.items() if s > t)
    return GroundTruth(positives, INTERVENTION_EFFECT,
                       frozenset(scores.keys()))


# -- curves -------------------------------------------------------------


def _sweep(items: Sequence[tuple], positives: frozenset,
           marker_threshold: float | None) -> list[tuple[float, int, int, bool]]:
    """Descending-threshold sweep with ties admitted together.
    Returns (threshold, tp, fp, marker) tuples."""
    by_score: dict[float, list] = {}
    for key, score in items:
        by_score.setdefault(float(score), []).append(key)
    out = []
    tp = fp = 0
    thresholds = sorted(by_score, reverse=True)
    for t in thresholds:
        for key in by_score[t]:
            if key in positives:
                tp += 1
            else:
                fp += 1
        out.append((t, tp, fp, False))
    if marker_threshold is not None:
        eligible = [i for i, (t, *_rest) in enumerate(out)
                    if t >= marker_threshold]
        if eligible:
            i = eligible[-1]
            t, tp, fp, _ = out[i]
            out[i] = (t, tp, fp, True)
    return out


def _dedupe_items(preds: Iterable[Prediction]) -> list[tuple]:
    items = []
    seen = set()
    for p in sorted(preds, key=lambda q: (q.source, q.target)):
        key = (p.source, p.target)
        if key in seen:
            raise DataError(f"duplicate prediction for {key}")
        seen.add(key)
        items.append((key, p.score))
    return items


def pr_curve(preds: Iterable[Prediction], truth: GroundTruth,
             marker_threshold: float | None = None) -> list[CurvePoint]:
    """Precision-recall sweep over unique score thresholds (descending)."""
    items = _dedupe_items(preds)
    n_pos = len(truth.positives)
    points = []
    for t, tp, fp, marker in _sweep(items, truth.positives, marker_threshold):
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / n_pos if n_pos else 0.0
        points.append(CurvePoint(t, tp, fp, recall, precision, marker))
    return points


def roc_curve(preds: Iterable[Prediction], truth: GroundTruth,
              marker_threshold: float | None = None) -> list[CurvePoint]:
    """ROC sweep; requires the truth to carry a candidate universe."""
    if truth.universe is None:
        raise DataError("roc needs a ground truth with a candidate universe")
    items = _dedupe_items(preds)
    n_pos = len(truth.positives)
    n_neg = len(truth.universe) - n_pos
    if n_neg <= 0:
        raise DataError("no negatives in the universe")
    points = []
    for t, tp, fp, marker in _sweep(items, truth.positives, marker_threshold):
        tpr = tp / n_pos if n_pos else 0.0
        points.append(CurvePoint(t, tp, fp, fp / n_neg, tpr, marker))
    return points


def average_precision(preds: Iterable[Prediction], truth: GroundTruth) -> float:
    """Step-sum of precision over recall increments."""
    points = pr_curve(preds, truth)
    ap = 0.0
    prev_recall = 0.0
    for pt in points:
        ap += (pt.x - prev_recall) * pt.y
        prev_recall = pt.x
    return ap


def permutation_null_roc(n_instances: int, n_positives: int,
                         n_permutations: int = 200, seed=None,
                         level: float = 0.99, n_grid: int = 101) -> list[dict]:
    """Pointwise ROC envelope of random rankings on an FPR grid."""
    if not 0 < n_positives < n_instances:
        raise DataError("need 0 < n_positives < n_instances")
    rng = as_generator(seed)
    grid = np.linspace(0.0, 1.0, n_grid)
    n_neg = n_instances - n_positives
    tprs = np.empty((n_permutations, n_grid))
    labels = np.zeros(n_instances, dtype=bool)
    labels[:n_positives] = True
    for k in range(n_permutations):
        perm = rng.permutation(n_instances)
        hits = labels[perm]
        tp = np.cumsum(hits)
        fp = np.cumsum(~hits)
        tprs[k] = np.interp(grid, fp / n_neg, tp / n_positives)
    lo = (1.0 - level) / 2.0
    return [{"fpr": float(g),
             "tpr_lo": float(np.quantile(tprs[:, i], lo)),
             "tpr_hi": float(np.quantile(tprs[:, i], 1.0 - lo)),
             "tpr_mean": float(tprs[:, i].mean())}
            for i, g in enumerate(grid)]


# -- bootstrap aggregation -------------------------------------------------


def bootstrap_scores(method: Callable[[Dataset], list[Prediction]],
                     d: Dataset, n_subsamples: int = 100, seed=None
                     ) -> list[Prediction]:
    """Average scores over half-subsample reruns (rows drawn without
    replacement); a claim absent from a run contributes score 0."""
    if n_subsamples < 1:
        raise DataError("need at least one subsample")
    rng = as_generator(seed)
    half = d.n_rows // 2
    totals: dict[tuple[str, str, str], float] = {}
    for _ in range(n_subsamples):
        idx = rng.choice(d.n_rows, size=half, replace=False)
        idx.sort()
        for p in method(d.take_rows(idx)):
            key = (p.kind, p.source, p.target)
            totals[key] = totals.get(key, 0.0) + p.score
    return [Prediction(source, target, total / n_subsamples, kind)
            for (kind, source, target), total in sorted(totals.items())]


# -- experiment drivers ------------------------------------------------------

PATTERN_METHODS = (LCD, YST, YST_EXT)
ALL_METHODS = PATTERN_METHODS + (ICP,)


def _method_predictions(d: Dataset, method: str, alpha: float
                        ) -> tuple[list[Prediction], list[PatternHit]]:
    """Scored predictions (and raw hits, for pattern methods) on one dataset."""
    if method == ICP:
        binned = binarize_column(d, d.context[0])
        return icp_predictions(binned, policy=DecisionPolicy(alpha)), []
    model = DataCiModel(d, DecisionPolicy(alpha))
    if method == LCD:
        hits = find_lcd(model, d.context[0])
    elif method == YST:
        hits = find_y_structures(model, extended=False)
    elif method == YST_EXT:
        hits = find_y_structures(model, extended=True)
    else:
        raise DataError(f"unknown method {method!r}")
    return score_predictions(hits), hits


def _fixed_graph_model(args) -> list[tuple[str, str, int, int, int]]:
    """One replicate of the fixed-graph run: counts per method and arm."""
    seed_state, n, alpha = args
    rng = np.random.default_rng(seed_state)
    scm = sample_weights(fixed_graph(), rng.spawn(1)[0])
    d_s, d_0 = simulate_paired(scm, n, seed=rng)
    truth = ancestral_ground_truth(fixed_graph()).positives
    rows = []
    for label, d in ((UNBIASED, d_0), (BIASED, d_s)):
        for method in ALL_METHODS:
            preds, _hits = _method_predictions(d, method, alpha)
            claims = {(p.source, p.target) for p in preds}
            tp = len(claims & truth)
            rows.append((method, label, len(claims), tp, len(claims) - tp))
    return rows


def run_fixed_graph_experiment(n_models: int = 200, n: int = 10_000,
                               seed=None, alpha: float = 0.01,
                               threads: int = 1) -> list[dict]:
    """Replicate models on the fixed demonstration graph and tally
    predictions, true positives and false positives per method and arm."""
    seeds = [s.generate_state(4) for s in
             np.random.SeedSequence(seed).spawn(n_models)]
    args = [(s, n, alpha) for s in seeds]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_model = list(pool.map(_fixed_graph_model, args, chunksize=4))
    else:
        per_model = [_fixed_graph_model(a) for a in args]
    totals: dict[tuple[str, str], list[int]] = {}
    for rows in per_model:
        for method, label, n_pred, tp, fp in rows:
            agg = totals.setdefault((method, label), [0, 0, 0])
            agg[0] += n_pred
            agg[1] += tp
            agg[2] += fp
    return [{"method": method, "dataset": label,
             "n_pred": v[0], "tp": v[1], "fp": v[2]}
            for (method, label), v in sorted(totals.items())]


def _random_graph_model(args):
    """One replicate of the random-graph run: scored predictions and hits
    per (method, arm), plus the replicate's ground truth."""
    seed_state, p, n, alpha, methods, oracle_patterns = args
    rng = np.random.default_rng(seed_state)
    g = sample_random_graph(GraphSamplerParams.for_size(p), rng.spawn(1)[0])
    scm = sample_weights(g, rng.spawn(1)[0])
    d_s, d_0 = simulate_paired(scm, n, seed=rng)
    truth = ancestral_ground_truth(g)
    out = {"positives": sorted(truth.positives),
           "universe": sorted(truth.universe),
           "preds": {}, "hit_instances": {}}
    for label, d, conditioned in ((UNBIASED, d_0, False), (BIASED, d_s, True)):
        for method in methods:
            preds, hits = _method_predictions(d, method, alpha)
            out["preds"][(method, label)] = [
                (pr.source, pr.target, pr.score) for pr in preds]
            if oracle_patterns and method in PATTERN_METHODS:
                out["hit_instances"][(method, label)] = [
                    (_hit_score(h),
                     oracle_pattern_check(g, h, condition_selection=conditioned))
                    for h in hits]
    return out


def run_random_graph_experiment(p: int, n_models: int, n: int = 10_000,
                                seed=None, alpha: float = 0.01,
                                methods: Sequence[str] = ALL_METHODS,
                                oracle_patterns: bool = False,
                                threads: int = 1) -> dict:
    """Pooled PR evaluation over replicate random graphs.

    Returns per-(method, arm) PR rows and average precision; with
    `oracle_patterns`, also PR rows where each discovered pattern instance
    is an item and the positive condition is its existence in the true
    graph (scored per hit, without the per-claim maximum).
    """
    seeds = [s.generate_state(4) for s in
             np.random.SeedSequence(seed).spawn(n_models)]
    args = [(s, p, n, alpha, tuple(methods), oracle_patterns) for s in seeds]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            models = list(pool.map(_random_graph_model, args, chunksize=1))
    else:
        models = [_random_graph_model(a) for a in args]

    pr_rows: list[dict] = []
    aps: dict[str, float] = {}
    for method in methods:
        for label in (BIASED, UNBIASED):
            preds = []
            positives = set()
            for k, model in enumerate(models):
                positives.update((k, a, b) for a, b in model["positives"])
                for a, b, score in model["preds"][(method, label)]:
                    preds.append(Prediction(f"{k}:{a}", f"{k}:{b}", score,
                                            method))
            keyed_truth = GroundTruth(
                frozenset((f"{k}:{a}", f"{k}:{b}") for k, a, b in positives),
                GRAPH_ANCESTRAL)
            curve = pr_curve(preds, keyed_truth,
                             marker_threshold=DEFAULT_MARKERS.get(method))
            ap = average_precision(preds, keyed_truth)
            aps[f"{method}/{label}"] = ap
            pr_rows += [_curve_row(method, label, pt, "pr") for pt in curve]

    out = {"p": p, "n": n, "n_models": n_models, "pr": pr_rows,
           "average_precision": aps}
    if oracle_patterns:
        op_rows = []
        for method in methods:
            if method not in PATTERN_METHODS:
                continue
            for label in (BIASED, UNBIASED):
                items = []
                positives = set()
                for k, model in enumerate(models):
                    for i, (score, is_true) in enumerate(
                            model["hit_instances"].get((method, label), [])):
                        key = (k, method, label, i)
                        items.append((key, score))
                        if is_true:
                            positives.add(key)
                n_pos = len(positives)
                points = []
                for t, tp, fp, marker in _sweep(
                        items, frozenset(positives),
                        DEFAULT_MARKERS.get(method)):
                    precision = tp / (tp + fp) if tp + fp else 0.0
                    recall = tp / n_pos if n_pos else 0.0
                    points.append(CurvePoint(t, tp, fp, recall, precision,
                                             marker))
                op_rows += [_curve_row(method, label, pt, "pr")
                            for pt in points]
        out["oracle_pattern_pr"] = op_rows
    return out


# -- CSV formats -------------------------------------------------------------


def _curve_row(method: str, dataset: str, pt: CurvePoint, kind: str) -> dict:
    if kind == "pr":
        return {"method": method, "dataset": dataset,
                "threshold": pt.threshold, "precision": pt.y, "recall": pt.x,
                "tp": pt.tp, "fp": pt.fp, "marker": int(pt.marker)}
    return {"method": method, "dataset": dataset, "threshold": pt.threshold,
            "tpr": pt.y, "fpr": pt.x, "tp": pt.tp, "fp": pt.fp,
            "marker": int(pt.marker)}


def curve_rows(method: str, dataset: str, points: Sequence[CurvePoint],
               kind: str) -> list[dict]:
    return [_curve_row(method, dataset, pt, kind) for pt in points]


_CURVE_COLUMNS = {"pr": ["method", "dataset", "threshold", "precision",
                         "recall", "tp", "fp", "marker"],
                  "roc": ["method", "dataset", "threshold", "tpr", "fpr",
                          "tp", "fp", "marker"]}


def write_curve_csv(rows: Sequence[dict], path, kind: str) -> None:
    if kind not in _CURVE_COLUMNS:
        raise DataError(f"unknown curve kind {kind!r}")
    cols = _CURVE_COLUMNS[kind]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row[c] for c in cols})


def write_null_band_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["fpr", "tpr_lo", "tpr_hi",
                                                "tpr_mean"])
        writer.writeheader()
        writer.writerows(rows)


def write_table_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["method", "dataset", "n_pred",
                                                "tp", "fp"])
        writer.writeheader()
        writer.writerows(rows)


def write_predictions_csv(preds: Sequence[Prediction], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "score", "kind", "n_hits"])
        for p in sorted(preds, key=lambda q: (q.kind, q.source, q.target)):
            writer.writerow([p.source, p.target, repr(p.score), p.kind,
                             p.n_hits])


def read_predictions_csv(path) -> list[Prediction]:
    preds = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = {"source", "target", "score", "kind", "n_hits"}
        if set(reader.fieldnames or ()) != expected:
            raise FormatError(f"bad prediction CSV header in {path}")
        for row in reader:
            try:
                preds.append(Prediction(row["source"], row["target"],
                                        float(row["score"]), row["kind"]))
            except (KeyError, ValueError) as exc:
                raise FormatError(f"bad prediction row {row}: {exc}") from exc
    return preds
