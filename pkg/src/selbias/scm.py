"""Linear-Gaussian structural causal models over acyclic graphs.

Raw edge weights are drawn uniformly from +-[0.5, 1.5]; walking the
topological order, each node's incoming weights and noise scale are then
jointly divided by the node's analytic standard deviation, so every
marginal variance is exactly 1 and variance cannot accumulate with depth.

Sampling is ancestral and vectorized.  A selection rule keeps only rows
whose summed selection-node values fall in a window, via rejection
sampling with a deterministic batch schedule; selection columns never
appear in the output dataset.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Mapping

import numpy as np

from .citest import Dataset
from .errors import DataError, FormatError, GraphError, SimulationError
from .graph import Dmg, NodeRole
from .rngtools import as_generator, split

__all__ = ["LinearScm", "SelectionRule", "Intervention", "SimStats",
           "sample_weights", "simulate", "simulate_with_stats",
           "simulate_paired", "selection_acceptance", "check_identifiability",
           "knockout_samples"]


@dataclasses.dataclass(frozen=True)
class SelectionRule:
    """Keep a sample iff the sum of selection-node values lies in a window."""

    lower: float = 2.0
    upper: float = 2.5

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DataError("selection window must satisfy lower < upper")


@dataclasses.dataclass(frozen=True)
class Intervention:
    """Pin a system node to a value, severing its incoming edges.

    `knockout` uses a fixed strongly atypical low value (in units of the
    node's unit marginal standard deviation), mimicking a gene knockout.
    """

    target: str
    value: float | None = None
    knockout: bool = False
    knockout_value: float = -5.0

    def resolved_value(self) -> float:
        if self.knockout:
            return self.knockout_value
        if self.value is None:
            raise DataError("intervention needs a value or knockout=True")
        return float(self.value)


@dataclasses.dataclass
class SimStats:
    attempts: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else float("nan")


class LinearScm:
    """Acyclic linear-Gaussian model: graph, edge weights, noise scales."""

    def __init__(self, graph: Dmg, weight: Mapping[tuple[str, str], float],
                 noise_scale: Mapping[str, float]):
        if graph.bidirected_edges:
            raise GraphError("latent confounding edges are not simulable")
        if not graph.is_acyclic():
            raise GraphError("simulation requires an acyclic graph")
        missing = set(graph.directed_edges) - set(weight)
        if missing:
            raise GraphError(f"missing weights for edges: {sorted(missing)}")
        for v, s in noise_scale.items():
            if s <= 0:
                raise DataError(f"noise scale of {v!r} must be positive")
        self.graph = graph
        self.weight = dict(weight)
        self.noise_scale = {v: float(noise_scale[v]) for v in graph.nodes}
        self.topological_order = _topological_order(graph)

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.graph.nodes

    def analytic_covariance(self) -> tuple[tuple[str, ...], np.ndarray]:
        """Exact joint covariance implied by weights and noise scales."""
        order = self.topological_order
        idx = {v: i for i, v in enumerate(order)}
        n = len(order)
        cov = np.zeros((n, n))
        for v in order:
            i = idx[v]
            parents = sorted(self.graph.parents(v), key=idx.get)
            s = self.noise_scale[v]
            if not parents:
                cov[i, i] = s * s
                continue
            pidx = [idx[p] for p in parents]
            w = np.array([self.weight[(p, v)] for p in parents])
            var = float(w @ cov[np.ix_(pidx, pidx)] @ w) + s * s
            cross = cov[:, pidx] @ w  # covariance with every earlier node
            cov[i, :] = cross
            cov[:, i] = cross
            cov[i, i] = var
        return tuple(order), cov

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "nodes": [{"id": v, "role": self.graph.role(v).value}
                      for v in self.graph.nodes],
            "edges": [{"from": a, "to": b, "weight": self.weight[(a, b)]}
                      for a, b in sorted(self.graph.directed_edges)],
            "noise_scale": {v: self.noise_scale[v] for v in self.graph.nodes},
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "LinearScm":
        try:
            payload = json.loads(text)
            nodes = [(d["id"], NodeRole.parse(d["role"]))
                     for d in payload["nodes"]]
            edges = [(d["from"], d["to"]) for d in payload["edges"]]
            weight = {(d["from"], d["to"]): float(d["weight"])
                      for d in payload["edges"]}
            noise = {k: float(v) for k, v in payload["noise_scale"].items()}
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise FormatError(f"bad model JSON: {exc}") from exc
        return cls(Dmg(nodes, directed=edges), weight, noise)


def _topological_order(g: Dmg) -> tuple[str, ...]:
    order = []
    placed: set[str] = set()
    pending = list(g.nodes)
    while pending:
        progressed = False
        for v in list(pending):
            if g.parents(v) <= placed:
                order.append(v)
                placed.add(v)
                pending.remove(v)
                progressed = True
        if not progressed:
            raise GraphError("graph has a directed cycle")
    return tuple(order)


def sample_weights(g: Dmg, seed=None) -> LinearScm:
    """Draw raw weights uniform on +-[0.5, 1.5] and standardize marginals."""
    if g.bidirected_edges:
        raise GraphError("latent confounding edges are not simulable")
    if not g.is_acyclic():
        raise GraphError("weight sampling requires an acyclic graph")
    rng = as_generator(seed)
    order = _topological_order(g)
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    cov = np.zeros((n, n))
    weight: dict[tuple[str, str], float] = {}
    noise_scale: dict[str, float] = {}
    for v in order:
        i = idx[v]
        parents = sorted(g.parents(v), key=idx.get)
        if not parents:
            noise_scale[v] = 1.0
            cov[i, i] = 1.0
            continue
        raw = rng.uniform(0.5, 1.5, size=len(parents))
        raw *= rng.choice([-1.0, 1.0], size=len(parents))
        pidx = [idx[p] for p in parents]
        var_raw = float(raw @ cov[np.ix_(pidx, pidx)] @ raw) + 1.0
        scale = math.sqrt(var_raw)
        w = raw / scale
        noise_scale[v] = 1.0 / scale
        for p, wp in zip(parents, w):
            weight[(p, v)] = float(wp)
        cross = cov[:, pidx] @ w
        cov[i, :] = cross
        cov[:, i] = cross
        cov[i, i] = 1.0
    return LinearScm(g, weight, noise_scale)


_BATCH_ROWS = 8192


def simulate_with_stats(scm: LinearScm, n: int,
                        selection: SelectionRule | None = None,
                        iv: Intervention | None = None, seed=None,
                        max_attempts: int = 10_000_000
                        ) -> tuple[Dataset, SimStats]:
    """Ancestral sampling; under a selection rule, rejection-sample until
    `n` rows are accepted (attempt cap guards hopeless rules)."""
    if n < 1:
        raise DataError("need n >= 1")
    g = scm.graph
    if iv is not None:
        if g.role(iv.target) is not NodeRole.SYSTEM:
            raise GraphError("interventions target system nodes only")
        iv_value = iv.resolved_value()
    rng = as_generator(seed)
    order = scm.topological_order
    idx = {v: i for i, v in enumerate(order)}
    sel_idx = [idx[v] for v in g.selection_nodes]
    observables = [v for v in g.nodes if g.role(v) is not NodeRole.SELECTION]

    stats_out = SimStats()
    kept: list[np.ndarray] = []
    got = 0
    while got < n:
        batch = _BATCH_ROWS if selection is not None else n - got
        values = np.empty((batch, len(order)))
        for v in order:
            i = idx[v]
            if iv is not None and v == iv.target:
                values[:, i] = iv_value
                continue
            col = scm.noise_scale[v] * rng.standard_normal(batch)
            for p in g.parents(v):
                col += scm.weight[(p, v)] * values[:, idx[p]]
            values[:, i] = col
        stats_out.attempts += batch
        if selection is not None:
            total = values[:, sel_idx].sum(axis=1)
            mask = (total >= selection.lower) & (total <= selection.upper)
            values = values[mask]
        take = min(len(values), n - got)
        if take:
            kept.append(values[:take])
            got += take
        stats_out.accepted = got
        if got < n and stats_out.attempts >= max_attempts:
            raise SimulationError(
                f"accepted {got}/{n} rows after {stats_out.attempts} attempts; "
                f"selection rule too restrictive")
    data = np.vstack(kept) if kept else np.empty((0, len(order)))
    obs_cols = [idx[v] for v in observables]
    return (Dataset(observables, data[:, obs_cols],
                    context=list(g.context_nodes)), stats_out)


def simulate(scm: LinearScm, n: int, selection: SelectionRule | None = None,
             iv: Intervention | None = None, seed=None,
             max_attempts: int = 10_000_000) -> Dataset:
    return simulate_with_stats(scm, n, selection, iv, seed, max_attempts)[0]


def simulate_paired(scm: LinearScm, n: int, seed=None,
                    selection: SelectionRule | None = None
                    ) -> tuple[Dataset, Dataset]:
    """One biased and one unbiased dataset from the same model, with
    independent noise streams."""
    rng_s, rng_0 = split(seed, 2)
    rule = selection or SelectionRule()
    biased = simulate(scm, n, selection=rule, seed=rng_s)
    unbiased = simulate(scm, n, selection=None, seed=rng_0)
    return biased, unbiased


def selection_acceptance(scm: LinearScm, rule: SelectionRule, attempts: int,
                         seed=None) -> float:
    """Empirical acceptance rate of the rule over a fixed attempt budget."""
    rng = as_generator(seed)
    g = scm.graph
    order = scm.topological_order
    idx = {v: i for i, v in enumerate(order)}
    sel_idx = [idx[v] for v in g.selection_nodes]
    accepted = 0
    done = 0
    while done < attempts:
        batch = min(_BATCH_ROWS * 8, attempts - done)
        values = np.empty((batch, len(order)))
        for v in order:
            i = idx[v]
            col = scm.noise_scale[v] * rng.standard_normal(batch)
            for p in g.parents(v):
                col += scm.weight[(p, v)] * values[:, idx[p]]
            values[:, i] = col
        total = values[:, sel_idx].sum(axis=1)
        accepted += int(((total >= rule.lower) & (total <= rule.upper)).sum())
        done += batch
    return accepted / attempts


def knockout_samples(scm: LinearScm, seed=None,
                     selection: SelectionRule | None = None
                     ) -> dict[str, np.ndarray]:
    """One single-sample knockout row per system node, keyed by the
    intervened node; rows align with the observable columns."""
    targets = scm.graph.system_nodes
    rngs = split(seed, len(targets))
    out = {}
    for target, rng in zip(targets, rngs):
        d = simulate(scm, 1, selection=selection,
                     iv=Intervention(target, knockout=True), seed=rng)
        out[target] = d.values[0]
    return out


# -- identifiability check ---------------------------------------------------


def check_identifiability(scm: LinearScm, claim, n: int = 50_000, seed=None,
                          n_bins: int = 8, min_bin_count: int = 30,
                          n_boot: int = 400, level: float = 0.99,
                          selection: SelectionRule | None = None) -> dict:
    """Compare E[target | source=x, selected] with E[target | do(source=x),
    selected] on a grid of x values.

    `claim` is a pattern hit or a plain (source, target) pair.
    Observational selected data is binned into equal-count bins of the
    source; each bin center is matched by an interventional arm pinning the
    source.  Per-bin differences get bootstrap confidence intervals at
    level 1 - (1-level)/n_bins (Bonferroni across bins); the claim is
    considered to hold when every interval covers zero.
    """
    if hasattr(claim, "source"):
        source, target = claim.source, claim.target
    else:
        source, target = claim
    rule = selection or SelectionRule()
    rng_obs, rng_iv, rng_boot = split(seed, 3)
    obs = simulate(scm, n, selection=rule, seed=rng_obs)
    xs = obs.column(source)
    ys = obs.column(target)

    edges = np.quantile(xs, np.linspace(0.0, 1.0, n_bins + 1))
    edges[0] -= 1e-9
    edges[-1] += 1e-9
    bins = []
    dropped = 0
    iv_rngs = split(rng_iv, n_bins)
    per_arm = max(min_bin_count, n // n_bins)
    boot = as_generator(rng_boot)
    for b in range(n_bins):
        mask = (xs > edges[b]) & (xs <= edges[b + 1])
        if mask.sum() < min_bin_count:
            dropped += 1
            continue
        y_obs = ys[mask]
        center = float(xs[mask].mean())
        d_iv = simulate(scm, per_arm, selection=rule,
                        iv=Intervention(source, value=center),
                        seed=iv_rngs[b])
        y_do = d_iv.column(target)
        diff = float(y_obs.mean() - y_do.mean())
        boots = np.empty(n_boot)
        for k in range(n_boot):
            o = y_obs[boot.integers(0, len(y_obs), len(y_obs))]
            i_ = y_do[boot.integers(0, len(y_do), len(y_do))]
            boots[k] = o.mean() - i_.mean()
        alpha = (1.0 - level) / n_bins
        lo, hi = np.quantile(boots, [alpha / 2.0, 1.0 - alpha / 2.0])
        bins.append({"x": center, "n_obs": int(mask.sum()),
                     "difference": diff, "ci": (float(lo), float(hi)),
                     "covers_zero": bool(lo <= 0.0 <= hi)})
    if not bins:
        raise DataError("all bins dropped; too few selected samples")
    worst = max(bins, key=lambda b: abs(b["difference"]))
    return {
        "source": source, "target": target,
        "bins": bins, "dropped_bins": dropped,
        "max_abs_difference": abs(worst["difference"]),
        "max_bin_ci": worst["ci"],
        "holds": all(b["covers_zero"] for b in bins),
    }
