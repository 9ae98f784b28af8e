"""Benchmark graph generation: the fixed demonstration graph and a random
sampler tuned to promote selection-induced spurious correlations.

The sampler draws directed edges i.i.d. over ordered pairs, rejects cyclic
draws and draws with too few collider triples, attaches one selection node
whose parents come from the childless descendants of collider nodes, and
promotes one source node to context.
"""

from __future__ import annotations

import dataclasses

from .errors import SimulationError
from .graph import Dmg, NodeRole, descendants
from .rngtools import as_generator

__all__ = ["GraphSamplerParams", "sample_random_graph", "fixed_graph",
           "collider_triples", "SamplerStats"]


@dataclasses.dataclass(frozen=True)
class GraphSamplerParams:
    """Knobs of the random-graph sampler."""

    p: int
    edge_prob: float
    min_colliders: int
    n_selection_parents: int
    max_retries: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.edge_prob < 1.0:
            raise ValueError("edge_prob must be in (0, 1)")
        if self.p < 3:
            raise ValueError("need at least 3 variables")

    @classmethod
    def for_size(cls, p: int, max_retries: int = 10_000) -> "GraphSamplerParams":
        """Published defaults: (0.15, 3, 1) for p=8 and (0.09, 5, 3) for p=16."""
        if p == 8:
            return cls(8, 0.15, 3, 1, max_retries)
        if p == 16:
            return cls(16, 0.09, 5, 3, max_retries)
        raise ValueError(f"no published defaults for p={p}; construct directly")


@dataclasses.dataclass
class SamplerStats:
    """Diagnostics of one sampling run."""

    n_tries: int = 0
    raw_edge_counts: list = dataclasses.field(default_factory=list)
    accepted_edge_count: int = 0
    collider_triple_count: int = 0
    collider_node_count: int = 0


def collider_triples(g: Dmg, nodes=None) -> list[tuple[str, str, str]]:
    """Unordered triples (a, b, c) with a -> c <- b and a, b non-adjacent."""
    pool = list(nodes) if nodes is not None else list(g.nodes)
    out = []
    for c in pool:
        parents = sorted(p for p in g.parents(c) if p in pool)
        for i in range(len(parents)):
            for j in range(i + 1, len(parents)):
                a, b = parents[i], parents[j]
                if not g.adjacent(a, b):
                    out.append((a, b, c))
    return out


def sample_random_graph(params: GraphSamplerParams, seed=None,
                        stats: SamplerStats | None = None) -> Dmg:
    """Draw one benchmark graph; deterministic given the seed.

    Retries until a draw is acyclic, has at least `min_colliders` collider
    triples, and offers enough childless collider-descendants to host the
    selection node's parents.
    """
    rng = as_generator(seed)
    names = [f"X{i + 1}" for i in range(params.p)]
    for attempt in range(params.max_retries):
        draws = rng.random((params.p, params.p))
        edges = [(names[i], names[j])
                 for i in range(params.p) for j in range(params.p)
                 if i != j and draws[i, j] < params.edge_prob]
        if stats is not None:
            stats.n_tries = attempt + 1
            stats.raw_edge_counts.append(len(edges))
        g = Dmg.build(system=names, directed=edges)
        if not g.is_acyclic():
            continue
        triples = collider_triples(g)
        if len(triples) < params.min_colliders:
            continue
        collider_nodes = {c for _a, _b, c in triples}
        desc = descendants(g, collider_nodes)
        leafs = sorted(v for v in desc if not g.children(v))
        if len(leafs) < params.n_selection_parents:
            continue
        sel_parents = [leafs[i] for i in sorted(
            rng.choice(len(leafs), size=params.n_selection_parents,
                       replace=False))]
        sources = [v for v in names if not g.parents(v)]
        context = sources[int(rng.integers(len(sources)))]

        roles = [(v, NodeRole.CONTEXT if v == context else NodeRole.SYSTEM)
                 for v in names] + [("S", NodeRole.SELECTION)]
        out = Dmg(roles, directed=edges + [(v, "S") for v in sel_parents])
        if stats is not None:
            stats.accepted_edge_count = len(edges)
            stats.collider_triple_count = len(triples)
            stats.collider_node_count = len(collider_nodes)
        return out
    raise SimulationError(
        f"no admissible graph found in {params.max_retries} tries")


def fixed_graph() -> Dmg:
    """The seven-variable demonstration graph: a sound y-structure claim
    (X5 -> X6 via the context) next to a selection-induced spurious triple
    (C, X1, X2)."""
    nodes = [("C", NodeRole.CONTEXT)]
    nodes += [(f"X{i}", NodeRole.SYSTEM) for i in range(1, 7)]
    nodes += [("S", NodeRole.SELECTION)]
    return Dmg(nodes, directed=[
        ("C", "X1"), ("X1", "S"), ("X2", "S"), ("X3", "X2"),
        ("C", "X5"), ("X4", "X5"), ("X5", "X6")])
