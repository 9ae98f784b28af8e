"""Shared fixtures: named benchmark graphs and random-graph generators."""

from __future__ import annotations

import numpy as np

from selbias.graph import Dmg


def intro_graph() -> Dmg:
    """Three genes feeding a fitness/selection node: A->S, B->S, C->B."""
    return Dmg.build(system=["A", "B", "C"], selection=["S"],
                     directed=[("A", "S"), ("B", "S"), ("C", "B")])


def chain_graph() -> Dmg:
    """C -> X -> Y with a context source; the plain local-discovery archetype."""
    return Dmg.build(system=["X", "Y"], context=["C"],
                     directed=[("C", "X"), ("X", "Y")])


def lcd_failure_graph() -> Dmg:
    """C -> X, X -> S, Y -> S: the selection-induced spurious triple."""
    return Dmg.build(system=["X", "Y"], context=["C"], selection=["S"],
                     directed=[("C", "X"), ("X", "S"), ("Y", "S")])


def y_graph_plain() -> Dmg:
    """V -> X <- W, X -> Y: canonical unconfounded y-shape."""
    return Dmg.build(system=["V", "W", "X", "Y"],
                     directed=[("V", "X"), ("W", "X"), ("X", "Y")])


def y_graph_confounded_w() -> Dmg:
    """y-shape plus W <-> Y (as printed in the source figure)."""
    return Dmg.build(system=["V", "W", "X", "Y"],
                     directed=[("V", "X"), ("W", "X"), ("X", "Y")],
                     bidirected=[("W", "Y")])


def y_graph_bidirected() -> Dmg:
    """V <-> X <-> W, X -> Y."""
    return Dmg.build(system=["V", "W", "X", "Y"],
                     directed=[("X", "Y")],
                     bidirected=[("V", "X"), ("W", "X")])


def y_graph_selection() -> Dmg:
    """V -> X -> Y with X <-> S and W -> S: pattern created by selection."""
    return Dmg.build(system=["V", "W", "X", "Y"], selection=["S"],
                     directed=[("V", "X"), ("X", "Y"), ("W", "S")],
                     bidirected=[("X", "S")])


def sigma_vs_d_graph() -> Dmg:
    """Four-cycle with an entry and an exit; conditioning on two opposite
    cycle nodes separates under d but not under sigma."""
    return Dmg.build(
        system=["W", "X1", "X2", "X3", "X4", "Z"],
        directed=[("X1", "X2"), ("X2", "X3"), ("X3", "X4"), ("X4", "X1"),
                  ("W", "X1"), ("X3", "Z")])


def random_dmg(rng: np.random.Generator, n_nodes: int,
               p_directed: float = 0.25, p_bidirected: float = 0.15,
               acyclic: bool = False, n_selection: int = 0) -> Dmg:
    """Random mixed graph over nodes N0..N{k-1} (+ trailing selection nodes)."""
    names = [f"N{i}" for i in range(n_nodes)]
    directed = []
    bidirected = []
    for i in range(n_nodes):
        for j in range(n_nodes):
            if i == j:
                continue
            if acyclic and i > j:
                continue
            if rng.random() < p_directed:
                directed.append((names[i], names[j]))
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < p_bidirected:
                bidirected.append((names[i], names[j]))
    selection = names[n_nodes - n_selection:] if n_selection else []
    system = names[:n_nodes - n_selection] if n_selection else names
    return Dmg.build(system=system, selection=selection,
                     directed=directed, bidirected=bidirected)
