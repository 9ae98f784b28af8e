"""Exhaustive and randomized verification over small mixed graphs.

Every unordered node pair carries one of 8 edge states (any subset of
forward, backward, bidirected), so a graph over m pairs is one of 8^m
encodings.  `verify_no_sound_3var_rule` buckets all exogeneity-respecting
graphs over (context, x, y) plus optional selection nodes by their
observable independence signature and reports which buckets force an
ancestral claim: with a selection node present none may, while without
selection the classic triple signature must force x -> y.
`verify_extended_ystructure` stress-tests the four-variable pattern's
soundness on random graphs with cycles and selection nodes.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .errors import BudgetError
from .graph import Dmg, NodeRole, latent_projection
from .patterns import find_y_structures
from .rngtools import as_generator
from .separation import GraphOracle, _connected

__all__ = ["enumerate_dmgs", "encode_graph", "decode_graph",
           "independence_signature", "verify_no_sound_3var_rule",
           "verify_extended_ystructure", "example_y_graphs"]

_MAX_NODES = 5

_FWD, _BWD, _BI = 1, 2, 4


def _pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def _edges_from_states(names: Sequence[str], states: Sequence[int]):
    directed = []
    bidirected = []
    for (i, j), s in zip(_pairs(len(names)), states):
        if s & _FWD:
            directed.append((names[i], names[j]))
        if s & _BWD:
            directed.append((names[j], names[i]))
        if s & _BI:
            bidirected.append((names[i], names[j]))
    return directed, bidirected


def decode_graph(code: int, nodes: Sequence[tuple[str, NodeRole]]) -> Dmg:
    """Graph for an integer encoding (base-8 digits over node pairs)."""
    names = [v for v, _ in nodes]
    m = len(_pairs(len(names)))
    states = []
    for _ in range(m):
        code, digit = divmod(code, 8)
        states.append(digit)
    directed, bidirected = _edges_from_states(names, states)
    return Dmg(list(nodes), directed, bidirected)


def encode_graph(g: Dmg) -> int:
    """Inverse of `decode_graph` for the graph's own node order."""
    names = list(g.nodes)
    code = 0
    for k, (i, j) in enumerate(_pairs(len(names))):
        s = 0
        if g.has_directed(names[i], names[j]):
            s |= _FWD
        if g.has_directed(names[j], names[i]):
            s |= _BWD
        if g.has_bidirected(names[i], names[j]):
            s |= _BI
        code += s * (8 ** k)
    return code


def _node_spec(observables, n_selection: int):
    nodes = []
    for item in observables:
        if isinstance(item, tuple):
            nodes.append(item)
        else:
            nodes.append((item, NodeRole.SYSTEM))
    nodes += [(f"S{i + 1}", NodeRole.SELECTION) for i in range(n_selection)]
    if len(nodes) > _MAX_NODES:
        raise BudgetError(
            f"{len(nodes)} nodes exceeds the {_MAX_NODES}-node enumeration guard")
    return nodes


def _jci_ok(names, roles, directed) -> bool:
    # exogeneity reduces to banning directed edges into context nodes from
    # non-context nodes: any violating ancestral path must end in one
    context = {names[i] for i, r in enumerate(roles) if r is NodeRole.CONTEXT}
    return not any(b in context and a not in context for a, b in directed)


def enumerate_dmgs(observables: Iterable, n_selection: int = 0,
                   jci=False):
    """Yield every 8-state edge assignment over the node pairs, optionally
    filtered to exogeneity-respecting graphs.

    `observables` is a list of node ids (system by default) or (id, role)
    pairs; selection nodes S1..Sk are appended.  At most 5 nodes total.
    """
    nodes = _node_spec(list(observables), n_selection)
    names = [v for v, _ in nodes]
    roles = [r for _, r in nodes]
    m = len(_pairs(len(names)))
    jci_on = bool(jci)
    for code in range(8 ** m):
        states = []
        c = code
        for _ in range(m):
            c, digit = divmod(c, 8)
            states.append(digit)
        directed, bidirected = _edges_from_states(names, states)
        if jci_on and not _jci_ok(names, roles, directed):
            continue
        yield Dmg(list(nodes), directed, bidirected)


def independence_signature(g: Dmg, observables: Sequence[str] | None = None
                           ) -> str:
    """Bit string over all observable CI queries, selection conditioned.

    Query order: unordered variable pairs in node order, each with the
    conditioning subsets of the remaining observables ordered by size then
    lexicographic position; bit 1 means independent.
    """
    if observables is None:
        observables = g.observable_nodes
    k = g._kernel
    sel_mask = k.mask_of(g.selection_nodes)
    obs_idx = [k.index[v] for v in observables]
    bits = []
    for a, b in itertools.combinations(range(len(obs_idx)), 2):
        rest = [obs_idx[t] for t in range(len(obs_idx)) if t not in (a, b)]
        for size in range(len(rest) + 1):
            for sub in itertools.combinations(rest, size):
                cond = sel_mask
                for i in sub:
                    cond |= 1 << i
                sep = not _connected(g, 1 << obs_idx[a], 1 << obs_idx[b],
                                     cond, sigma=True)
                bits.append("1" if sep else "0")
    return "".join(bits)


def signature_queries(observables: Sequence[str]) -> list[tuple]:
    """The (x, y, cond) query list matching `independence_signature` order."""
    out = []
    for a, b in itertools.combinations(range(len(observables)), 2):
        rest = [observables[t] for t in range(len(observables))
                if t not in (a, b)]
        for size in range(len(rest) + 1):
            for sub in itertools.combinations(rest, size):
                out.append((observables[a], observables[b], list(sub)))
    return out


def _bucket_run(n_selection: int) -> dict:
    """Enumerate all exogeneity-respecting graphs over (C, X, Y) plus
    selection nodes and bucket them by observable signature."""
    observables = [("C", NodeRole.CONTEXT), ("X", NodeRole.SYSTEM),
                   ("Y", NodeRole.SYSTEM)]
    names = ["C", "X", "Y"]
    buckets: dict[str, dict] = {}
    n_graphs = 0
    for g in enumerate_dmgs(observables, n_selection=n_selection, jci=True):
        n_graphs += 1
        sig = independence_signature(g, names)
        b = buckets.get(sig)
        if b is None:
            b = buckets[sig] = {"graph_count": 0, "selection_active": 0,
                                "x_an_y": 0, "y_an_x": 0}
        b["graph_count"] += 1
        k = g._kernel
        xi, yi = k.index["X"], k.index["Y"]
        if k.anc[yi] >> xi & 1:
            b["x_an_y"] += 1
        if k.anc[xi] >> yi & 1:
            b["y_an_x"] += 1
        if any(k.moves[k.index[s]] for s in g.selection_nodes):
            b["selection_active"] += 1
    for b in buckets.values():
        b["forced"] = {
            "x_an_y": b["x_an_y"] == b["graph_count"],
            "y_an_x": b["y_an_x"] == b["graph_count"],
        }
    return {
        "n_selection": n_selection,
        "n_graphs": n_graphs,
        "n_buckets": len(buckets),
        "buckets": buckets,
        "forced_buckets": sorted(
            sig for sig, b in buckets.items()
            if b["forced"]["x_an_y"] or b["forced"]["y_an_x"]),
    }


def verify_no_sound_3var_rule(n_selection: int = 1) -> dict:
    """Machine check of the three-variable impossibility.

    With `n_selection` selection nodes present, no signature bucket may
    force an ancestral claim between the system pair; without selection,
    the bucket holding the classic triple signature must force x -> y.
    """
    with_sel = _bucket_run(n_selection)
    without_sel = _bucket_run(0)

    chain = Dmg([("C", NodeRole.CONTEXT), ("X", NodeRole.SYSTEM),
                 ("Y", NodeRole.SYSTEM)],
                directed=[("C", "X"), ("X", "Y")])
    lcd_sig_plain = independence_signature(chain, ["C", "X", "Y"])
    chain_sel = Dmg([("C", NodeRole.CONTEXT), ("X", NodeRole.SYSTEM),
                     ("Y", NodeRole.SYSTEM)]
                    + [(f"S{i+1}", NodeRole.SELECTION)
                       for i in range(n_selection)],
                    directed=[("C", "X"), ("X", "Y")])
    lcd_sig_sel = independence_signature(chain_sel, ["C", "X", "Y"])

    lcd_bucket_no_sel = without_sel["buckets"].get(lcd_sig_plain, {})
    lcd_bucket_sel = with_sel["buckets"].get(lcd_sig_sel, {})
    return {
        "queries": [list(q) for q in signature_queries(["C", "X", "Y"])],
        "with_selection": with_sel,
        "without_selection": without_sel,
        "lcd_signature": lcd_sig_plain,
        "no_sound_rule_verified": not with_sel["forced_buckets"],
        "lcd_recovered_without_selection":
            bool(lcd_bucket_no_sel.get("forced", {}).get("x_an_y")),
        "lcd_not_forced_with_selection":
            not lcd_bucket_sel.get("forced", {}).get("x_an_y", False),
    }


def example_y_graphs() -> dict[str, Dmg]:
    """Named graphs exercising the four-variable pattern."""
    plain = Dmg.build(system=["V", "W", "X", "Y"],
                      directed=[("V", "X"), ("W", "X"), ("X", "Y")])
    spouses = Dmg.build(system=["V", "W", "X", "Y"],
                        directed=[("X", "Y")],
                        bidirected=[("V", "X"), ("W", "X")])
    selection = Dmg.build(system=["V", "W", "X", "Y"], selection=["S"],
                          directed=[("V", "X"), ("X", "Y"), ("W", "S")],
                          bidirected=[("X", "S")])
    return {"y_plain": plain, "y_spouses": spouses, "y_selection": selection}


def _check_hit_conclusions(g: Dmg, hit) -> list[str]:
    """Conclusions implied by a four-variable hit; returns violated ones."""
    k = g._kernel
    xi, yi = k.index[hit.source], k.index[hit.target]
    bad = []
    if not k.anc[yi] >> xi & 1:
        bad.append("source not ancestral to target")
    if k.anc[xi] >> yi & 1:
        bad.append("target ancestral to source")
    for s in g.selection_nodes:
        if k.anc[k.index[s]] >> xi & 1:
            bad.append(f"source ancestral to selection node {s}")
    proj = latent_projection(g, g.nodes)
    if proj.has_bidirected(hit.source, hit.target):
        bad.append("claim pair confounded in projection")
    return bad


def verify_extended_ystructure(n_graphs: int, max_selection: int = 2,
                               seed=None,
                               observables: Sequence[str] = ("V", "W", "X", "Y"),
                               ) -> dict:
    """Randomized soundness check of the extended pattern's conclusions.

    Samples graphs with every pair's edge state uniform over the 8 options
    (so cycles occur) and 0..max_selection selection nodes; every hit found
    by the oracle search must satisfy all four conclusions.  The named
    example graphs are checked first.
    """
    rng = as_generator(seed)
    injected = []
    for name, g in example_y_graphs().items():
        hits = find_y_structures(GraphOracle(g), extended=True)
        bad = [b for h in hits for b in _check_hit_conclusions(g, h)]
        injected.append({"graph": name, "n_hits": len(hits),
                         "ok": bool(hits) and not bad})

    n_hits = 0
    n_graphs_with_hits = 0
    counterexamples = []
    obs_nodes = [(v, NodeRole.SYSTEM) for v in observables]
    for _ in range(n_graphs):
        k_sel = int(rng.integers(0, max_selection + 1))
        nodes = obs_nodes + [(f"S{i + 1}", NodeRole.SELECTION)
                             for i in range(k_sel)]
        names = [v for v, _ in nodes]
        states = rng.integers(0, 8, size=len(_pairs(len(names))))
        directed, bidirected = _edges_from_states(names, states)
        g = Dmg(nodes, directed, bidirected)
        hits = find_y_structures(GraphOracle(g), extended=True)
        if not hits:
            continue
        n_graphs_with_hits += 1
        n_hits += len(hits)
        for h in hits:
            bad = _check_hit_conclusions(g, h)
            if bad:
                counterexamples.append({
                    "encoding": encode_graph(g), "n_selection": k_sel,
                    "hit": list(h.nodes), "violations": bad})
    return {
        "n_graphs": n_graphs,
        "max_selection": max_selection,
        "injected": injected,
        "n_hits": n_hits,
        "n_graphs_with_hits": n_graphs_with_hits,
        "n_counterexamples": len(counterexamples),
        "counterexamples": counterexamples[:20],
        "verified": (not counterexamples
                     and all(e["ok"] for e in injected)),
    }
