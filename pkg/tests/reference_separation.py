"""Independent reference for separation queries: enumerate all simple paths
(with explicit edge choices for multi-edge pairs) and transcribe the three
blocking rules directly.  Exponential, for cross-validation on tiny graphs."""

from __future__ import annotations

from selbias.graph import Dmg, ancestors, strongly_connected_component

TAIL, HEAD = "tail", "head"


def _edge_choices(g: Dmg, a: str, b: str):
    """All edges between a and b as (mark_at_a, mark_at_b) pairs."""
    out = []
    if g.has_directed(a, b):
        out.append((TAIL, HEAD))
    if g.has_directed(b, a):
        out.append((HEAD, TAIL))
    if g.has_bidirected(a, b):
        out.append((HEAD, HEAD))
    return out


def _all_paths(g: Dmg, x: str, y: str):
    """Yield paths as [(node, mark_in, mark_out), ...] including endpoints,
    where endpoint marks facing outward are None."""
    nodes = list(g.nodes)

    def extend(path_nodes, path_edges):
        cur = path_nodes[-1]
        for nxt in nodes:
            if nxt in path_nodes:
                continue
            for marks in _edge_choices(g, cur, nxt):
                if nxt == y:
                    yield path_nodes + [nxt], path_edges + [marks]
                else:
                    yield from extend(path_nodes + [nxt], path_edges + [marks])

    yield from extend([x], [])


def _path_blocked(g: Dmg, path_nodes, path_edges, cond: frozenset[str],
                  sigma: bool) -> bool:
    if path_nodes[0] in cond or path_nodes[-1] in cond:
        return True
    an_c = ancestors(g, cond) if cond else frozenset()
    for i in range(1, len(path_nodes) - 1):
        v = path_nodes[i]
        mark_in = path_edges[i - 1][1]   # mark at v on the incoming edge
        mark_out = path_edges[i][0]      # mark at v on the outgoing edge
        if mark_in == HEAD and mark_out == HEAD:
            if v not in an_c:
                return True  # collider outside an(cond)
        else:
            if v in cond:
                if not sigma:
                    return True
                scc = strongly_connected_component(g, v)
                if mark_in == TAIL and path_nodes[i - 1] not in scc:
                    return True
                if mark_out == TAIL and path_nodes[i + 1] not in scc:
                    return True
    return False


def separated_by_paths(g: Dmg, x: str, y: str, cond=(), sigma=True) -> bool:
    """True iff every simple path between x and y is blocked."""
    cond = frozenset(cond)
    for path_nodes, path_edges in _all_paths(g, x, y):
        if not _path_blocked(g, path_nodes, path_edges, cond, sigma):
            return False
    return True
