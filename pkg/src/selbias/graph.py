"""Directed mixed graphs with node roles.

A graph holds system, context and selection nodes, directed edges and
bidirected edges (latent confounding).  A pair of nodes may carry any
subset of {a->b, b->a, a<->b} simultaneously; self loops are rejected.
Graphs are immutable after construction, so every operation here is a
pure function and safe for parallel use.
"""

from __future__ import annotations

import enum
from functools import cached_property
from typing import Iterable, Sequence

from .errors import FormatError, GraphError

TAIL = 0
HEAD = 1


class NodeRole(enum.Enum):
    SYSTEM = "system"
    CONTEXT = "context"
    SELECTION = "selection"

    @classmethod
    def parse(cls, token: str) -> "NodeRole":
        try:
            return cls(token.lower())
        except ValueError:
            raise FormatError(f"unknown node role {token!r}") from None


class JciFlag:
    """Toggle for the exogeneity background-knowledge assumption."""

    __slots__ = ("enabled",)

    def __init__(self, enabled: bool = True):
        self.enabled = bool(enabled)

    def __bool__(self) -> bool:
        return self.enabled

    def __repr__(self) -> str:
        return f"JciFlag(enabled={self.enabled})"


class _Kernel:
    """Integer-indexed view of a graph, precomputed for fast traversal."""

    __slots__ = (
        "n", "ids", "index", "roles", "parents", "children", "spouses",
        "anc", "desc", "scc_id", "moves",
    )

    def __init__(self, ids, roles, directed, bidirected):
        n = len(ids)
        self.n = n
        self.ids = ids
        self.index = {v: i for i, v in enumerate(ids)}
        self.roles = roles

        parents = [0] * n
        children = [0] * n
        spouses = [0] * n
        moves: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for a, b in directed:
            i, j = self.index[a], self.index[b]
            parents[j] |= 1 << i
            children[i] |= 1 << j
            moves[i].append((j, TAIL, HEAD))
            moves[j].append((i, HEAD, TAIL))
        for a, b in bidirected:
            i, j = self.index[a], self.index[b]
            spouses[i] |= 1 << j
            spouses[j] |= 1 << i
            moves[i].append((j, HEAD, HEAD))
            moves[j].append((i, HEAD, HEAD))
        self.parents = parents
        self.children = children
        self.spouses = spouses
        self.moves = [tuple(m) for m in moves]
        self.anc = _closure(parents)
        self.desc = _closure(children)
        self.scc_id = [_lowest_bit(self.anc[i] & self.desc[i]) for i in range(n)]

    def mask_of(self, nodes: Iterable[str]) -> int:
        mask = 0
        for v in nodes:
            try:
                mask |= 1 << self.index[v]
            except KeyError:
                raise GraphError(f"unknown node id {v!r}") from None
        return mask

    def ids_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.ids[i] for i in range(self.n) if mask >> i & 1)

    def anc_mask(self, mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= self.anc[i]
            mask >>= 1
            i += 1
        return out

    def desc_mask(self, mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= self.desc[i]
            mask >>= 1
            i += 1
        return out


def _closure(step_masks: list[int]) -> list[int]:
    """Reflexive-transitive closure of a one-step relation given as bitmasks."""
    n = len(step_masks)
    out = [step_masks[i] | (1 << i) for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = out[i]
            rest = acc
            j = 0
            while rest:
                if rest & 1:
                    acc |= out[j]
                rest >>= 1
                j += 1
            if acc != out[i]:
                out[i] = acc
                changed = True
    return out


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class Dmg:
    """Immutable directed mixed graph with node roles.

    Parameters
    ----------
    nodes : sequence of (id, NodeRole) pairs, order preserved.
    directed : iterable of (a, b) pairs meaning a -> b.
    bidirected : iterable of unordered pairs meaning a <-> b.
    """

    def __init__(self, nodes: Sequence[tuple[str, NodeRole]],
                 directed: Iterable[tuple[str, str]] = (),
                 bidirected: Iterable[tuple[str, str]] = ()):
        ids = []
        roles = {}
        for v, role in nodes:
            if v in roles:
                raise GraphError(f"duplicate node id {v!r}")
            if not isinstance(role, NodeRole):
                role = NodeRole.parse(role)
            ids.append(v)
            roles[v] = role
        self._ids = tuple(ids)
        self._roles = roles
        known = set(ids)

        dedges = set()
        for a, b in directed:
            if a not in known or b not in known:
                raise GraphError(f"edge references unknown node: {a!r} -> {b!r}")
            if a == b:
                raise GraphError(f"self loop on {a!r}")
            dedges.add((a, b))
        bedges = set()
        order = {v: i for i, v in enumerate(ids)}
        for a, b in bidirected:
            if a not in known or b not in known:
                raise GraphError(f"edge references unknown node: {a!r} <-> {b!r}")
            if a == b:
                raise GraphError(f"self loop on {a!r}")
            if order[a] > order[b]:
                a, b = b, a
            bedges.add((a, b))
        self._directed = frozenset(dedges)
        self._bidirected = frozenset(bedges)

    @classmethod
    def build(cls, system: Sequence[str] = (), context: Sequence[str] = (),
              selection: Sequence[str] = (), directed: Iterable = (),
              bidirected: Iterable = ()) -> "Dmg":
        nodes = [(v, NodeRole.SYSTEM) for v in system]
        nodes += [(v, NodeRole.CONTEXT) for v in context]
        nodes += [(v, NodeRole.SELECTION) for v in selection]
        return cls(nodes, directed, bidirected)

    # -- introspection -------------------------------------------------

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._ids

    @property
    def directed_edges(self) -> frozenset[tuple[str, str]]:
        return self._directed

    @property
    def bidirected_edges(self) -> frozenset[tuple[str, str]]:
        return self._bidirected

    def role(self, v: str) -> NodeRole:
        try:
            return self._roles[v]
        except KeyError:
            raise GraphError(f"unknown node id {v!r}") from None

    def nodes_with_role(self, role: NodeRole) -> tuple[str, ...]:
        return tuple(v for v in self._ids if self._roles[v] is role)

    @property
    def system_nodes(self) -> tuple[str, ...]:
        return self.nodes_with_role(NodeRole.SYSTEM)

    @property
    def context_nodes(self) -> tuple[str, ...]:
        return self.nodes_with_role(NodeRole.CONTEXT)

    @property
    def selection_nodes(self) -> tuple[str, ...]:
        return self.nodes_with_role(NodeRole.SELECTION)

    @property
    def observable_nodes(self) -> tuple[str, ...]:
        return tuple(v for v in self._ids
                     if self._roles[v] is not NodeRole.SELECTION)

    def has_directed(self, a: str, b: str) -> bool:
        return (a, b) in self._directed

    def has_bidirected(self, a: str, b: str) -> bool:
        k = self._kernel
        i, j = k.index[a], k.index[b]
        if i > j:
            a, b = b, a
        return (a, b) in self._bidirected

    def adjacent(self, a: str, b: str) -> bool:
        return ((a, b) in self._directed or (b, a) in self._directed
                or self.has_bidirected(a, b))

    def parents(self, v: str) -> frozenset[str]:
        k = self._kernel
        return k.ids_of(k.parents[k.index[v]])

    def children(self, v: str) -> frozenset[str]:
        k = self._kernel
        return k.ids_of(k.children[k.index[v]])

    def induced(self, keep: Iterable[str]) -> "Dmg":
        """Induced subgraph on `keep` (edges simply restricted, no projection)."""
        keep = set(keep)
        for v in keep:
            self.role(v)
        nodes = [(v, self._roles[v]) for v in self._ids if v in keep]
        directed = [(a, b) for a, b in self._directed if a in keep and b in keep]
        bidirected = [(a, b) for a, b in self._bidirected if a in keep and b in keep]
        return Dmg(nodes, directed, bidirected)

    @cached_property
    def _kernel(self) -> _Kernel:
        return _Kernel(self._ids,
                       [self._roles[v] for v in self._ids],
                       self._directed, self._bidirected)

    def is_acyclic(self) -> bool:
        k = self._kernel
        return all(k.anc[i] & k.desc[i] == 1 << i for i in range(k.n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dmg):
            return NotImplemented
        return (self._ids == other._ids and self._roles == other._roles
                and self._directed == other._directed
                and self._bidirected == other._bidirected)

    def __hash__(self) -> int:
        return hash((self._ids, self._directed, self._bidirected))

    def __repr__(self) -> str:
        return (f"Dmg(nodes={len(self._ids)}, directed={len(self._directed)}, "
                f"bidirected={len(self._bidirected)})")


# -- spec operations ----------------------------------------------------


def ancestors(g: Dmg, nodes: Iterable[str]) -> frozenset[str]:
    """Reflexive-transitive closure of the parent relation over `nodes`."""
    k = g._kernel
    return k.ids_of(k.anc_mask(k.mask_of(nodes)))


def descendants(g: Dmg, nodes: Iterable[str]) -> frozenset[str]:
    """Reflexive-transitive closure of the child relation over `nodes`."""
    k = g._kernel
    return k.ids_of(k.desc_mask(k.mask_of(nodes)))


def strongly_connected_component(g: Dmg, v: str) -> frozenset[str]:
    """Nodes on directed cycles through `v` (ancestors intersected with
    descendants; a singleton on acyclic graphs)."""
    k = g._kernel
    i_mask = k.mask_of([v])
    return k.ids_of(k.anc_mask(i_mask) & k.desc_mask(i_mask))


def validate_jci1(g: Dmg) -> bool:
    """True iff no system or selection node is an ancestor of a context node."""
    k = g._kernel
    non_context = 0
    for i in range(k.n):
        if k.roles[i] is not NodeRole.CONTEXT:
            non_context |= 1 << i
    for i in range(k.n):
        if k.roles[i] is NodeRole.CONTEXT and k.anc[i] & non_context:
            return False
    return True


def latent_projection(g: Dmg, keep: Iterable[str]) -> Dmg:
    """Marginalize the graph onto `keep`.

    Kept pair (a, b) receives a -> b iff a directed path a -> ... -> b runs
    through dropped nodes only, and a <-> b iff a path through dropped
    non-collider nodes only carries an arrowhead at both a and b.  Ancestral
    relations among kept nodes are preserved exactly.
    """
    k = g._kernel
    keep_mask = k.mask_of(keep)
    kept = [i for i in range(k.n) if keep_mask >> i & 1]
    kept_set = set(kept)

    directed: set[tuple[int, int]] = set()
    bidirected: set[tuple[int, int]] = set()

    for a in kept:
        # directed: forward reachability through dropped nodes
        seen = 0
        stack = [a]
        while stack:
            u = stack.pop()
            ch = k.children[u]
            j = 0
            while ch:
                if ch & 1:
                    if j in kept_set:
                        if j != a:
                            directed.add((a, j))
                    elif not seen >> j & 1:
                        seen |= 1 << j
                        stack.append(j)
                ch >>= 1
                j += 1

        # bidirected: arrowhead-at-both-ends paths, dropped non-collider interior
        seen_state = set()
        stack2: list[tuple[int, int]] = []

        def arrive(x: int, mark: int):
            if x in kept_set:
                if mark == HEAD and x != a:
                    bidirected.add((min(a, x), max(a, x)))
            elif (x, mark) not in seen_state:
                seen_state.add((x, mark))
                stack2.append((x, mark))

        for w, m_a, m_w in k.moves[a]:
            if m_a == HEAD:  # first edge must point at a
                arrive(w, m_w)
        while stack2:
            l, mark = stack2.pop()
            for w, m_l, m_w in k.moves[l]:
                if mark == HEAD and m_l == HEAD:
                    continue  # l would be a collider
                arrive(w, m_w)

    ids = [k.ids[i] for i in kept]
    nodes = [(v, g.role(v)) for v in ids]
    name = k.ids
    return Dmg(nodes,
               directed=[(name[i], name[j]) for i, j in directed],
               bidirected=[(name[i], name[j]) for i, j in bidirected])


# -- text format ---------------------------------------------------------

_ARROWS = {"->": "directed", "<->": "bidirected"}


def parse_graph(text: str) -> Dmg:
    """Parse the line-oriented graph format.

    One item per line: ``node <id> <system|context|selection>``,
    ``edge <a> -> <b>``, ``edge <a> <-> <b>``.  ``#`` starts a comment;
    declaration order does not matter.
    """
    nodes: list[tuple[str, NodeRole]] = []
    seen: set[str] = set()
    directed: list[tuple[str, str]] = []
    bidirected: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'node <id> <role>'")
            name, role = parts[1], NodeRole.parse(parts[2])
            if name in seen:
                raise FormatError(f"line {lineno}: duplicate node {name!r}")
            seen.add(name)
            nodes.append((name, role))
        elif parts[0] == "edge":
            if len(parts) != 4 or parts[2] not in _ARROWS:
                raise FormatError(
                    f"line {lineno}: expected 'edge <a> -> <b>' or 'edge <a> <-> <b>'")
            a, arrow, b = parts[1], parts[2], parts[3]
            (directed if arrow == "->" else bidirected).append((a, b))
        else:
            raise FormatError(f"line {lineno}: unknown directive {parts[0]!r}")
    for a, b in directed + bidirected:
        if a not in seen or b not in seen:
            raise FormatError(f"edge references undeclared node: {a!r}, {b!r}")
    try:
        return Dmg(nodes, directed, bidirected)
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


def format_graph(g: Dmg) -> str:
    """Serialize a graph to the text format (stable ordering)."""
    lines = [f"node {v} {g.role(v).value}" for v in g.nodes]
    lines += [f"edge {a} -> {b}" for a, b in sorted(g.directed_edges)]
    lines += [f"edge {a} <-> {b}" for a, b in sorted(g.bidirected_edges)]
    return "\n".join(lines) + "\n"


def load_graph(path) -> Dmg:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g: Dmg, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))
