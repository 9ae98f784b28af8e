"""Sigma- and d-separation over directed mixed graphs.

Separation queries run as a reachability closure over edge-traversal
states (a Bayes-ball generalization), which is polynomial-time and exact
for walks of unbounded length.  An independent path-enumerating reference
lives in the test suite and cross-validates this implementation.

Sigma-separation differs from d-separation only at conditioned
non-colliders: they block a walk only when they point at an adjacent walk
node in a *different* strongly connected component, which makes the two
notions coincide on acyclic graphs.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
from typing import Iterable, Protocol

from .errors import GraphError
from .graph import HEAD, Dmg

__all__ = [
    "Verdict", "CiVerdict", "CiModel", "GraphOracle",
    "sigma_separated", "d_separated", "oracle_ci",
    "is_minimal_independence", "is_minimal_dependence", "check_lemma1",
]


class Verdict(enum.Enum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    INCONCLUSIVE = "inconclusive"


@dataclasses.dataclass(frozen=True)
class CiVerdict:
    """Outcome of one conditional-independence query.

    Oracle verdicts carry no p-value and are never inconclusive.
    """

    verdict: Verdict
    p_value: float | None = None

    @property
    def independent(self) -> bool:
        return self.verdict is Verdict.INDEPENDENT

    @property
    def dependent(self) -> bool:
        return self.verdict is Verdict.DEPENDENT

    @property
    def inconclusive(self) -> bool:
        return self.verdict is Verdict.INCONCLUSIVE


class CiModel(Protocol):
    """Anything that can answer conditional-independence queries.

    Implementations must be symmetric in (x, y), must reject x or y
    appearing in z, and must be safe for read-only parallel use.
    """

    @property
    def variables(self) -> tuple[str, ...]: ...

    def query(self, x: str, y: str, z: Iterable[str] = ()) -> CiVerdict: ...


# -- separation closure ---------------------------------------------------


def _connected(g: Dmg, x_mask: int, y_mask: int, c_mask: int, sigma: bool) -> bool:
    """True iff an open walk links the x set to the y set given c."""
    k = g._kernel
    if x_mask & y_mask:
        return True
    anc_c = k.anc_mask(c_mask)
    scc = k.scc_id
    moves = k.moves
    n = k.n

    # state id for (prev node u, node v, arrival mark m): ((u * n) + v) * 2 + m
    visited = bytearray(2 * n * n)
    stack: list[tuple[int, int, int]] = []

    xs = x_mask
    i = 0
    while xs:
        if xs & 1:
            for w, _m_x, m_w in moves[i]:
                if y_mask >> w & 1:
                    return True
                sid = (i * n + w) * 2 + m_w
                if not visited[sid]:
                    visited[sid] = 1
                    stack.append((i, w, m_w))
        xs >>= 1
        i += 1

    c_has = c_mask
    while stack:
        u, v, m_in = stack.pop()
        v_bit = 1 << v
        v_in_c = bool(c_has & v_bit)
        v_in_anc_c = bool(anc_c & v_bit)
        for w, m_out, m_w in moves[v]:
            if m_in == HEAD and m_out == HEAD:
                if not v_in_anc_c:
                    continue  # blocked collider
            elif v_in_c:
                if not sigma:
                    continue  # conditioned non-collider blocks under d
                blocked = False
                if m_in != HEAD and scc[u] != scc[v]:
                    blocked = True
                elif m_out != HEAD and scc[w] != scc[v]:
                    blocked = True
                if blocked:
                    continue
            if y_mask >> w & 1:
                return True
            sid = (v * n + w) * 2 + m_w
            if not visited[sid]:
                visited[sid] = 1
                stack.append((v, w, m_w))
    return False


def _check_disjoint(g: Dmg, x, y, c) -> tuple[int, int, int]:
    k = g._kernel
    xm, ym, cm = k.mask_of(x), k.mask_of(y), k.mask_of(c)
    if xm & ym or xm & cm or ym & cm:
        raise GraphError("query sets must be pairwise disjoint")
    return xm, ym, cm


def sigma_separated(g: Dmg, x: Iterable[str], y: Iterable[str],
                    c: Iterable[str] = ()) -> bool:
    """True iff every walk between x and y is sigma-blocked by c."""
    xm, ym, cm = _check_disjoint(g, x, y, c)
    return not _connected(g, xm, ym, cm, sigma=True)


def d_separated(g: Dmg, x: Iterable[str], y: Iterable[str],
                c: Iterable[str] = ()) -> bool:
    """Classical d-separation; equals sigma-separation on acyclic graphs."""
    xm, ym, cm = _check_disjoint(g, x, y, c)
    return not _connected(g, xm, ym, cm, sigma=False)


# -- graph oracle ---------------------------------------------------------


class GraphOracle:
    """CI model answered by sigma-separation on a known graph.

    Selection nodes are conditioned on in every query when
    `condition_selection` is set (the observed-data regime); they can never
    be queried directly.  Verdicts are cached per (x, y, z) triple.
    """

    def __init__(self, g: Dmg, condition_selection: bool = True):
        self.graph = g
        self.condition_selection = condition_selection
        self._selection = frozenset(g.selection_nodes)
        self._vars = g.observable_nodes
        self._cache: dict[tuple, bool] = {}

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def context_variables(self) -> tuple[str, ...]:
        return self.graph.context_nodes

    def query(self, x: str, y: str, z: Iterable[str] = ()) -> CiVerdict:
        z = frozenset(z)
        if x == y or x in z or y in z:
            raise GraphError("x, y must be distinct and outside z")
        bad = ({x, y} | z) & self._selection
        if bad:
            raise GraphError(f"selection nodes cannot be queried: {sorted(bad)}")
        if x > y:
            x, y = y, x
        key = (x, y, z)
        sep = self._cache.get(key)
        if sep is None:
            cond = z | self._selection if self.condition_selection else z
            sep = sigma_separated(self.graph, [x], [y], cond)
            self._cache[key] = sep
        return CiVerdict(Verdict.INDEPENDENT if sep else Verdict.DEPENDENT)


def oracle_ci(g: Dmg, x: str, y: str, z: Iterable[str] = ()) -> CiVerdict:
    """One-shot oracle query with all selection nodes conditioned."""
    return GraphOracle(g).query(x, y, z)


# -- minimal (in)dependence ----------------------------------------------


def _verdicts_over_subsets(m: CiModel, x: str, y: str, w: frozenset[str],
                           z: frozenset[str]) -> tuple[CiVerdict, list[CiVerdict]]:
    full = m.query(x, y, w | z)
    proper = []
    for r in range(len(z)):
        for sub in itertools.combinations(sorted(z), r):
            proper.append(m.query(x, y, w | frozenset(sub)))
    return full, proper


def is_minimal_independence(m: CiModel, x: str, y: str,
                            w: Iterable[str] = (), z: Iterable[str] = ()) -> bool:
    """x and y independent given w+z, and dependent given w plus every
    proper subset of z.  Any inconclusive sub-verdict yields False."""
    w, z = frozenset(w), frozenset(z)
    if {x, y} & (w | z) or x == y or w & z:
        raise GraphError("x, y, w, z must be disjoint")
    full, proper = _verdicts_over_subsets(m, x, y, w, z)
    return full.independent and all(v.dependent for v in proper)


def is_minimal_dependence(m: CiModel, x: str, y: str,
                          w: Iterable[str] = (), z: Iterable[str] = ()) -> bool:
    """Dual of `is_minimal_independence`."""
    w, z = frozenset(w), frozenset(z)
    if {x, y} & (w | z) or x == y or w & z:
        raise GraphError("x, y, w, z must be disjoint")
    full, proper = _verdicts_over_subsets(m, x, y, w, z)
    return full.dependent and all(v.independent for v in proper)


# -- exhaustive inference-rule check ---------------------------------------


def check_lemma1(g: Dmg) -> dict:
    """Enumerate disjoint ({x},{y},w,z) tuples with nonempty z and test the
    two ancestral inference rules against the sigma-oracle.

    A minimal independence given z must imply z subset-of an(x,y,w); a
    minimal dependence given z must imply z not-subset-of an(x,y,w) (the
    disjunctive reading).  The stricter "no element of z ancestral" form of
    the dependence rule is tallied separately for diagnostics.

    Runtime grows as 3^(n-2) per node pair; intended for graphs with at
    most ~7 nodes.
    """
    nodes = list(g.nodes)
    k = g._kernel

    verdict_cache: dict[tuple[int, int, int], bool] = {}

    def separated(xi: int, yi: int, c_mask: int) -> bool:
        if xi > yi:
            xi, yi = yi, xi
        key = (xi, yi, c_mask)
        out = verdict_cache.get(key)
        if out is None:
            out = not _connected(g, 1 << xi, 1 << yi, c_mask, sigma=True)
            verdict_cache[key] = out
        return out

    n = len(nodes)
    n_tuples = 0
    n_min_indep = 0
    n_min_dep = 0
    eq3_violations: list[dict] = []
    eq4_weak_violations: list[dict] = []
    eq4_strong_violations = 0

    def record(bucket, xi, yi, w_mask, z_mask):
        bucket.append({
            "x": nodes[xi], "y": nodes[yi],
            "w": sorted(k.ids_of(w_mask)), "z": sorted(k.ids_of(z_mask)),
        })

    for xi, yi in itertools.combinations(range(n), 2):
        rest = [i for i in range(n) if i != xi and i != yi]
        for assign in itertools.product((0, 1, 2), repeat=len(rest)):
            w_mask = 0
            z_mask = 0
            for i, a in zip(rest, assign):
                if a == 1:
                    w_mask |= 1 << i
                elif a == 2:
                    z_mask |= 1 << i
            if not z_mask:
                continue
            n_tuples += 1

            z_bits = [i for i in rest if z_mask >> i & 1]
            full_sep = separated(xi, yi, w_mask | z_mask)
            sub_seps = []
            for r in range(len(z_bits)):
                for sub in itertools.combinations(z_bits, r):
                    sm = 0
                    for i in sub:
                        sm |= 1 << i
                    sub_seps.append(separated(xi, yi, w_mask | sm))

            an_mask = k.anc_mask((1 << xi) | (1 << yi) | w_mask)
            if full_sep and not any(sub_seps):
                n_min_indep += 1
                if z_mask & ~an_mask:  # some z element not ancestral
                    record(eq3_violations, xi, yi, w_mask, z_mask)
            elif not full_sep and all(sub_seps):
                n_min_dep += 1
                if z_mask & an_mask == z_mask:  # z entirely ancestral
                    record(eq4_weak_violations, xi, yi, w_mask, z_mask)
                if z_mask & an_mask:  # some z element ancestral
                    eq4_strong_violations += 1

    return {
        "nodes": n,
        "n_tuples": n_tuples,
        "n_minimal_independences": n_min_indep,
        "n_minimal_dependences": n_min_dep,
        "eq3_violations": eq3_violations,
        "eq4_violations": eq4_weak_violations,
        "eq4_strong_form_violations": eq4_strong_violations,
        "n_counterexamples": len(eq3_violations) + len(eq4_weak_violations),
    }
