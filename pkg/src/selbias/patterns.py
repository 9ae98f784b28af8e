"""Local pattern search over a CI model and scoring of the implied claims.

Three patterns are mined, each claiming an ancestral relation x -> y:

* lcd: ordered triple (c, x, y) with the context c marginally dependent on
  x and y, x dependent on y, and c independent of y given x (a minimal
  conditional independence in x).
* yst-ext: ordered quadruple (v, w, x, y) with a minimal independence
  v _||_ y given [x] and a minimal dependence v _|/|_ w given [x].
* yst: yst-ext plus the symmetric constraints w _||_ y given [x].

Whatever the model always conditions on (selection, in the graph oracle)
is implicit in every query.  Statistical verdicts follow the model policy;
an inconclusive verdict anywhere discards the candidate tuple.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Mapping, Sequence

from .errors import DataError
from .separation import CiModel, CiVerdict

__all__ = ["PatternHit", "Prediction", "find_lcd", "find_y_structures",
           "score_predictions", "LCD", "YST", "YST_EXT", "P_CLAMP"]

LCD = "lcd"
YST = "yst"
YST_EXT = "yst-ext"
ICP = "icp"

P_CLAMP = 1e-300  # p-values of exactly 0 are clamped here before -log


@dataclasses.dataclass(frozen=True)
class PatternHit:
    """One discovered pattern instance and its ancestral claim."""

    kind: str
    nodes: tuple[str, ...]
    source: str
    target: str
    constraint_pvalues: Mapping[str, float] = dataclasses.field(
        default_factory=dict)

    def __post_init__(self):
        if self.source == self.target:
            raise DataError("claim source and target must differ")
        if len(set(self.nodes)) != len(self.nodes):
            raise DataError("pattern nodes must be distinct")


@dataclasses.dataclass(frozen=True)
class Prediction:
    """Scored ancestral claim, the unit ranked by the evaluation harness."""

    source: str
    target: str
    score: float
    kind: str
    supporting_hits: tuple[PatternHit, ...] = ()

    @property
    def n_hits(self) -> int:
        return len(self.supporting_hits)


def neg_log(p: float) -> float:
    return -math.log(max(p, P_CLAMP))


def _order_index(m: CiModel) -> dict[str, int]:
    return {v: i for i, v in enumerate(m.variables)}


def _default_claimable(m: CiModel) -> list[str]:
    """Variables eligible as claim endpoints: everything but the context."""
    context = set(getattr(m, "context_variables", ()))
    return [v for v in m.variables if v not in context]


def find_lcd(m: CiModel, context: str,
             x_candidates: Mapping[str, Sequence[str]] | None = None,
             system: Iterable[str] | None = None) -> list[PatternHit]:
    """All lcd triples (context, x, y) over the model's variables.

    `x_candidates` optionally restricts the separator search per target
    (preselection); `system` restricts the claim variables (defaults to
    every non-context variable).
    """
    variables = m.variables
    if context not in variables:
        raise DataError(f"context {context!r} is not a model variable")
    pool = [v for v in (system if system is not None
                        else _default_claimable(m)) if v != context]
    hits: list[PatternHit] = []
    for y in pool:
        v_cy = m.query(context, y)
        if not v_cy.dependent:
            continue
        xs = x_candidates.get(y, ()) if x_candidates is not None else pool
        for x in xs:
            if x == y or x == context:
                continue
            v_cx = m.query(context, x)
            if not v_cx.dependent:
                continue
            v_xy = m.query(x, y)
            if not v_xy.dependent:
                continue
            v_cond = m.query(context, y, [x])
            if not v_cond.independent:
                continue
            pvals = _collect_pvalues({
                "c_y": v_cy, "c_x": v_cx, "x_y": v_xy, "c_y|x": v_cond})
            hits.append(PatternHit(LCD, (context, x, y), x, y, pvals or {}))
    order = _order_index(m)
    hits.sort(key=lambda h: tuple(order[v] for v in h.nodes))
    return hits


def find_y_structures(m: CiModel, extended: bool = False,
                      fixed_v: str | None = None,
                      x_candidates: Mapping[str, Sequence[str]] | None = None,
                      w_candidates: Mapping[str, Sequence[str]] | None = None,
                      system: Iterable[str] | None = None) -> list[PatternHit]:
    """All (extended) y-structure quadruples (v, w, x, y).

    In extended mode the two auxiliary roles are asymmetric and both
    orderings of a pair may appear; the plain mode has symmetric
    constraints and reports each auxiliary pair once (canonical order).
    `fixed_v` pins the first auxiliary (e.g. to the context variable);
    `x_candidates` / `w_candidates` optionally restrict the search per
    target / per separator respectively.  Claims x -> y range over
    `system` (default: all non-context variables).
    """
    variables = m.variables
    if fixed_v is not None and fixed_v not in variables:
        raise DataError(f"fixed_v {fixed_v!r} is not a model variable")
    order = _order_index(m)
    claimable = list(system) if system is not None else _default_claimable(m)
    hits: list[PatternHit] = []
    for y in claimable:
        if y == fixed_v:
            continue
        xs = x_candidates.get(y, ()) if x_candidates is not None else claimable
        for x in xs:
            if x == y or x == fixed_v:
                continue
            vs = [fixed_v] if fixed_v is not None else \
                [v for v in variables if v not in (x, y)]
            for v in vs:
                if v in (x, y):
                    continue
                # minimal independence of (v, y) in x
                v_vy = m.query(v, y)
                if not v_vy.dependent:
                    continue
                v_vy_x = m.query(v, y, [x])
                if not v_vy_x.independent:
                    continue
                ws = w_candidates.get(x, ()) if w_candidates is not None else \
                    variables
                for w in ws:
                    if w in (v, x, y):
                        continue
                    if not extended and fixed_v is None and order[w] < order[v]:
                        continue  # canonical auxiliary order in plain mode
                    # minimal dependence of (v, w) in x
                    v_vw = m.query(v, w)
                    if not v_vw.independent:
                        continue
                    v_vw_x = m.query(v, w, [x])
                    if not v_vw_x.dependent:
                        continue
                    verdicts = {"v_y": v_vy, "v_y|x": v_vy_x,
                                "v_w": v_vw, "v_w|x": v_vw_x}
                    if extended:
                        # w-y marginal is not a constraint but feeds the score
                        verdicts["w_y"] = m.query(w, y)
                        kind = YST_EXT
                    else:
                        v_wy = m.query(w, y)
                        if not v_wy.dependent:
                            continue
                        v_wy_x = m.query(w, y, [x])
                        if not v_wy_x.independent:
                            continue
                        verdicts["w_y"] = v_wy
                        verdicts["w_y|x"] = v_wy_x
                        kind = YST
                    pvals = _collect_pvalues(verdicts)
                    hits.append(PatternHit(kind, (v, w, x, y), x, y,
                                           pvals or {}))
    hits.sort(key=lambda h: tuple(order[v] for v in h.nodes))
    return hits


def _collect_pvalues(verdicts: Mapping[str, CiVerdict]) -> dict | None:
    """P-values per constraint, or None when the model is an oracle."""
    if any(v.p_value is None for v in verdicts.values()):
        return None
    return {k: v.p_value for k, v in verdicts.items()}


def score_predictions(hits: Iterable[PatternHit]) -> list[Prediction]:
    """Aggregate hits into one scored prediction per (kind, source, target).

    lcd scores by the negative log of the context-target marginal p-value;
    y-structures score each hit by min(-log p_vy, -log p_wy) and keep the
    best hit per claim.  Oracle hits (no p-values) score 1.
    """
    groups: dict[tuple[str, str, str], list[PatternHit]] = {}
    for h in hits:
        groups.setdefault((h.kind, h.source, h.target), []).append(h)
    preds = []
    for (kind, source, target), group in sorted(groups.items()):
        scores = [_hit_score(h) for h in group]
        preds.append(Prediction(source, target, max(scores), kind,
                                tuple(group)))
    return preds


def _hit_score(h: PatternHit) -> float:
    if not h.constraint_pvalues:
        return 1.0
    p = h.constraint_pvalues
    if h.kind == LCD:
        return neg_log(p["c_y"])
    if h.kind in (YST, YST_EXT):
        try:
            return min(neg_log(p["v_y"]), neg_log(p["w_y"]))
        except KeyError as exc:
            raise DataError(f"hit missing p-value for {exc}") from exc
    if h.kind == ICP:
        return p["invariance"]
    raise DataError(f"cannot score pattern kind {h.kind!r}")
