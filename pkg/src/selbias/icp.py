"""Simplified invariant-prediction baseline and the boosting preselector.

For a target variable, every candidate parent subset is screened with the
context invariance test; subsets whose residual distribution is invariant
across context levels are accepted, and the parent estimate is the
intersection of all accepted subsets.  Candidate pools larger than
`preselect_above` are first reduced by componentwise least-squares
boosting.  This is a deliberately plain reimplementation of the procedure
(exhaustive subsets plus the invariance test); outputs are tagged
"simplified" via this module's docstring rather than any runtime switch.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Sequence

import numpy as np

from .citest import Dataset, DecisionPolicy, context_invariance_test
from .errors import DataError
from .patterns import ICP, PatternHit, Prediction, score_predictions

__all__ = ["IcpResult", "boost_preselect", "icp_predict", "icp_predictions"]


@dataclasses.dataclass(frozen=True)
class IcpResult:
    """Outcome of invariant prediction for one target."""

    target: str
    accepted_sets: tuple[tuple[str, ...], ...]
    parent_estimate: tuple[str, ...]
    parent_pvalues: dict[str, float]
    rejected: bool


def boost_preselect(d: Dataset, target: str, max_vars: int = 8,
                    n_steps: int = 100, step_size: float = 0.1,
                    candidates: Sequence[str] | None = None) -> tuple[str, ...]:
    """Componentwise least-squares boosting; returns the first `max_vars`
    distinct covariates in pick order.

    Each step picks the covariate most correlated with the current
    residual and moves the fit by `step_size` times its univariate
    least-squares coefficient.
    """
    if candidates is None:
        candidates = [c for c in d.system_columns if c != target]
    else:
        candidates = [c for c in candidates if c != target]
    y = d.column(target).astype(float)
    if np.std(y) == 0.0:
        raise DataError(f"target column {target!r} is constant")
    if not candidates:
        return ()
    X = d.matrix(candidates)
    X = X - X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0.0] = np.inf  # constant covariates are never picked
    var = sd * sd
    resid = y - y.mean()
    picked: list[str] = []
    seen: set[int] = set()
    for _ in range(n_steps):
        corr = (X.T @ resid) / (len(y) * sd * np.std(resid) + 1e-300)
        j = int(np.argmax(np.abs(corr)))
        coef = float(X[:, j] @ resid) / (len(y) * var[j])
        resid = resid - step_size * coef * X[:, j]
        if j not in seen:
            seen.add(j)
            picked.append(candidates[j])
    return tuple(picked[:max_vars])


def icp_predict(d: Dataset, target: str, context: str | None = None,
                policy: DecisionPolicy | None = None,
                max_set_size: int | None = None,
                preselect_above: int = 8, max_vars: int = 8) -> IcpResult:
    """Estimate the parents of `target` by exhaustive invariance testing.

    Subsets (including the empty set) of the candidate pool are accepted
    when the invariance p-value is at least the policy alpha; the estimate
    is the intersection of accepted subsets, each member scored by the
    largest invariance p-value among accepted subsets.
    """
    policy = policy or DecisionPolicy()
    if context is None:
        if not d.context:
            raise DataError("no context column available")
        context = d.context[0]
    if context not in d.discrete:
        raise DataError(f"context column {context!r} must be discrete")
    pool = [c for c in d.system_columns if c != target]
    if not pool:
        raise DataError("empty candidate pool")
    if len(pool) > preselect_above:
        pool = list(boost_preselect(d, target, max_vars=max_vars,
                                    candidates=pool))
    limit = len(pool) if max_set_size is None else min(max_set_size, len(pool))

    accepted: list[tuple[str, ...]] = []
    accepted_ps: list[float] = []
    for size in range(limit + 1):
        for subset in itertools.combinations(pool, size):
            p = context_invariance_test(d, target, list(subset), context)
            if p >= policy.alpha:
                accepted.append(subset)
                accepted_ps.append(p)
    if not accepted:
        return IcpResult(target, (), (), {}, rejected=True)
    estimate = set(accepted[0])
    for subset in accepted[1:]:
        estimate &= set(subset)
    parent_pvalues = {
        parent: max(p for subset, p in zip(accepted, accepted_ps)
                    if parent in subset)
        for parent in sorted(estimate)
    }
    return IcpResult(target, tuple(accepted), tuple(sorted(estimate)),
                     parent_pvalues, rejected=False)


def icp_predictions(d: Dataset, context: str | None = None,
                    policy: DecisionPolicy | None = None,
                    targets: Sequence[str] | None = None,
                    max_set_size: int | None = None,
                    preselect_above: int = 8) -> list[Prediction]:
    """Run the baseline over every target and emit scored claims."""
    if context is None:
        if not d.context:
            raise DataError("no context column available")
        context = d.context[0]
    if targets is None:
        targets = [c for c in d.system_columns]
    hits = []
    for target in targets:
        result = icp_predict(d, target, context, policy,
                             max_set_size=max_set_size,
                             preselect_above=preselect_above)
        for parent in result.parent_estimate:
            hits.append(PatternHit(
                ICP, (parent, target), parent, target,
                {"invariance": result.parent_pvalues[parent]}))
    return score_predictions(hits)
