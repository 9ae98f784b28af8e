"""Scikit-learn style estimators wrapping the discovery methods.

These exist so the searches compose with the wider ecosystem: constructor
parameters only, `fit(X)` accepting a DataFrame, ndarray or Dataset,
`get_params`/`set_params`/`clone` via the sklearn base class, and fitted
attributes with trailing underscores (`hits_`, `results_`, `predictions_`).
"""

from __future__ import annotations

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array

from .citest import DataCiModel, Dataset, DecisionPolicy, ThresholdMode, \
    binarize_column
from .errors import DataError
from .icp import boost_preselect, icp_predict
from .patterns import (ICP, PatternHit, find_lcd,
                       find_y_structures, score_predictions)

__all__ = ["LcdDiscovery", "YStructureDiscovery", "IcpDiscovery"]


def _coerce_dataset(X, context, discrete=()) -> Dataset:
    if isinstance(X, Dataset):
        return X
    if isinstance(X, pd.DataFrame):
        columns = [str(c) for c in X.columns]
        values = check_array(X.to_numpy(dtype=float))
    else:
        values = check_array(np.asarray(X, dtype=float))
        columns = [f"X{i + 1}" for i in range(values.shape[1])]
    ctx = []
    if context is not None:
        name = columns[context] if isinstance(context, int) else str(context)
        if name not in columns:
            raise DataError(f"context column {name!r} not in input")
        ctx = [name]
    return Dataset(columns, values, context=ctx,
                   discrete=[c for c in discrete if c in columns])


class _DiscoveryBase(BaseEstimator):
    """Shared fit plumbing: input coercion, policy construction, bookkeeping."""

    def _policy(self) -> DecisionPolicy:
        mode = ThresholdMode.DUAL if self.dual_threshold else \
            ThresholdMode.SINGLE
        divisor = 1
        if self.dual_threshold:
            divisor = self.dual_divisor or max(1, self.n_features_in_)
        return DecisionPolicy(alpha=self.alpha, mode=mode,
                              dual_divisor=divisor)

    def _start_fit(self, X) -> Dataset:
        d = _coerce_dataset(X, self.context)
        self.n_features_in_ = len(d.columns)
        self.feature_names_in_ = np.asarray(d.columns, dtype=object)
        return d

    def _preselect_map(self, d: Dataset, targets) -> dict | None:
        if not self.preselect:
            return None
        return {t: boost_preselect(d, t, max_vars=self.max_preselect)
                for t in targets}


class LcdDiscovery(_DiscoveryBase):
    """Three-variable pattern search against a context column.

    Parameters mirror the underlying search: decision threshold(s), the
    context column (name or positional index), the context test flavor and
    optional boosting preselection of separator candidates.
    """

    def __init__(self, context="C", alpha: float = 0.01,
                 dual_threshold: bool = False, dual_divisor: int | None = None,
                 context_test: str = "fisherz", preselect: bool = False,
                 max_preselect: int = 8):
        self.context = context
        self.alpha = alpha
        self.dual_threshold = dual_threshold
        self.dual_divisor = dual_divisor
        self.context_test = context_test
        self.preselect = preselect
        self.max_preselect = max_preselect

    def fit(self, X, y=None):
        d = self._start_fit(X)
        if not d.context:
            raise DataError("lcd needs a context column")
        model = DataCiModel(d, self._policy(), context_test=self.context_test)
        targets = [c for c in d.system_columns]
        self.hits_ = find_lcd(model, d.context[0],
                              x_candidates=self._preselect_map(d, targets))
        self.predictions_ = score_predictions(self.hits_)
        return self


class YStructureDiscovery(_DiscoveryBase):
    """Four-variable (extended) pattern search.

    `fixed_v` pins the first auxiliary variable (the real-data trick of
    using the context there); `extended` switches off the symmetric
    auxiliary constraints.
    """

    def __init__(self, extended: bool = False, fixed_v: str | None = None,
                 context=None, alpha: float = 0.01,
                 dual_threshold: bool = False, dual_divisor: int | None = None,
                 context_test: str = "fisherz", preselect: bool = False,
                 max_preselect: int = 8):
        self.extended = extended
        self.fixed_v = fixed_v
        self.context = context
        self.alpha = alpha
        self.dual_threshold = dual_threshold
        self.dual_divisor = dual_divisor
        self.context_test = context_test
        self.preselect = preselect
        self.max_preselect = max_preselect

    def fit(self, X, y=None):
        d = self._start_fit(X)
        model = DataCiModel(d, self._policy(), context_test=self.context_test)
        x_cands = w_cands = None
        if self.preselect:
            targets = [c for c in d.system_columns]
            x_cands = self._preselect_map(d, targets)
            w_cands = self._preselect_map(d, targets)
        self.hits_ = find_y_structures(model, extended=self.extended,
                                       fixed_v=self.fixed_v,
                                       x_candidates=x_cands,
                                       w_candidates=w_cands)
        self.predictions_ = score_predictions(self.hits_)
        return self


class IcpDiscovery(_DiscoveryBase):
    """Invariant-prediction baseline over every system target."""

    def __init__(self, context="C", alpha: float = 0.01,
                 binarize_context: bool = True,
                 max_set_size: int | None = None, preselect_above: int = 8):
        self.context = context
        self.alpha = alpha
        self.binarize_context = binarize_context
        self.max_set_size = max_set_size
        self.preselect_above = preselect_above

    def fit(self, X, y=None):
        d = self._start_fit(X)
        if not d.context:
            raise DataError("invariant prediction needs a context column")
        ctx = d.context[0]
        if self.binarize_context and ctx not in d.discrete:
            d = binarize_column(d, ctx)
        policy = DecisionPolicy(alpha=self.alpha)
        self.results_ = {}
        hits = []
        for target in d.system_columns:
            result = icp_predict(d, target, ctx, policy,
                                 max_set_size=self.max_set_size,
                                 preselect_above=self.preselect_above)
            self.results_[target] = result
            for parent in result.parent_estimate:
                hits.append(PatternHit(
                    ICP, (parent, target), parent, target,
                    {"invariance": result.parent_pvalues[parent]}))
        self.hits_ = hits
        self.predictions_ = score_predictions(hits)
        return self
