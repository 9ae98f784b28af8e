"""Finite-sample conditional-independence tests and the decision policy.

Two tests are provided: a Fisher-z partial correlation test (the default
for continuous columns) and a regression-residual invariance test against
a discrete context column (Welch t on residual means plus a two-sided F on
residual variances, Bonferroni-combined).  `decide` turns p-values into
verdicts under a single- or dual-threshold policy.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from .errors import DataError, FormatError, GraphError
from .separation import CiVerdict, Verdict

__all__ = [
    "Dataset", "DecisionPolicy", "ThresholdMode",
    "partial_correlation_test", "fisher_z_pvalue",
    "context_invariance_test", "decide", "DataCiModel", "binarize_column",
]


class Dataset:
    """Immutable numeric table with role-tagged columns.

    Columns are system variables unless listed in `context`; columns in
    `discrete` hold a small number of levels (required for the invariance
    test and for the invariant-prediction baseline).
    """

    def __init__(self, columns: Sequence[str], values: np.ndarray,
                 context: Sequence[str] = (), discrete: Sequence[str] = ()):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(columns):
            raise DataError("values must be (n_rows, n_columns)")
        if len(set(columns)) != len(columns):
            raise DataError("duplicate column ids")
        if not np.all(np.isfinite(values)):
            raise DataError("missing or non-finite values are not supported")
        unknown = (set(context) | set(discrete)) - set(columns)
        if unknown:
            raise DataError(f"unknown columns tagged: {sorted(unknown)}")
        if len(context) > 1:
            raise DataError("at most one context column is supported")
        self.columns = tuple(columns)
        self.values = values
        self.values.setflags(write=False)
        self.context = tuple(context)
        self.discrete = tuple(discrete)
        self._index = {c: i for i, c in enumerate(self.columns)}

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def system_columns(self) -> tuple[str, ...]:
        ctx = set(self.context)
        return tuple(c for c in self.columns if c not in ctx)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self._index[name]]
        except KeyError:
            raise DataError(f"unknown column {name!r}") from None

    def matrix(self, names: Iterable[str]) -> np.ndarray:
        return self.values[:, [self._index[c] for c in names]]

    def select(self, names: Sequence[str]) -> "Dataset":
        ctx = [c for c in self.context if c in names]
        disc = [c for c in self.discrete if c in names]
        return Dataset(names, self.matrix(names), context=ctx, discrete=disc)

    def take_rows(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.columns, self.values[idx],
                       context=self.context, discrete=self.discrete)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, columns=list(self.columns))

    # -- CSV + sidecar -----------------------------------------------------

    def to_csv(self, path) -> None:
        path = Path(path)
        self.to_frame().to_csv(path, index=False)
        meta = {"context": list(self.context), "discrete": list(self.discrete)}
        if meta["context"] or meta["discrete"]:
            sidecar_path(path).write_text(json.dumps(meta, sort_keys=True) + "\n",
                                          encoding="utf-8")

    @classmethod
    def from_csv(cls, path, context: Sequence[str] | None = None,
                 discrete: Sequence[str] | None = None) -> "Dataset":
        path = Path(path)
        try:
            frame = pd.read_csv(path)
        except (ValueError, pd.errors.ParserError) as exc:
            raise FormatError(f"cannot parse CSV {path}: {exc}") from exc
        if frame.empty or frame.shape[1] == 0:
            raise FormatError(f"CSV {path} has no data")
        meta = {}
        sp = sidecar_path(path)
        if sp.exists():
            try:
                meta = json.loads(sp.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise FormatError(f"bad sidecar {sp}: {exc}") from exc
        if context is None:
            context = meta.get("context", [])
        if discrete is None:
            discrete = meta.get("discrete", [])
        try:
            values = frame.to_numpy(dtype=float)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"non-numeric data in {path}: {exc}") from exc
        try:
            return cls(list(frame.columns), values, context=context,
                       discrete=discrete)
        except DataError as exc:
            raise FormatError(str(exc)) from exc


def sidecar_path(csv_path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_suffix(".meta.json")


def binarize_column(d: Dataset, name: str) -> Dataset:
    """Dichotomize a column around its empirical mean and mark it discrete."""
    col = d.column(name)
    values = d.values.copy()
    values[:, d.columns.index(name)] = (col > col.mean()).astype(float)
    discrete = d.discrete if name in d.discrete else d.discrete + (name,)
    return Dataset(d.columns, values, context=d.context, discrete=discrete)


# -- decision policy ------------------------------------------------------


class ThresholdMode(enum.Enum):
    SINGLE = "single"
    DUAL = "dual"


@dataclasses.dataclass(frozen=True)
class DecisionPolicy:
    """Accept/reject policy for independence p-values.

    Single mode splits at `alpha`.  Dual mode accepts independence at
    p >= alpha, rejects below alpha / dual_divisor, and is inconclusive in
    between; the divisor conventionally equals the number of variables.
    """

    alpha: float = 0.01
    mode: ThresholdMode = ThresholdMode.SINGLE
    dual_divisor: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DataError("alpha must be in (0, 1)")
        if self.dual_divisor < 1:
            raise DataError("dual_divisor must be a positive integer")


def decide(p: float, policy: DecisionPolicy,
           null_is_independence: bool = True) -> CiVerdict:
    """Map a p-value to a verdict under the policy."""
    if policy.mode is ThresholdMode.SINGLE:
        verdict = Verdict.DEPENDENT if p < policy.alpha else Verdict.INDEPENDENT
    else:
        if p >= policy.alpha:
            verdict = Verdict.INDEPENDENT
        elif p < policy.alpha / policy.dual_divisor:
            verdict = Verdict.DEPENDENT
        else:
            verdict = Verdict.INCONCLUSIVE
    if not null_is_independence:
        swap = {Verdict.DEPENDENT: Verdict.INDEPENDENT,
                Verdict.INDEPENDENT: Verdict.DEPENDENT}
        verdict = swap.get(verdict, verdict)
    return CiVerdict(verdict, p)


# -- Fisher-z partial correlation test -------------------------------------

_R_CLAMP = 1.0 - 1e-12


def fisher_z_pvalue(r: float, n: int, n_cond: int) -> tuple[float, float]:
    """Two-sided Fisher-z p-value for a (partial) correlation.

    Returns (statistic, p).  `n_cond` is the size of the conditioning set.
    """
    if n - n_cond - 3 <= 0:
        raise DataError(f"need more than {n_cond + 3} rows, got {n}")
    r = float(np.clip(r, -_R_CLAMP, _R_CLAMP))
    z = math.atanh(r)
    statistic = z * math.sqrt(n - n_cond - 3)
    p = 2.0 * stats.norm.sf(abs(statistic))
    return statistic, float(p)


def partial_correlation_test(d: Dataset, x: str, y: str,
                             z: Iterable[str] = ()) -> float:
    """Fisher-z test of x and y given z via regression residuals."""
    z = list(z)
    if x in z or y in z:
        raise DataError("x, y must not appear in z")
    n = d.n_rows
    if n - len(z) - 3 <= 0:
        raise DataError(f"need more than {len(z) + 3} rows, got {n}")
    xv = d.column(x)
    yv = d.column(y)
    for name, col in ((x, xv), (y, yv)):
        if np.std(col) == 0.0:
            raise DataError(f"column {name!r} is constant")
    if z:
        design = np.column_stack([np.ones(n), d.matrix(z)])
        coef_x, *_ = np.linalg.lstsq(design, xv, rcond=None)
        coef_y, *_ = np.linalg.lstsq(design, yv, rcond=None)
        rx = xv - design @ coef_x
        ry = yv - design @ coef_y
        sx, sy = np.std(rx), np.std(ry)
        if sx == 0.0 or sy == 0.0:
            raise DataError("residuals are constant given z")
        r = float(np.dot(rx - rx.mean(), ry - ry.mean()) / (n * sx * sy))
    else:
        r = float(np.corrcoef(xv, yv)[0, 1])
    _, p = fisher_z_pvalue(r, n, len(z))
    return p


# -- context invariance test ------------------------------------------------


def context_invariance_test(d: Dataset, target: str,
                            cond: Iterable[str] = (),
                            context: str | None = None) -> float:
    """Invariance of regression residuals of `target` on `cond` across the
    levels of a discrete context column.

    Per level: Welch t-test of residual means (level vs. rest) and a
    two-sided F-test of residual variances; p-values are Bonferroni-combined
    within each family over levels, then across the two families.
    A single-level context yields p = 1 (nothing to compare).
    """
    if context is None:
        if not d.context:
            raise DataError("no context column available")
        context = d.context[0]
    if context not in d.discrete:
        raise DataError(f"context column {context!r} must be discrete")
    cond = [c for c in cond]
    if target == context or target in cond or context in cond:
        raise DataError("target, cond and context must be disjoint")

    y = d.column(target)
    n = d.n_rows
    design = np.ones((n, 1))
    if cond:
        design = np.column_stack([design, d.matrix(cond)])
    coef, _res, rank, _sv = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise DataError("singular regression design")
    resid = y - design @ coef

    ctx = d.column(context)
    levels = np.unique(ctx)
    if len(levels) < 2:
        return 1.0
    mean_ps = []
    var_ps = []
    for level in levels:
        mask = ctx == level
        a, b = resid[mask], resid[~mask]
        if len(a) < 3 or len(b) < 3:
            raise DataError(f"context level {level!r} has fewer than 3 rows")
        mean_ps.append(float(stats.ttest_ind(a, b, equal_var=False).pvalue))
        f = float(np.var(a, ddof=1) / np.var(b, ddof=1))
        cdf = stats.f.cdf(f, len(a) - 1, len(b) - 1)
        var_ps.append(float(min(1.0, 2.0 * min(cdf, 1.0 - cdf))))
    k = len(levels)
    p_mean = min(1.0, k * min(mean_ps))
    p_var = min(1.0, k * min(var_ps))
    return min(1.0, 2.0 * min(p_mean, p_var))


# -- dataset-backed CI model -------------------------------------------------


class DataCiModel:
    """CI model over a dataset, usable by the pattern searches.

    Queries touching the discrete context column use the invariance test
    when `context_test="invariance"`; everything else runs the Fisher-z
    partial correlation test.  Verdicts follow the decision policy and
    carry their p-value.  Query results are cached; the dataset is
    immutable, so instances are safe to share across threads.
    """

    def __init__(self, d: Dataset, policy: DecisionPolicy | None = None,
                 context_test: str = "fisherz"):
        if context_test not in ("fisherz", "invariance"):
            raise DataError(f"unknown context test {context_test!r}")
        self.dataset = d
        self.policy = policy or DecisionPolicy()
        self.context_test = context_test
        self._cache: dict[tuple, float] = {}

    @property
    def variables(self) -> tuple[str, ...]:
        return self.dataset.columns

    @property
    def context_variables(self) -> tuple[str, ...]:
        return self.dataset.context

    def p_value(self, x: str, y: str, z: Iterable[str] = ()) -> float:
        z = frozenset(z)
        if x == y or x in z or y in z:
            raise GraphError("x, y must be distinct and outside z")
        if x > y:
            x, y = y, x
        key = (x, y, z)
        p = self._cache.get(key)
        if p is None:
            p = self._run_test(x, y, z)
            self._cache[key] = p
        return p

    def _run_test(self, x: str, y: str, z: frozenset[str]) -> float:
        ctx = self.dataset.context[0] if self.dataset.context else None
        if (self.context_test == "invariance" and ctx is not None
                and ctx in (x, y) and ctx in self.dataset.discrete):
            target = y if x == ctx else x
            return context_invariance_test(self.dataset, target,
                                           sorted(z), ctx)
        return partial_correlation_test(self.dataset, x, y, sorted(z))

    def query(self, x: str, y: str, z: Iterable[str] = ()) -> CiVerdict:
        return decide(self.p_value(x, y, z), self.policy)
