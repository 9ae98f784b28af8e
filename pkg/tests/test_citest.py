import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from selbias.citest import (DataCiModel, Dataset, DecisionPolicy, ThresholdMode,
                            binarize_column, context_invariance_test, decide,
                            fisher_z_pvalue, partial_correlation_test,
                            sidecar_path)
from selbias.errors import DataError, FormatError
from selbias.separation import Verdict


def _dataset(rng, n=200, cols=("A", "B", "C")):
    return Dataset(cols, rng.standard_normal((n, len(cols))))


def test_fisher_z_fixture():
    statistic, p = fisher_z_pvalue(0.5, 103, 0)
    assert statistic == pytest.approx(5.4931, abs=1e-4)
    assert p == pytest.approx(3.9446e-8, abs=1e-9)


def test_zero_correlation_gives_p_one():
    # exactly orthogonal, mean-zero columns
    x = np.array([1.0, -1.0, 1.0, -1.0] * 25)
    y = np.array([1.0, 1.0, -1.0, -1.0] * 25)
    d = Dataset(["X", "Y"], np.column_stack([x, y]))
    p = partial_correlation_test(d, "X", "Y")
    assert p > 1.0 - 1e-12


def test_perfect_correlation_clamped():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(100)
    d = Dataset(["X", "Y"], np.column_stack([x, x]))
    p = partial_correlation_test(d, "X", "Y")
    assert p < 1e-15


def test_partial_correlation_removes_mediator():
    rng = np.random.default_rng(1)
    n = 5000
    x = rng.standard_normal(n)
    z = x + 0.3 * rng.standard_normal(n)
    y = z + 0.3 * rng.standard_normal(n)
    d = Dataset(["X", "Z", "Y"], np.column_stack([x, z, y]))
    assert partial_correlation_test(d, "X", "Y") < 1e-10
    assert partial_correlation_test(d, "X", "Y", ["Z"]) > 0.01


def test_partial_correlation_symmetry_and_affine_invariance():
    rng = np.random.default_rng(2)
    n = 300
    x = rng.standard_normal(n)
    y = 0.5 * x + rng.standard_normal(n)
    z = rng.standard_normal(n)
    d1 = Dataset(["X", "Y", "Z"], np.column_stack([x, y, z]))
    d2 = Dataset(["X", "Y", "Z"], np.column_stack([7.0 - 3.0 * x, y, 2.0 * z]))
    p_xy = partial_correlation_test(d1, "X", "Y", ["Z"])
    assert partial_correlation_test(d1, "Y", "X", ["Z"]) == pytest.approx(p_xy, abs=1e-12)
    assert partial_correlation_test(d2, "X", "Y", ["Z"]) == pytest.approx(p_xy, abs=1e-12)


def test_partial_correlation_errors():
    rng = np.random.default_rng(3)
    d = Dataset(["X", "Y"], np.column_stack([rng.standard_normal(3),
                                             rng.standard_normal(3)]))
    with pytest.raises(DataError):
        partial_correlation_test(d, "X", "Y")  # too few rows
    const = Dataset(["X", "Y"], np.column_stack([np.ones(50),
                                                 rng.standard_normal(50)]))
    with pytest.raises(DataError):
        partial_correlation_test(const, "X", "Y")


def test_fisher_z_null_uniformity_quick():
    rng = np.random.default_rng(4)
    n = 200
    ps = []
    for _ in range(400):
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        d = Dataset(["X", "Y"], np.column_stack([x, y]))
        ps.append(partial_correlation_test(d, "X", "Y"))
    from scipy import stats
    ks = stats.kstest(ps, "uniform").statistic
    assert ks < 0.08


def test_invariance_single_level_is_one():
    rng = np.random.default_rng(5)
    vals = np.column_stack([np.zeros(30), rng.standard_normal(30)])
    d = Dataset(["C", "Y"], vals, context=["C"], discrete=["C"])
    assert context_invariance_test(d, "Y", [], "C") == 1.0


def test_invariance_detects_mean_shift():
    rng = np.random.default_rng(6)
    n = 500
    c = np.repeat([0.0, 1.0], n)
    y = rng.standard_normal(2 * n)
    y[c == 1] += 2.0
    d = Dataset(["C", "Y"], np.column_stack([c, y]), context=["C"],
                discrete=["C"])
    assert context_invariance_test(d, "Y", [], "C") < 1e-6


def test_invariance_detects_variance_shift():
    rng = np.random.default_rng(7)
    n = 500
    c = np.repeat([0.0, 1.0], n)
    y = rng.standard_normal(2 * n)
    y[c == 1] *= 3.0
    d = Dataset(["C", "Y"], np.column_stack([c, y]), context=["C"],
                discrete=["C"])
    assert context_invariance_test(d, "Y", [], "C") < 1e-6


def test_invariance_conditions_on_parents():
    rng = np.random.default_rng(8)
    n = 2000
    c = np.repeat([0.0, 1.0], n)
    x = c + rng.standard_normal(2 * n)
    y = 2.0 * x + rng.standard_normal(2 * n)
    d = Dataset(["C", "X", "Y"], np.column_stack([c, x, y]), context=["C"],
                discrete=["C"])
    assert context_invariance_test(d, "Y", [], "C") < 1e-4
    assert context_invariance_test(d, "Y", ["X"], "C") > 0.01


def test_invariance_null_calibration_quick():
    rng = np.random.default_rng(9)
    rejections = 0
    reps = 400
    for _ in range(reps):
        c = np.repeat([0.0, 1.0, 2.0], 60)
        y = rng.standard_normal(180)
        d = Dataset(["C", "Y"], np.column_stack([c, y]), context=["C"],
                    discrete=["C"])
        if context_invariance_test(d, "Y", [], "C") < 0.01:
            rejections += 1
    assert rejections / reps <= 0.02


def test_invariance_errors():
    rng = np.random.default_rng(10)
    c = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 0.0])
    y = rng.standard_normal(6)
    d = Dataset(["C", "Y"], np.column_stack([c, y]), context=["C"],
                discrete=["C"])
    with pytest.raises(DataError):
        context_invariance_test(d, "Y", [], "C")  # level with < 3 rows
    x = rng.standard_normal(40)
    d2 = Dataset(["C", "X1", "X2", "Y"],
                 np.column_stack([np.repeat([0.0, 1.0], 20), x, x,
                                  rng.standard_normal(40)]),
                 context=["C"], discrete=["C"])
    with pytest.raises(DataError):
        context_invariance_test(d2, "Y", ["X1", "X2"], "C")  # singular design
    cont = Dataset(["C", "Y"], np.column_stack([rng.standard_normal(40),
                                                rng.standard_normal(40)]),
                   context=["C"])
    with pytest.raises(DataError):
        context_invariance_test(cont, "Y", [], "C")  # context not discrete


def test_decide_single_threshold():
    policy = DecisionPolicy(alpha=0.01)
    assert decide(0.5, policy).verdict is Verdict.INDEPENDENT
    assert decide(0.005, policy).verdict is Verdict.DEPENDENT


def test_decide_dual_threshold():
    policy = DecisionPolicy(alpha=0.01, mode=ThresholdMode.DUAL, dual_divisor=8)
    assert decide(0.005, policy).verdict is Verdict.INCONCLUSIVE
    assert decide(1e-5, policy).verdict is Verdict.DEPENDENT
    assert decide(0.02, policy).verdict is Verdict.INDEPENDENT


def test_decide_null_flip():
    policy = DecisionPolicy(alpha=0.01)
    assert decide(0.005, policy, null_is_independence=False).verdict \
        is Verdict.INDEPENDENT


@given(st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=1.0))
def test_decide_monotone_in_p(p1, p2):
    policy = DecisionPolicy(alpha=0.01, mode=ThresholdMode.DUAL, dual_divisor=5)
    order = {Verdict.DEPENDENT: 0, Verdict.INCONCLUSIVE: 1,
             Verdict.INDEPENDENT: 2}
    lo, hi = sorted([p1, p2])
    assert order[decide(lo, policy).verdict] <= order[decide(hi, policy).verdict]


def test_policy_validation():
    with pytest.raises(DataError):
        DecisionPolicy(alpha=0.0)
    with pytest.raises(DataError):
        DecisionPolicy(alpha=0.01, dual_divisor=0)


def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset(["A", "B"], np.zeros((3, 3)))
    with pytest.raises(DataError):
        Dataset(["A", "A"], np.zeros((3, 2)))
    with pytest.raises(DataError):
        Dataset(["A", "B"], np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(DataError):
        Dataset(["A"], np.zeros((3, 1)), context=["Q"])


def test_dataset_csv_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    d = Dataset(["C", "X", "Y"], rng.standard_normal((20, 3)),
                context=["C"], discrete=["C"])
    path = tmp_path / "data.csv"
    d.to_csv(path)
    meta = json.loads(sidecar_path(path).read_text())
    assert meta == {"context": ["C"], "discrete": ["C"]}
    back = Dataset.from_csv(path)
    assert back.columns == d.columns
    assert back.context == ("C",)
    assert np.allclose(back.values, d.values)


def test_dataset_from_csv_rejects_junk(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("A,B\n1,x\n")
    with pytest.raises(FormatError):
        Dataset.from_csv(path)


def test_binarize_column():
    rng = np.random.default_rng(12)
    d = Dataset(["C", "X"], rng.standard_normal((100, 2)), context=["C"])
    b = binarize_column(d, "C")
    assert set(np.unique(b.column("C"))) <= {0.0, 1.0}
    assert "C" in b.discrete


def test_data_ci_model_symmetry_and_cache():
    rng = np.random.default_rng(13)
    d = _dataset(rng)
    m = DataCiModel(d)
    v1 = m.query("A", "B", ["C"])
    v2 = m.query("B", "A", ["C"])
    assert v1 == v2
    assert v1.p_value is not None


def test_data_ci_model_invariance_dispatch():
    # variance-only difference across contexts: invisible to correlation,
    # visible to the invariance test
    rng = np.random.default_rng(14)
    n = 1500
    c = np.repeat([0.0, 1.0], n)
    y = rng.standard_normal(2 * n)
    y[c == 1] *= 3.0
    d = Dataset(["C", "Y"], np.column_stack([c, y]), context=["C"],
                discrete=["C"])
    fisher = DataCiModel(d, context_test="fisherz")
    invar = DataCiModel(d, context_test="invariance")
    assert fisher.p_value("C", "Y") > 0.01
    assert invar.p_value("C", "Y") < 1e-6
