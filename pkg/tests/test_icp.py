import numpy as np
import pytest

from selbias.citest import Dataset, DecisionPolicy, binarize_column
from selbias.errors import DataError
from selbias.graph import Dmg
from selbias.icp import boost_preselect, icp_predict, icp_predictions
from selbias.scm import sample_weights, simulate


def _planted_dataset(rng, n=600, p=16, strong=2):
    """target = 2 * X{strong+1} + noise among p covariates."""
    X = rng.standard_normal((n, p))
    y = 2.0 * X[:, strong] + rng.standard_normal(n)
    cols = [f"X{i + 1}" for i in range(p)] + ["Y"]
    return Dataset(cols, np.column_stack([X, y]))


def test_boosting_finds_planted_covariate():
    rng = np.random.default_rng(40)
    found_first = 0
    for _ in range(50):
        d = _planted_dataset(rng)
        picked = boost_preselect(d, "Y")
        if picked and picked[0] == "X3":
            found_first += 1
    assert found_first >= 48


def test_boosting_respects_max_vars():
    rng = np.random.default_rng(41)
    d = _planted_dataset(rng)
    picked = boost_preselect(d, "Y", max_vars=20)
    assert len(picked) <= 16
    assert len(set(picked)) == len(picked)
    assert len(boost_preselect(d, "Y", max_vars=2)) <= 2


def test_boosting_rejects_constant_target():
    d = Dataset(["A", "Y"], np.column_stack([np.random.default_rng(0)
                                             .standard_normal(50),
                                             np.ones(50)]))
    with pytest.raises(DataError):
        boost_preselect(d, "Y")


def test_icp_recovers_chain_parent():
    g = Dmg.build(system=["X", "Y"], context=["C"],
                  directed=[("C", "X"), ("X", "Y")])
    hits = 0
    for seed in range(20):
        scm = sample_weights(g, seed)
        d = binarize_column(simulate(scm, 10_000, seed=seed + 100), "C")
        result = icp_predict(d, "Y")
        if result.parent_estimate == ("X",):
            hits += 1
    assert hits >= 19


def test_icp_empty_set_accepted_when_target_invariant():
    rng = np.random.default_rng(42)
    n = 800
    c = np.repeat([0.0, 1.0], n // 2)
    x = c + rng.standard_normal(n)
    y = rng.standard_normal(n)  # independent of everything
    d = Dataset(["C", "X", "Y"], np.column_stack([c, x, y]),
                context=["C"], discrete=["C"])
    result = icp_predict(d, "Y")
    assert () in result.accepted_sets
    assert result.parent_estimate == ()
    assert not result.rejected


def test_icp_rejects_when_nothing_invariant():
    rng = np.random.default_rng(43)
    n = 900
    c = np.repeat([0.0, 1.0], n // 2)
    x = rng.standard_normal(n)
    # context shifts the target's variance directly; no subset can fix it
    y = rng.standard_normal(n) * (1.0 + 3.0 * c)
    d = Dataset(["C", "X", "Y"], np.column_stack([c, x, y]),
                context=["C"], discrete=["C"])
    result = icp_predict(d, "Y")
    assert result.rejected
    assert result.parent_estimate == ()
    assert icp_predictions(d, targets=["Y"]) == []


def test_icp_estimate_is_subset_of_every_accepted_set():
    g = Dmg.build(system=["X", "Z", "Y"], context=["C"],
                  directed=[("C", "X"), ("X", "Y"), ("Z", "Y")])
    scm = sample_weights(g, 44)
    d = binarize_column(simulate(scm, 8000, seed=45), "C")
    result = icp_predict(d, "Y")
    for subset in result.accepted_sets:
        assert set(result.parent_estimate) <= set(subset)
    for parent, p in result.parent_pvalues.items():
        assert p >= 0.01


def test_icp_requires_discrete_context():
    rng = np.random.default_rng(46)
    d = Dataset(["C", "X", "Y"], rng.standard_normal((100, 3)), context=["C"])
    with pytest.raises(DataError):
        icp_predict(d, "Y")


def test_icp_empty_pool_rejected():
    rng = np.random.default_rng(47)
    c = np.repeat([0.0, 1.0], 50)
    d = Dataset(["C", "Y"], np.column_stack([c, rng.standard_normal(100)]),
                context=["C"], discrete=["C"])
    with pytest.raises(DataError):
        icp_predict(d, "Y")


def test_icp_preselection_kicks_in_for_wide_data():
    rng = np.random.default_rng(48)
    n, p = 700, 12
    X = rng.standard_normal((n, p))
    c = np.repeat([0.0, 1.0], n // 2)
    X[:, 0] += c
    y = 1.5 * X[:, 0] + rng.standard_normal(n)
    cols = ["C"] + [f"X{i + 1}" for i in range(p)] + ["Y"]
    d = Dataset(cols, np.column_stack([c, X, y]), context=["C"],
                discrete=["C"])
    result = icp_predict(d, "Y", max_set_size=2)
    assert "X1" in result.parent_estimate or result.rejected is False


def test_icp_predictions_scored_by_invariance_p():
    g = Dmg.build(system=["X", "Y"], context=["C"],
                  directed=[("C", "X"), ("X", "Y")])
    scm = sample_weights(g, 49)
    d = binarize_column(simulate(scm, 10_000, seed=50), "C")
    preds = icp_predictions(d)
    claims = {(p.source, p.target): p for p in preds}
    assert ("X", "Y") in claims
    pred = claims[("X", "Y")]
    assert pred.kind == "icp"
    assert 0.01 <= pred.score <= 1.0
