import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from selbias.cli import main
from selbias.citest import Dataset
from selbias.evaluation import read_predictions_csv
from selbias.graph import format_graph, load_graph
from selbias.randgraph import fixed_graph


@pytest.fixture()
def runner():
    return CliRunner()


def _invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    return result


def test_simulate_fixed_graph(runner, tmp_path):
    result = _invoke(runner, ["simulate", "--fixed-graph", "--n", "400",
                              "--seed", "3", "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    for name in ("data_biased.csv", "data_unbiased.csv", "graph.txt",
                 "scm.json", "manifest.json"):
        assert (tmp_path / name).exists()
    d = Dataset.from_csv(tmp_path / "data_biased.csv")
    assert d.n_rows == 400
    assert d.context == ("C",)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["params"]["seed"] == 3


def test_simulate_requires_one_source(runner, tmp_path):
    result = runner.invoke(main, ["simulate", "--out-dir", str(tmp_path)])
    assert result.exit_code == 5
    result2 = runner.invoke(main, ["simulate", "--fixed-graph", "--random-p",
                                   "8", "--out-dir", str(tmp_path)])
    assert result2.exit_code == 5


def test_simulate_byte_identical_given_seed(runner, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        _invoke(runner, ["simulate", "--fixed-graph", "--n", "300",
                         "--seed", "7", "--out-dir", str(out)])
    for name in ("data_biased.csv", "data_unbiased.csv", "scm.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_discover_round_trip(runner, tmp_path):
    _invoke(runner, ["simulate", "--fixed-graph", "--n", "4000",
                     "--seed", "11", "--out-dir", str(tmp_path)])
    out = tmp_path / "preds.csv"
    result = _invoke(runner, ["discover", str(tmp_path / "data_unbiased.csv"),
                              "--method", "yst", "--out", str(out)])
    assert result.exit_code == 0, result.output
    preds = read_predictions_csv(out)
    assert {(p.source, p.target) for p in preds} == {("X5", "X6")}


def test_discover_icp(runner, tmp_path):
    _invoke(runner, ["simulate", "--fixed-graph", "--n", "4000",
                     "--seed", "13", "--out-dir", str(tmp_path)])
    out = tmp_path / "icp.csv"
    result = _invoke(runner, ["discover", str(tmp_path / "data_unbiased.csv"),
                              "--method", "icp", "--out", str(out)])
    assert result.exit_code == 0, result.output
    preds = read_predictions_csv(out)
    assert ("X5", "X6") in {(p.source, p.target) for p in preds}


def test_discover_bootstrap(runner, tmp_path):
    _invoke(runner, ["simulate", "--fixed-graph", "--n", "2000",
                     "--seed", "17", "--out-dir", str(tmp_path)])
    out = tmp_path / "boot.csv"
    result = _invoke(runner, ["discover", str(tmp_path / "data_unbiased.csv"),
                              "--method", "lcd", "--bootstrap", "5",
                              "--seed", "1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_discover_rejects_missing_file(runner, tmp_path):
    result = runner.invoke(main, ["discover", str(tmp_path / "nope.csv"),
                                  "--method", "lcd"])
    assert result.exit_code == 2  # click validates the path


def test_discover_rejects_bad_csv(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("A,B\n1,zzz\n")
    result = runner.invoke(main, ["discover", str(bad), "--method", "lcd",
                                  "--out", str(tmp_path / "o.csv")])
    assert result.exit_code == 4
    err = json.loads(result.stderr.splitlines()[-1])
    assert err["error"] == "format"


def test_oracle_discover(runner, tmp_path):
    gpath = tmp_path / "g.txt"
    gpath.write_text(format_graph(fixed_graph()))
    out = tmp_path / "oracle.csv"
    result = _invoke(runner, ["oracle-discover", str(gpath), "--method", "lcd",
                              "--out", str(out)])
    assert result.exit_code == 0, result.output
    preds = read_predictions_csv(out)
    assert ("X1", "X2") in {(p.source, p.target) for p in preds}
    assert all(p.score == 1.0 for p in preds)


def test_oracle_discover_no_selection(runner, tmp_path):
    gpath = tmp_path / "g.txt"
    gpath.write_text(format_graph(fixed_graph()))
    out = tmp_path / "oracle0.csv"
    _invoke(runner, ["oracle-discover", str(gpath), "--method", "lcd",
                     "--no-selection", "--out", str(out)])
    preds = read_predictions_csv(out)
    assert {(p.source, p.target) for p in preds} == {("X5", "X6")}


def test_enumerate3_report(runner, tmp_path):
    out = tmp_path / "report.json"
    result = _invoke(runner, ["enumerate3", "--selection", "0",
                              "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert report["lcd_recovered_without_selection"] is True


def test_enumerate3_with_selection_json_to_stdout(runner):
    result = _invoke(runner, ["enumerate3", "--selection", "1", "--jci"])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["no_sound_rule_verified"] is True
    assert report["lcd_not_forced_with_selection"] is True


def test_verify_yst_small(runner, tmp_path):
    out = tmp_path / "yst.json"
    result = _invoke(runner, ["verify-yst", "--graphs", "200", "--seed", "5",
                              "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert report["verified"] is True
    assert report["n_counterexamples"] == 0


def test_experiment_fixed_graph_small(runner, tmp_path):
    result = _invoke(runner, ["experiment", "fixed-graph", "--models", "2",
                              "--n", "1000", "--seed", "2", "--threads", "1",
                              "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    table = (tmp_path / "fixed_graph_table.csv").read_text().splitlines()
    assert table[0] == "method,dataset,n_pred,tp,fp"
    assert len(table) == 9


def test_experiment_random_graphs_small(runner, tmp_path):
    result = _invoke(runner, [
        "experiment", "random-graphs", "--p", "8", "--models", "2",
        "--n", "1500", "--seed", "4", "--methods", "lcd,yst",
        "--oracle-patterns", "--threads", "1", "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    pr = (tmp_path / "random_p8_n1500_pr.csv").read_text().splitlines()
    assert pr[0] == "method,dataset,threshold,precision,recall,tp,fp,marker"
    assert (tmp_path / "random_p8_n1500_oracle_patterns_pr.csv").exists()
    ap = json.loads((tmp_path / "random_p8_n1500_ap.json").read_text())
    assert set(ap) == {"lcd/biased", "lcd/unbiased", "yst/biased",
                       "yst/unbiased"}


def test_eval_pr_and_roc(runner, tmp_path):
    _invoke(runner, ["simulate", "--fixed-graph", "--n", "4000",
                     "--seed", "19", "--out-dir", str(tmp_path)])
    preds = tmp_path / "p.csv"
    _invoke(runner, ["discover", str(tmp_path / "data_unbiased.csv"),
                     "--method", "lcd", "--out", str(preds)])
    curve = tmp_path / "curve.csv"
    result = _invoke(runner, ["eval", str(preds), "--truth-graph",
                              str(tmp_path / "graph.txt"), "--kind", "pr",
                              "--out", str(curve)])
    assert result.exit_code == 0, result.output
    assert curve.read_text().splitlines()[0] == \
        "method,dataset,threshold,precision,recall,tp,fp,marker"
    roc = tmp_path / "roc.csv"
    band = tmp_path / "band.csv"
    result = _invoke(runner, ["eval", str(preds), "--truth-graph",
                              str(tmp_path / "graph.txt"), "--kind", "roc",
                              "--null-band", str(band), "--out", str(roc)])
    assert result.exit_code == 0, result.output
    assert roc.read_text().splitlines()[0] == \
        "method,dataset,threshold,tpr,fpr,tp,fp,marker"
    assert band.read_text().splitlines()[0] == "fpr,tpr_lo,tpr_hi,tpr_mean"


def test_cli_help_and_version(runner):
    assert _invoke(runner, ["--help"]).exit_code == 0
    assert _invoke(runner, ["--version"]).exit_code == 0
    assert _invoke(runner, ["experiment", "--help"]).exit_code == 0
