import csv
import io
import json
import math
import subprocess
import sys

import pytest

from wmeans.cli import EXIT_ACCURACY, EXIT_FAIL, EXIT_INVALID, EXIT_OK, RunConfig, main, parse_grid, run
from wmeans.errors import ValidationError

WEIBULL_EXP = {"hazard": {"family": "weibull", "alpha": 1, "beta": 2}, "weight": {"family": "exponential", "n": -1}}


@pytest.fixture
def model_file(tmp_path):
    def write(doc, name="model.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return write


def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text, newline="")))


def test_parse_grid():
    assert parse_grid("0:1:3") == (0.0, 0.5, 1.0)
    assert parse_grid("1,2.5") == (1.0, 2.5)
    for bad in ("0:1", "1:0:5", "a:b:c", "0:1:1"):
        with pytest.raises(ValidationError):
            parse_grid(bad)


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig("plot")
    with pytest.raises(ValidationError):
        RunConfig("eval", grid=(2.0, 1.0))
    with pytest.raises(ValidationError):
        RunConfig("quantile", theta=-1.0)


def test_eval_csv(model_file, tmp_path, capsys):
    out = tmp_path / "eval.csv"
    status = main(["eval", "--model", model_file(WEIBULL_EXP), "--grid", "0.1:5:50", "--format", "csv",
                   "--out", str(out)])
    assert status == EXIT_OK
    raw = out.read_bytes()
    assert raw.startswith(b"x,h,h_w,S_w,A_w,G_w,H_w\r\n")
    rows = _csv_rows(raw.decode())
    assert len(rows) == 50
    row = next(r for r in rows if abs(float(r["x"]) - 1.0) < 1e-9)
    # The closed form e^(-2(1-2/e)) = 0.58949901; see the weighted survival tests.
    assert float(row["S_w"]) == pytest.approx(math.exp(-2 * (1 - 2 / math.e)), abs=1e-8)
    assert row["S_w"] == "0.589499012"
    assert all(r["H_w"] == "div" for r in rows)
    assert capsys.readouterr().out == ""


def test_eval_json_divergent_cells(model_file, capsys):
    assert main(["eval", "--model", model_file(WEIBULL_EXP), "--grid", "0.5,1"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["rows"][0]["H_w"] == {"divergent": True}
    assert doc["rows"][1]["x"] == 1.0


def test_classify(model_file, capsys):
    doc = {"hazard": {"family": "weibull", "alpha": 1, "beta": 0.5}}
    assert main(["classify", "--model", model_file(doc)]) == EXIT_OK
    labels = set(json.loads(capsys.readouterr().out)["report"]["labels"])
    assert {"DFR", "Dw-AFR", "Dw-GFR", "Dw-HFR"} <= labels


@pytest.mark.parametrize("weight", [None, {"family": "power", "c": 1}, {"family": "exponential", "n": -1}])
def test_verify_chain_exponential(model_file, capsys, weight):
    doc = {"hazard": {"family": "exponential", "lambda": 1}}
    if weight is not None:
        doc["weight"] = weight
    assert main(["verify", "--suite", "chain", "--model", model_file(doc)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_verify_all_suites(model_file, capsys):
    doc = {"hazard": {"family": "weibull", "alpha": 1, "beta": 1.5}, "weight": {"family": "power", "c": 1}}
    status = main(["verify", "--model", model_file(doc)])
    out = json.loads(capsys.readouterr().out)
    assert set(out["suites"]) == {"chain", "bounds", "postulates", "exponential", "special", "mixture"}
    assert status == EXIT_OK and out["passed"]


def test_verify_without_model_runs_model_free_suites(capsys):
    assert main(["verify"]) == EXIT_OK
    assert set(json.loads(capsys.readouterr().out)["suites"]) == {"special", "mixture"}


def test_quantile_with_phm(model_file, capsys):
    doc = {"hazard": {"family": "pareto_one", "alpha": 2}}
    assert main(["quantile", "--model", model_file(doc), "--grid", "0.1:0.9:9", "--theta", "2"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "paper"
    row = out["rows"][4]
    assert row["u"] == pytest.approx(0.5) and row["QA"] == pytest.approx(0.2450645, abs=1e-7)
    assert out["phm"]["identity_gap"] <= 1e-9 and out["phm"]["quantile_gap"] > 1e-2


def test_quantile_csv(model_file, capsys):
    doc = {"hazard": {"family": "weibull", "alpha": 1, "beta": 2}}
    assert main(["quantile", "--model", model_file(doc), "--grid", "0.2,0.5", "--format", "csv"]) == EXIT_OK
    rows = _csv_rows(capsys.readouterr().out)
    assert [r["QH"] for r in rows] == ["div", "div"]


def test_system_and_counterexample(model_file, capsys):
    mix = {"mixture": {"components": [{"family": "exponential", "lambda": 1},
                                      {"family": "weibull", "alpha": 1, "beta": 2}],
                       "proportions": [0.25, 0.75]}}
    assert main(["system", "--model", model_file(mix)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["passed"]
    assert main(["counterexample"]) == EXIT_OK
    w = json.loads(capsys.readouterr().out)["witness"]
    assert w["found"] and w["params"]["beta"] == 5.0
    box = {"betas": [2.0], "bs": [2.0], "ns": [-1.0]}
    assert main(["counterexample", "--model", model_file(box, "box.json")]) == EXIT_FAIL


@pytest.mark.parametrize("argv", [
    ["eval"],
    ["frobnicate"],
    ["eval", "--grid", "0:1"],
    ["eval", "--model", "/nonexistent/model.json"],
    ["counterexample", "--tol-check", "0"],
])
def test_invalid_input_exit_code(argv, capsys):
    assert main(argv) == EXIT_INVALID
    err = json.loads(capsys.readouterr().err)
    assert err["error"] in ("usage", "validation") and err["message"]


def test_invalid_model_document(model_file, capsys):
    assert main(["eval", "--model", model_file({"weight": {}})]) == EXIT_INVALID
    assert main(["eval", "--model", model_file({"hazard": {"family": "weibull", "alpha": -1, "beta": 2}})]) \
        == EXIT_INVALID


def test_accuracy_failure_is_flagged(model_file, capsys, monkeypatch):
    import wmeans.cli as cli
    from wmeans.errors import AccuracyError

    real = cli.mean_triple

    def flaky(m, x, *args, **kwargs):
        if x > 0.4:
            raise AccuracyError("budget exhausted", estimate=1.0)
        return real(m, x, *args, **kwargs)

    monkeypatch.setattr(cli, "mean_triple", flaky)
    status = main(["eval", "--model", model_file(WEIBULL_EXP), "--grid", "0.2,0.5"])
    assert status == EXIT_ACCURACY
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert isinstance(rows[0]["A_w"], float)
    assert rows[1]["A_w"] == {"accuracy_failure": True}


def test_run_is_deterministic(tmp_path):
    cfg = RunConfig("system", seed=7)
    assert run(cfg) == run(cfg)


def test_cli_json_byte_identical_across_processes(model_file, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        subprocess.run([sys.executable, "-m", "wmeans.cli", "system", "--seed", "3", "--out", str(path)],
                       check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[0]
