import csv
import io
import json
from pathlib import Path

import pytest

from sfkit.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


@pytest.mark.parametrize(
    "argv, golden",
    [
        (["resolve", 1, 2], "resolve_1_2"),
        (["resolve", 2, 5], "resolve_2_5"),
        (["examples"], "examples"),
        (["euler", 2, 2, 2, 3], "euler_2_2_2_3"),
        (["chain", 3, 7], "chain_3_7"),
        (["blowdown", 2, 5], "blowdown_2_5"),
    ],
)
def test_goldens(capsys, argv, golden):
    code, obj = run_json(capsys, *argv)
    assert code == 0
    assert obj == json.loads((GOLDEN / f"{golden}.json").read_text())


def test_resolve(capsys):
    code, obj = run_json(capsys, "resolve", 1, 2)
    assert obj["schema"] == 1 and obj["ok"]
    assert obj["diagram"] == "−2 ─ −1 ─ −2" and obj["blowups"] == 2
    code, obj = run_json(capsys, "resolve", 2, 5)
    assert obj["blowups"] == 4 and obj["chain"] == [-3, -2, -1, -3, -2]
    code, out, _ = run(capsys, "resolve", 1, 2, "--ascii")
    assert code == 0 and "-2 - -1 - -2" in out


def test_bad_fraction(capsys):
    code, out, err = run(capsys, "resolve", 2, 4)
    assert code == 2 and "not coprime" in err and out == ""
    assert run(capsys, "fan", 5, 3)[0] == 2


def test_fan(capsys):
    code, out, _ = run(capsys, "fan", 2, 5, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [(int(r["x"]), int(r["y"])) for r in rows][0] == (0, 1)
    assert all(r["det_next"] in ("1", "") for r in rows)
    code, obj = run_json(capsys, "fan", 2, 5, "--orbifold")
    assert code == 0 and not obj["smooth"] and len(obj["rows"]) == 3


def test_blowdown(capsys):
    code, obj = run_json(capsys, "blowdown", 2, 5)
    assert code == 0 and obj["steps"] == obj["expected_steps"] == 4
    assert obj["final"] == [[0, 1], [1, 0], [0, -1]]


def test_stability_configs(capsys):
    code, obj = run_json(capsys, "stability", DATA / "p1xp1_distinct.json")
    assert code == 0 and obj["stable"] and obj["min_slope"] == "1/6"
    assert obj["orbifold_euler"] == "-1/6" and obj["hyperbolic"]
    code, obj = run_json(capsys, "stability", DATA / "p1xp1_collided.json")
    assert code == 1 and not obj["stable"] and obj["min_slope"] == "-1/6"
    assert obj["witness"] == {"self_int": 0, "incidence": [0, 1]}
    code, obj = run_json(capsys, "stability", DATA / "non_hyperbolic.json")
    assert code == 1 and not obj["hyperbolic"]
    assert any("hyperbolicity condition fails" in w for w in obj["warnings"])


def test_stability_errors(capsys):
    code, _, err = run(capsys, "stability", DATA / "malformed.json")
    assert code == 2 and "malformed.json:5:3" in err
    code, _, err = run(capsys, "stability", DATA / "rep_222.json")
    assert code == 2 and "marks" in err
    assert run(capsys, "stability")[0] == 2


def test_stability_random_is_seeded(capsys):
    code, a = run_json(capsys, "stability", "--random", 50, "--seed", 3)
    assert code == 0 and a["agreement"] == a["configurations"] == 50
    _, b = run_json(capsys, "stability", "--random", 50, "--seed", 3)
    _, c = run_json(capsys, "stability", "--random", 50, "--seed", 4)
    assert a == b and a["rows"] != c["rows"]


def test_euler(capsys):
    for argv, chi in [((2, 2, 2, 3), "-1/6"), (("--genus", 1, 2), "-1/2"), (("--genus", 1, 2, 2, 2), "-3/2")]:
        code, obj = run_json(capsys, "euler", *argv)
        assert code == 0 and obj["orbifold_euler"] == chi and obj["hyperbolic"]


def test_examples_text(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0 and out.startswith("examples: ok")
    assert "cp1xcp1-four-marks" in out


def test_rep_check(capsys):
    code, obj = run_json(capsys, "rep-check", DATA / "rep_222.json")
    assert code == 0 and obj["relations"] and obj["irreducible"] and obj["local_orders"] == [2, 2, 2]
    code, obj = run_json(capsys, "rep-check", DATA / "rep_diagonal.json")
    assert code == 1 and obj["relations"] and not obj["irreducible"]


def test_metric_eval(capsys, tmp_path):
    out = tmp_path / "eval.csv"
    code, text, _ = run(capsys, "metric", "eval", 1, 2, "--points", "0.5,1", "1,-1,0.3,0.2", "--format", "csv", "--out", out)
    assert code == 0 and text == ""
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 20 and {r["i"] for r in rows} == {"0", "1", "2", "3"}
    code, _, err = run(capsys, "metric", "eval", 1, 2, "--points", "0,1")
    assert code == 2 and "error" in err


def test_metric_curvature(capsys):
    code, obj = run_json(capsys, "metric", "curvature", 1, 2)
    assert code == 0 and obj["max_abs_scalar"] <= 1e-3 and len(obj["rows"]) >= 20
    code, obj = run_json(capsys, "metric", "curvature", 1, 2, "--tol", 1e-30)
    assert code == 1


def test_metric_decay(capsys):
    code, obj = run_json(capsys, "metric", "decay", 2, 5, "--frame", "cartesian")
    assert code == 0 and obj["exponent"] <= -1.0 and obj["residual"] < 0.1
    code, obj = run_json(capsys, "metric", "decay", 1, 2)
    assert code == 0 and obj["exponent"] <= -1.5
    code, _, err = run(capsys, "metric", "decay", 1, 2, "--n", 2)
    assert code == 2


def test_metric_moments(capsys):
    code, obj = run_json(capsys, "metric", "eval", 1, 2, "--moments", 3, 1, "--points", "1,1")
    assert code == 0 and obj["data"]["moments"] == [3.0, 1.0]
    assert run(capsys, "metric", "eval", 1, 2, "--moments", 1)[0] == 2


@pytest.mark.slow
def test_metric_glue(capsys):
    code, obj = run_json(capsys, "metric", "glue", 1, 2)
    assert [r["a"] for r in obj["rows"]] == [1 / 20, 1 / 40, 1 / 80]
    assert obj["exponent"] is not None
    assert code == (0 if 2.5 <= obj["exponent"] <= 3.5 else 1)
    code, obj = run_json(capsys, "metric", "glue", 1, 2, "--a-sweep", 0.05, 0.025, "--window", 3.5, 4.5)
    assert code == 0


def test_out_flag_and_text(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "resolve", 3, 7, "--format", "json", "--out", out)
    assert code == 0 and text == ""
    assert json.loads(out.read_text())["blowups"] == 5
    code, text, _ = run(capsys, "resolve", 3, 7)
    assert "resolve: ok" in text and "blowups: 5" in text


def test_csv_without_table(capsys):
    code, text, _ = run(capsys, "euler", 2, 2, 2, 3, "--format", "csv")
    rows = {r["key"]: json.loads(r["value"]) for r in csv.DictReader(io.StringIO(text))}
    assert rows["schema"] == 1 and rows["orbifold_euler"] == "-1/6"
