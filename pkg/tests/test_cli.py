import csv
import io
import json
import subprocess
import sys

import pytest

from alcove.cli import main, normalize, resolve, run


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    try:
        q = resolve(argv)
    except SystemExit as exc:
        return exc.code, "", ""
    code = run(q, out, err)
    return code, out.getvalue(), err.getvalue()


def test_survival_example():
    code, out, _ = _run(["survival", "--type", "A", "--k", "3", "--x", "0.6,0.3,0.1",
                         "--t", "0.1"])
    assert code == 0
    res = json.loads(out)
    assert res["schema"] == 1
    assert res["method"] == "partition-sum"
    assert res["value"] == pytest.approx(0.023366332491206329, abs=1e-13)
    assert {"error_bound", "terms", "wall_time_ms", "query"} <= set(res)


def test_image_sum_method_agrees():
    base = ["survival", "--type", "A", "--k", "3", "--x", "0.6,0.3,0.1", "--t", "0.1"]
    a = json.loads(_run(base)[1])["value"]
    b = json.loads(_run(base + ["--method", "image-sum"])[1])["value"]
    assert abs(a - b) < 1e-6


def test_expected_example():
    code, out, _ = _run(["expected", "--type", "A", "--k", "3", "--x", "0.6,0.3,0.1"])
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.03, abs=1e-8)


def test_f4_is_unavailable():
    code, out, err = _run(["survival", "--type", "F4", "--k", "4", "--x", "0.1,0.1,0.1,0.1",
                           "--t", "0.1"])
    assert code == 3
    assert "F4" in err and out == ""


@pytest.mark.parametrize("argv,msg", [
    (["survival", "--type", "A", "--k", "3", "--x", "0.1,0.3,0.6", "--t", "0.1"], "not in alcove"),
    (["survival", "--type", "A", "--k", "3", "--x", "0.6,0.3", "--t", "0.1"], "coordinates"),
    (["survival", "--type", "A", "--k", "3", "--x", "0.6,0.3,0.1", "--t", "-1"], "t"),
    (["survival", "--type", "Q", "--k", "3", "--x", "0.6,0.3,0.1", "--t", "0.1"], "type"),
    (["eigen", "--type", "A", "--k", "3", "--weight", "0.5,0"], "weight lattice"),
])
def test_invalid_input_exit_code(argv, msg):
    code, _, err = _run(argv)
    assert code == 2
    assert msg in err


def test_validation_failure_exit_code(monkeypatch):
    from alcove import cli
    monkeypatch.setitem(cli.SUITES, "kernels", [("always fails", lambda: (False, "forced"))])
    code, out, _ = _run(["validate", "--suite", "kernels"])
    res = json.loads(out)
    assert code == 1
    assert res["values"] == [{"name": "always fails", "passed": False, "detail": "forced"}]


def test_debruijn_battery_file(tmp_path):
    path = tmp_path / "battery.json"
    path.write_text(json.dumps([{"name": "pair", "functions": [
        {"kind": "gaussian", "mean": 0.0, "sigma": 0.3},
        {"kind": "gaussian", "mean": 0.5, "sigma": 0.3}]}]))
    code, out, _ = _run(["debruijn", "--battery", str(path)])
    res = json.loads(out)
    assert code == 0 and res["passed"]
    assert res["values"][0]["name"] == "pair"
    assert res["values"][0]["difference"] < 1e-4


def test_round_trip_through_config(tmp_path):
    code, out, _ = _run(["survival", "--type", "C", "--k", "2", "--x", "0.4,0.1", "--t", "0.03",
                         "--tol", "1e-13"])
    assert code == 0
    first = json.loads(out)
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps(first))
    code, out2, _ = _run(["survival", "--config", str(cfg)])
    second = json.loads(out2)
    assert second["query"] == first["query"]
    assert second["value"] == first["value"]
    assert normalize(first["query"]) == first["query"]


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({"type": "A", "k": 3, "x": [0.6, 0.3, 0.1], "t": 0.5}))
    q = resolve(["survival", "--config", str(cfg), "--t", "0.1"])
    assert q["t"] == 0.1 and q["x"] == [0.6, 0.3, 0.1]
    cfg.write_text(json.dumps({"colour": "red"}))
    assert main(["survival", "--config", str(cfg)]) == 2


def test_csv_sweep_monotone():
    code, out, _ = _run(["survival", "--type", "B", "--k", "3", "--x", "0.6,0.3,0.1",
                         "--t-grid", "0.001,2,25,log", "--output", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["t", "value", "error_bound", "method"]
    assert len(rows) == 25
    v = [float(r["value"]) for r in rows]
    e = [float(r["error_bound"]) for r in rows]
    assert all(b <= a + ea + eb for a, b, ea, eb in zip(v, v[1:], e, e[1:]))
    # full double precision
    assert float(rows[3]["t"]) == pytest.approx(0.001 * (2000 ** (3 / 24)), rel=1e-15)


def test_type_a_projects_to_sum_zero():
    a = json.loads(_run(["survival", "--type", "A", "--k", "3", "--x", "0.6,0.3,0.1",
                         "--t", "0.05"])[1])["value"]
    b = json.loads(_run(["survival", "--type", "A", "--k", "3", "--x", "1.6,1.3,1.1",
                         "--t", "0.05"])[1])["value"]
    assert a == pytest.approx(b, abs=1e-15)


def test_mc_seed_from_environment(monkeypatch):
    argv = ["survival", "--type", "C", "--k", "2", "--x", "0.4,0.1", "--t", "0.01",
            "--method", "mc", "--paths", "2000", "--dt", "0.001", "--bridge"]
    monkeypatch.setenv("ALCOVE_SEED", "17")
    a = json.loads(_run(argv)[1])
    assert a["query"]["seed"] == 17 and a["method"] == "monte-carlo" and a["paths"] == 2000
    b = json.loads(_run(argv + ["--workers", "4"])[1])
    assert a["value"] == b["value"]
    monkeypatch.setenv("ALCOVE_SEED", "18")
    c = json.loads(_run(argv)[1])
    assert c["value"] != a["value"]


def test_eigen_command():
    code, out, _ = _run(["eigen", "--type", "C", "--k", "2", "--weight", "1,1", "--x", "0.3,0.1",
                         "--hot-spots", "--samples", "2000"])
    res = json.loads(out)
    assert code == 0
    assert res["real"] and res["hot_spots"]["passed"]
    assert res["eigenvalue"] < 0


def test_validate_quick():
    code, out, _ = _run(["validate", "--suite", "quick"])
    res = json.loads(out)
    assert code == 0 and res["passed"]
    assert all(r["passed"] for r in res["values"])


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "alcove", "expected", "--type", "A", "--k", "2",
                        "--x", "0.5,0"], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["value"] == pytest.approx(0.125, abs=1e-8)
