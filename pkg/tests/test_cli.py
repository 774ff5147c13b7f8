import io
import json

import pytest

from ctxlab.cli import main, render_json


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    return code, json.loads(text) if text else None, text


def test_scenario_info():
    code, rep, _ = run_json("scenario-info", "pentagon")
    assert code == 0
    assert rep["scenario"] == {"name": "pentagon", "elements": 11, "measurements": 5}
    assert rep["result"]["exclusivity_graph"]["coarse"]["vertices"] == 10
    code, rep, _ = run_json("scenario-info", "chsh")
    assert (rep["scenario"]["elements"], rep["scenario"]["measurements"]) == (16, 4)
    assert rep["result"]["exclusivity_graph"]["strict"]["vertices"] == 16


def test_malformed_context_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.scn"
    f.write_text("boxes 3\ncontext 1 2\ncontext 1 9\n")
    code, _ = run("scenario-info", str(f))
    assert code == 2
    assert f"{f}:3:" in capsys.readouterr().err


def test_check_ce_pentagram():
    code, rep, _ = run_json("check", "ce", "pentagon", "uniform_cycle(0.46)", "--copies", "2")
    assert code == 1
    res = rep["result"]
    assert res["status"] == "violated"
    assert res["worst_clique_sum"]["exact"] == "529/500"
    assert len(res["worst_clique"]) == 5


def test_check_nc_certificate(tmp_path):
    out = tmp_path / "cert.json"
    code, rep, _ = run_json("check", "nc", "chsh", "pr", "--witness-out", str(out))
    assert code == 1 and rep["result"]["status"] == "infeasible"
    assert rep["result"]["certificate"]
    assert json.loads(out.read_text())["farkas"] == rep["result"]["certificate"]
    code, rep, _ = run_json("check", "nc", "chsh", "deterministic(3)")
    assert code == 0 and rep["result"]["status"] == "feasible"


def test_check_qm():
    code, rep, _ = run_json("check", "qm", "pentagon", "uniform_cycle(1/2)")
    assert code in (0, 1)
    assert rep["result"]["status"] in ("feasible", "infeasible")


def test_check_qm_heuristic_exit_3(monkeypatch):
    monkeypatch.setenv("CTXLAB_LIMITS", "qm_enumerate=4,qm_exact=5")
    code, rep, _ = run_json("check", "qm", "pentagon", "uniform_cycle(1/2)", "--method", "rowgen")
    assert code == 3 and rep["result"]["status"] == "heuristically_feasible"
    assert rep["result"]["unverified_note"]


@pytest.mark.parametrize("argv,value", [
    (("optimize", "chsh", "--set", "nc", "--objective", "chsh"), "2"),
    (("optimize", "gyni3", "--set", "ce1", "--objective", "gyni"), "1/4"),
    (("optimize", "pentagon", "--set", "consistent", "--objective", "kcbs"), "5/2"),
    (("optimize", "pentagon", "--set", "qm", "--objective", "kcbs"), "5/2"),
])
def test_optimize(argv, value):
    code, rep, _ = run_json(*argv)
    assert code == 0 and rep["result"]["value"]["exact"] == value


def test_human_output_prints_both_forms():
    code, text = run("optimize", "pentagon", "--set", "consistent", "--objective", "kcbs")
    assert code == 0
    assert "value: 5/2 (2.5)" in text


def test_threshold():
    code, rep, _ = run_json("threshold", "pentagon", "--family", "uniform-cycle", "--copies", "2", "--tol", "1e-6")
    assert code == 0
    assert abs(rep["result"]["value"]["decimal"] - 2.2360679) <= 1e-4
    assert rep["result"]["exact_value"] == "sqrt(5)"
    code, rep, _ = run_json("threshold", "chsh", "--family", "isotropic", "--copies", "1")
    assert code == 0 and rep["result"]["never_fails"] and rep["result"]["value"]["exact"] == "4"


def test_threshold_bad_tol():
    assert run("threshold", "pentagon", "--family", "uniform-cycle", "--tol", "0")[0] == 2
    assert run("threshold", "pentagon", "--family", "uniform-cycle", "--tol", "abc")[0] == 2
    assert run("threshold", "pentagon", "--family", "isotropic")[0] == 2


def test_usage_errors():
    assert run()[0] == 2
    assert run("check", "xx", "chsh", "pr")[0] == 2
    assert run("check", "ce", "chsh", "pr", "--copies", "0")[0] == 2
    assert run("check", "ce", "nowhere.scn", "pr")[0] == 2
    assert run("optimize", "chsh", "--set", "nc")[0] == 2


def test_clique_cap_is_a_resource_error(capsys):
    code, _ = run("check", "ce", "chsh", "pr", "--clique-cap", "1")
    assert code == 2
    assert "resource limit" in capsys.readouterr().err
    assert run("bounds-report", "--rows", "1", "--clique-cap", "1")[0] == 2


def test_json_round_trip_is_byte_identical():
    code, rep, text = run_json("check", "ce", "pentagon", "uniform_cycle(1/2)")
    assert code == 0
    assert render_json(json.loads(text)) == text
    assert run_json("check", "ce", "pentagon", "uniform_cycle(1/2)")[2] == text


def test_bounds_report_subset():
    code, rep, text = run_json("bounds-report", "--rows", "1,5")
    assert code == 0
    assert [r["row"].split(":")[0] for r in rep["result"]["rows"]] == ["1", "5"]
    assert all(r["status"] == "pass" for r in rep["result"]["rows"])
    assert "timing" not in rep
    code, rep, _ = run_json("bounds-report", "--rows", "1", "--timing")
    assert "seconds" in rep["result"]["rows"][0] and "timing" in rep


def test_report_has_stable_top_level_keys():
    _, rep, _ = run_json("check", "ce", "chsh", "pr")
    assert {"command", "exit_code", "scenario", "mode", "result"} <= set(rep)
    assert rep["command"] == ["check", "ce", "chsh", "pr", "--json"]
