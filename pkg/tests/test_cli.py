import json
from importlib.resources import files

import jsonschema
import numpy as np
import pytest

from dualbm.cli import main


def _schema(command):
    return json.loads(files("dualbm").joinpath("schemas", command.replace(" ", "_") + ".json").read_text())


def _write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def _run(capsys, argv, tmp_path=None):
    out = None
    if tmp_path is not None:
        out = str(tmp_path / "report.json")
        argv = argv + ["--out", out]
    rc = main(argv)
    captured = capsys.readouterr()
    report = None
    if out is not None:
        with open(out) as fh:
            text = fh.read()
        if text.lstrip().startswith("{"):
            report = json.loads(text)
            jsonschema.validate(report, _schema(report["command"]))
    return rc, captured.out, captured.err, report


BALLS = [{"shape": "ball", "r": 1.0}, {"shape": "ball", "r": 1.0}]


def test_dmv_two_unit_balls(capsys, tmp_path):
    bodies = _write(tmp_path, "b.json", BALLS)
    rc, out, _, report = _run(capsys, ["dmv", "--bodies", bodies], tmp_path)
    assert rc == 0
    assert abs(float(out) - np.pi) <= 1e-12
    assert report["result"]["value"] == pytest.approx(np.pi, abs=1e-12)
    assert report["config"]["grid_res"] == 64 and report["config"]["seed"] == 0


def test_dmv_wrong_body_count(capsys, tmp_path):
    bodies = _write(tmp_path, "b.json", BALLS * 2)
    rc, _, err, _ = _run(capsys, ["dmv", "--bodies", bodies])
    assert rc == 2 and "need 2 bodies" in err


def test_malformed_json_reports_location(capsys, tmp_path):
    bad = _write(tmp_path, "bad.json", '[{"shape": "ball",\n "r": }]')
    rc, _, err, _ = _run(capsys, ["dmv", "--bodies", bad])
    assert rc == 2 and "bad.json:2:" in err


def test_unknown_shape_names_field(capsys, tmp_path):
    bad = _write(tmp_path, "bad.json", [{"shape": "ball"}, {"shape": "torus"}])
    rc, _, err, _ = _run(capsys, ["dmv", "--bodies", bad])
    assert rc == 2 and "bodies[1]" in err


def test_missing_file(capsys, tmp_path):
    rc, _, err, _ = _run(capsys, ["dmv", "--bodies", str(tmp_path / "nope.json")])
    assert rc == 2 and "nope.json" in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["dmv"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["grid", "--trials", "0"])
    assert info.value.code == 2
    assert main(["grid", "--grid-res", "2"]) == 2
    capsys.readouterr()


def test_grid_json_and_csv(capsys, tmp_path):
    rc, _, _, report = _run(capsys, ["grid", "--dim", "3", "--grid-res", "4"], tmp_path)
    assert rc == 0 and len(report["result"]["weights"]) == 32
    assert sum(report["result"]["weights"]) == pytest.approx(4 * np.pi, rel=1e-12)
    rc = main(["grid", "--grid-res", "8", "--format", "csv"])
    lines = capsys.readouterr().out.splitlines()
    assert rc == 0 and lines[0] == "x0,x1,weight" and len(lines) == 9


def test_lutwak(capsys, tmp_path):
    spec = {
        "bodies": [{"shape": "ball", "r": 1.0}, {"shape": "ellipsoid", "axes": [2.0, 0.5]}],
        "lambdas": [0.5, 1.5],
    }
    bodies = _write(tmp_path, "b.json", spec)
    rc, out, _, report = _run(capsys, ["lutwak", "--bodies", bodies], tmp_path)
    assert rc == 0
    printed = json.loads(out)
    assert printed["abs_diff"] <= 1e-9 * max(1.0, printed["direct"])
    assert report["result"] == printed


def test_lutwak_rejects_negative_lambda(capsys, tmp_path):
    bodies = _write(tmp_path, "b.json", BALLS)
    rc, _, _, _ = _run(capsys, ["lutwak", "--bodies", bodies, "--lambdas", "1", "-1"])
    assert rc == 2


def _tensor(entries):
    t = np.asarray(entries, dtype=float)
    return {"order": t.ndim, "atoms": t.shape[0], "entries": t.tolist()}


def test_pm_variation_prints_four(capsys, tmp_path):
    path = _write(tmp_path, "t.json", _tensor([[1, -1], [-1, 1]]))
    rc, out, _, report = _run(capsys, ["pm", "variation", "--tensor", path], tmp_path)
    assert rc == 0 and out == "4\n"
    assert report["command"] == "pm variation"


@pytest.mark.parametrize("mode", ["exact", "randomized"])
def test_pm_semivariation(capsys, tmp_path, mode):
    path = _write(tmp_path, "t.json", _tensor([[1, 1], [1, -1]]))
    rc, out, _, report = _run(capsys, ["pm", "semivariation", "--tensor", path, "--mode", mode], tmp_path)
    assert rc == 0 and float(out) == 2.0
    assert report["result"]["status"] in ("exact", "lower_bound")


def test_pm_semivariation_too_large_for_exact(capsys, tmp_path):
    path = _write(tmp_path, "t.json", _tensor(np.ones((5, 5, 5))))
    rc, _, _, _ = _run(capsys, ["pm", "semivariation", "--tensor", path])
    assert rc == 0
    path = _write(tmp_path, "t.json", _tensor(np.ones((9, 9, 9))))
    rc, _, err, _ = _run(capsys, ["pm", "semivariation", "--tensor", path])
    assert rc == 2 and err


def test_pm_decompose_product_diagonal(capsys, tmp_path):
    t = [[1.0, -0.5], [0.25, 2.0]]
    path = _write(tmp_path, "t.json", _tensor(t))
    rc, _, _, report = _run(capsys, ["pm", "decompose", "--tensor", path], tmp_path)
    res = report["result"]
    assert rc == 0 and res["variation_positive"] + res["variation_negative"] == res["variation"]
    rc, _, _, report = _run(capsys, ["pm", "product", "--tensor", path], tmp_path)
    assert rc == 0 and report["result"]["total"] == 2.75
    rc, _, _, report = _run(capsys, ["pm", "diagonal", "--tensor", path], tmp_path)
    assert rc == 1 and report["result"]["witness"] == [0, 1]
    path = _write(tmp_path, "d.json", _tensor(np.diag([1.0, 3.0])))
    rc, _, _, report = _run(capsys, ["pm", "diagonal", "--tensor", path], tmp_path)
    assert rc == 0 and report["result"]["measure"] == [1.0, 3.0]


def test_pm_malformed_tensor(capsys, tmp_path):
    path = _write(tmp_path, "t.json", {"order": 2, "atoms": 3, "entries": [[1, 2], [3, 4]]})
    rc, _, err, _ = _run(capsys, ["pm", "variation", "--tensor", path])
    assert rc == 2 and "t.json" in err


def test_characterize_measure_passes(capsys, tmp_path):
    path = _write(tmp_path, "m.json", {"proportional_to_weights": 1.0})
    argv = ["characterize", "--backing", path, "--arity", "2", "--grid-res", "16", "--trials", "20"]
    rc, _, _, report = _run(capsys, argv, tmp_path)
    assert rc == 0 and report["pass"] is True
    assert {c["name"] for c in report["result"]["checks"]} == {
        "vanishing_on_disjoint",
        "symmetry",
        "poly_orthogonal_additivity",
    }


def test_characterize_tensor_fails_with_witness(capsys, tmp_path):
    t = np.zeros((8, 8))
    t[0, 4] = 1.0
    path = _write(tmp_path, "t.json", _tensor(t))
    argv = ["characterize", "--backing", path, "--grid-res", "8", "--trials", "200"]
    rc, _, _, report = _run(capsys, argv, tmp_path)
    assert rc == 1 and report["result"]["witness"]["value"] == 1.0


def test_characterize_needs_arity_for_measure(capsys, tmp_path):
    path = _write(tmp_path, "m.json", {"masses": [1.0] * 8})
    rc, _, err, _ = _run(capsys, ["characterize", "--backing", path, "--grid-res", "8"])
    assert rc == 2 and "--arity" in err


def test_characterize_csv(capsys, tmp_path):
    path = _write(tmp_path, "m.json", {"proportional_to_weights": 1.0})
    rc = main(["characterize", "--backing", path, "--arity", "2", "--grid-res", "8", "--trials", "5", "--format", "csv"])
    lines = capsys.readouterr().out.splitlines()
    assert rc == 0 and lines[0] == "name,max_violation,scale,pass" and len(lines) == 4


def test_recover(capsys, tmp_path):
    masses = np.arange(1.0, 9.0).tolist()
    path = _write(tmp_path, "m.json", {"masses": masses})
    rc, _, _, report = _run(capsys, ["recover", "--poly-from", path, "--grid-res", "8"], tmp_path)
    assert rc == 0 and report["result"]["measure"] == masses and report["result"]["matches_input"]


def test_reduce(capsys, tmp_path):
    path = _write(tmp_path, "m.json", {"proportional_to_weights": 3.0})
    rc, _, _, report = _run(capsys, ["reduce", "--measure", path, "--grid-res", "32"], tmp_path)
    assert rc == 0 and abs(report["result"]["c"] - 3.0) <= 1e-9
    g = np.full(16, 2 * np.pi / 16) / 2
    g[5] += 1e-3
    path = _write(tmp_path, "p.json", {"masses": g.tolist()})
    rc, _, _, report = _run(capsys, ["reduce", "--measure", path, "--grid-res", "16"], tmp_path)
    assert rc == 1 and report["result"]["invariance_residual"] >= 1e-4
    rc, _, _, _ = _run(capsys, ["reduce", "--measure", path, "--dim", "3", "--grid-res", "4"])
    assert rc == 2


def test_accept_subset(capsys, tmp_path):
    rc, out, _, report = _run(capsys, ["accept", "--suite", "1,3"], tmp_path)
    assert rc == 0
    assert [c["id"] for c in report["result"]["criteria"]] == [1, 3, 10]
    assert out.count("PASS") == 3
    rc, _, _, _ = _run(capsys, ["accept", "--suite", "1,99"])
    assert rc == 2


def test_reports_are_byte_identical(capsys, tmp_path):
    path = _write(tmp_path, "m.json", {"proportional_to_weights": 2.0})
    reports = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        main(["characterize", "--backing", path, "--arity", "2", "--grid-res", "16",
              "--trials", "30", "--seed", "7", "--out", str(out)])
        reports.append(out.read_bytes())
    capsys.readouterr()
    assert reports[0] == reports[1]


def test_every_schema_is_valid():
    for p in files("dualbm").joinpath("schemas").iterdir():
        if p.name.endswith(".json"):
            jsonschema.Draft202012Validator.check_schema(json.loads(p.read_text()))
