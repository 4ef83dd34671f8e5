import json

import pytest

from vertexkit.cli import main
from vertexkit.algorithms import ohm_hmatrix, rdo_hmatrix
from vertexkit.qcert import HMatrix


def run_cli(capsys, *argv):
    assert main(list(argv)) == 0
    return capsys.readouterr().out


def test_vertex_build_pattern(capsys):
    out = run_cli(capsys, "vertex", "build", "--pattern", "2,3,4,5")
    data = json.loads(out)
    assert HMatrix.from_json(data["h"]) == ohm_hmatrix(4)
    assert data["certificates"]["entries"][0] == {"k": 2, "j": 1, "value": "2/5"}


def test_vertex_build_diagram_file(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"n": 5, "parent": [3, 3, 5, 5]}))
    out = run_cli(capsys, "vertex", "build", "--diagram", str(path))
    assert HMatrix.from_json(json.loads(out)["h"]) == rdo_hmatrix(2, 2)


def test_vertex_enumerate(capsys):
    out = run_cli(capsys, "vertex", "enumerate", "--n", "4")
    assert len(out.strip().splitlines()) == 6
    out = run_cli(capsys, "vertex", "enumerate", "--n", "4", "--basic")
    assert len(out.strip().splitlines()) == 5


def test_check_subcommands(tmp_path, capsys):
    path = tmp_path / "h.json"
    path.write_text(json.dumps(ohm_hmatrix(4).to_json()))
    assert run_cli(capsys, "check", "invariance", "--h", str(path)).strip() == "true"
    assert run_cli(capsys, "check", "optimal", "--h", str(path)).strip() == "true"
    assert run_cli(capsys, "check", "rho", "--h", str(path)).strip() == "8"
    certs = json.loads(run_cli(capsys, "check", "certificates", "--h", str(path)))
    assert certs["n"] == 5 and len(certs["entries"]) == 4


def test_glue_and_verify(tmp_path, capsys):
    left = tmp_path / "l.json"
    right = tmp_path / "r.json"
    left.write_text(json.dumps(rdo_hmatrix(2, 2).to_json()))
    right.write_text(json.dumps(ohm_hmatrix(4).to_json()))
    out = json.loads(
        run_cli(capsys, "glue", "--left", str(left), "--right", str(right), "--verify")
    )
    assert out["gluing_theorem"] is True
    glued = HMatrix.from_json(out["h"])
    assert glued.n == 10
    assert out["h"]["rows"][4] == ["-3/20", "-3/20", "-9/20", "-1/4", "5/2"]


def test_dual_h(tmp_path, capsys):
    path = tmp_path / "h.json"
    path.write_text(json.dumps(ohm_hmatrix(4).to_json()))
    out = json.loads(run_cli(capsys, "dual", "--h", str(path)))
    assert out["dual_optimal"] is True
    assert out["route_agreement"] is True
    assert out["diagram"]["parent"] == [2, 3, 4, 5]
    assert out["dual_diagram"]["parent"] == [5, 5, 5, 5]


def test_dual_diagram(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"n": 10, "parent": [2, 3, 4, 10, 7, 7, 10, 9, 10]}))
    out = json.loads(run_cli(capsys, "dual", "--diagram", str(path)))
    assert out["parent"] == [3, 3, 6, 5, 6, 10, 10, 10, 10]


def test_diagram_art(capsys):
    out = run_cli(capsys, "diagram", "art", "--pattern", "3,3,5,5")
    assert out.splitlines()[-1] == "1 2 3 4 5"
    assert out.count("(") == 4


def test_run_writes_csv(tmp_path, capsys):
    out_csv = tmp_path / "trace.csv"
    run_cli(
        capsys,
        "run",
        "--algorithm",
        "fsdm",
        "--n",
        "16",
        "--operator",
        "worst-case",
        "--out",
        str(out_csv),
    )
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "iter,residual_sq,guaranteed,bound"
    assert len(lines) == 17


def test_experiment_from_config(tmp_path, capsys):
    cfg = {
        "n": 16,
        "algorithms": ["ohm", "dual-ohm"],
        "operators": [{"kind": "worst-case"}],
        "out_dir": str(tmp_path / "exp"),
        "seed": 1,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = run_cli(capsys, "experiment", "--config", str(cfg_path))
    manifest_path = out.strip()
    manifest = json.loads(open(manifest_path).read())
    assert len(manifest["cells"]) == 2
    assert all(c["status"] == "ok" for c in manifest["cells"])
