from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from dendrorho.cli import main
from dendrorho.formats import space_from_json, space_to_json, tree_from_newick
from dendrorho.generators import gen_example41, gen_regular
from dendrorho.formats import tree_to_newick


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def ex(tmp_path):
    U, V = gen_example41(1)
    a, b = tmp_path / "U.json", tmp_path / "V.json"
    a.write_text(space_to_json(U))
    b.write_text(space_to_json(V))
    return str(a), str(b)


def test_rho_two_copies(capsys, ex):
    code, out, _ = run(capsys, "rho", ex[0], ex[0])
    r = json.loads(out)["result"]
    assert code == 0 and r["kappa"] == "0" and r["rho_display"] == "0" and r["rho_exact_n"] == 0


def test_rho_example(capsys, ex):
    code, out, _ = run(capsys, "rho", *ex)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["kappa"] == "1/2"
    assert math.isclose(float(rep["result"]["rho_display"]), math.log(2), rel_tol=1e-9)
    assert rep["result"]["rho_exact_n"] == "NON-INTEGER"
    assert rep["format_version"] == 1 and len(rep["inputs"][0]["sha256"]) == 64


def test_reports_byte_identical_across_runs_and_jobs(capsys, ex):
    outs = [run(capsys, "rho", *ex, "--jobs", str(j))[1] for j in (2, 8)]
    assert outs[0].replace('"jobs": 2', '"jobs": 8') == outs[1]
    assert run(capsys, "rho", *ex)[1] == run(capsys, "rho", *ex)[1]


def test_budget_exhausted_exit_2(capsys, tmp_path):
    U, V = gen_example41(3)
    (tmp_path / "a.json").write_text(space_to_json(U))
    (tmp_path / "b.json").write_text(space_to_json(V))
    code, out, _ = run(capsys, "rho", str(tmp_path / "a.json"), str(tmp_path / "b.json"), "--budget", "3")
    r = json.loads(out)["result"]
    assert code == 2 and r["verdict"] == "BOUNDS" and r["kappa"] is None


def test_bound_mode(capsys, ex):
    code, out, _ = run(capsys, "rho", *ex, "--bound")
    r = json.loads(out)["result"]
    assert code == 0 and r["verdict"] == "BOUNDS" and r["lower_bound"] == "0"


def test_infinite_is_not_an_error(capsys, tmp_path, ex):
    (tmp_path / "t.nwk").write_text(tree_to_newick(gen_regular(2, 2)))
    code, out, _ = run(capsys, "rho", ex[0], str(tmp_path / "t.nwk"))
    r = json.loads(out)["result"]
    assert code == 0 and r["verdict"] == "INFINITE" and r["rho"] == "INFINITE"


def test_branching_and_isometry(capsys, ex):
    code, out, _ = run(capsys, "branching", *ex, "--oracle")
    r = json.loads(out)["result"]
    assert code == 0 and r == {"same_branching": False, "oracle": False}
    code, out, _ = run(capsys, "isometry", ex[0], ex[0])
    assert json.loads(out)["result"]["isometric"]


def test_validate_and_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"points": ["a","b","c"], "heights": [[null,"0","1"],["0",null,"2"],["1","2",null]]}')
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and json.loads(out)["result"]["verdict"] == "three_point"
    nwk = tmp_path / "bad.nwk"
    nwk.write_text("(a:1,b:0.1e1);")
    code, _, err = run(capsys, "rho", str(nwk), str(nwk))
    assert code == 1 and "at" in err
    trunc = tmp_path / "trunc.json"
    trunc.write_text('{"points": ["a"],\n "heights": [[null]')
    code, _, err = run(capsys, "delta", str(trunc))
    assert code == 1 and "line 2" in err


def test_delta_and_bound(capsys, tmp_path):
    (tmp_path / "t.nwk").write_text(tree_to_newick(gen_regular(2, 3)))
    code, out, _ = run(capsys, "delta", str(tmp_path / "t.nwk"))
    assert json.loads(out)["result"]["gap"] == "1"
    code, out, _ = run(capsys, "bound", str(tmp_path / "t.nwk"), str(tmp_path / "t.nwk"))
    r = json.loads(out)["result"]
    assert r["kappa_lower_bound"] == 0 and r["no_qualifying_k"]


def test_text_format(capsys, ex):
    code, out, _ = run(capsys, "--format", "text", "rho", *ex)
    assert out.startswith("rho:") and "kappa: 1/2" in out


def test_out_flag(capsys, ex, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "--out", str(dest), "rho", *ex)
    assert out == "" and json.loads(dest.read_text())["result"]["kappa"] == "1/2"


def test_gen_flags_and_manifest(capsys, tmp_path, monkeypatch):
    code, out, _ = run(capsys, "gen", "example41", "--N", "2", "--dir", str(tmp_path / "g"))
    assert code == 0 and space_from_json((tmp_path / "g" / "U.json").read_text()) == gen_example41(2)[0]
    manifest = tmp_path / "m.json"
    manifest.write_text('{"kind": "random_ultrametric", "n": 5, "heights": ["0", "1/2", "2"]}')
    monkeypatch.setenv("DENDRO_SEED", "11")
    code, out, _ = run(capsys, "gen", "--manifest", str(manifest))
    rep = json.loads(out)
    assert rep["config"]["seed"] == 11
    again = json.loads(run(capsys, "gen", "random_ultrametric", "--n", "5", "--heights", "0,1/2,2", "--seed", "11")[1])
    assert rep["result"] == again["result"]


def test_tree_conversions(capsys, tmp_path, ex):
    t = tmp_path / "t.nwk"
    t.write_text(tree_to_newick(gen_regular(2, 2)))
    code, out, _ = run(capsys, "tree2um", str(t))
    assert len(space_from_json(out)) == 4
    code, out, _ = run(capsys, "um2tree", ex[0])
    assert code == 0 and len(tree_from_newick(out).leaves) == 6


def test_suite_command(capsys):
    code, out, _ = run(capsys, "suite", "branching")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["passed"]
    code, out, _ = run(capsys, "suite", "metric-axioms", "--trials", "5")
    assert code == 1 and not json.loads(out)["result"]["passed"]


def test_console_entry_point(ex):
    res = subprocess.run([sys.executable, "-m", "dendrorho", "rho", *ex], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["result"]["kappa"] == "1/2"
