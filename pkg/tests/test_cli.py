import json
import subprocess
import sys

import pytest

from inoculation.cli import main
from inoculation.graph import make_cycle, write_edgelist


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_wof_k4(capsys):
    assert run(capsys, "wof", "--complete", "4", "--C", "1", "--L", "1", "--F", "1",
               "--model", "absolute") == (0, "4/3\n", "")


def test_poa(capsys):
    code, out, _ = run(capsys, "poa", "--star", "8", "--C", "13/32", "--L", "1")
    assert (code, out) == (0, "101/41\n")


def test_closed_form_star(capsys):
    code, out, _ = run(capsys, "closed-form", "--star", "8", "--C", "13/32", "--L", "1",
                       "--F", "1/8")
    doc = json.loads(out)
    assert code == 0 and doc["unique_fne"] is True
    assert [e["cost"]["exact"] for e in doc["fne"]] == ["41/32"]


def test_closed_form_needs_topology(capsys):
    assert run(capsys, "closed-form", "--cycle", "5", "--C", "1", "--L", "2")[0] == 2


def test_dynamics_star(capsys):
    code, out, _ = run(capsys, "dynamics", "--star", "4", "--C", "1", "--L", "2", "--F", "0",
                       "--init", "all-insecure", "--schedule", "round-robin")
    doc = json.loads(out)
    assert code == 0 and doc["changes"] == 1 and doc["converged"] and doc["final"] == "1000"


def test_enum_and_check(capsys):
    code, out, _ = run(capsys, "enum", "--complete", "4", "--C", "1", "--L", "1")
    assert code == 0 and json.loads(out)["count"] == 5
    code, out, _ = run(capsys, "check", "--complete", "4", "--C", "1", "--L", "1", "--F", "1",
                       "--init", "bits:0011")
    doc = json.loads(out)
    assert doc["equilibrium"] is True and doc["witness"] is None


def test_cost(capsys):
    code, out, _ = run(capsys, "cost", "--star", "4", "--C", "1", "--L", "2", "--F", "1/2",
                       "--init", "bits:1000")
    doc = json.loads(out)
    assert doc["perceived"][0] == "7/4" and doc["social"]["exact"] == "5/2"


def test_gen_and_graph_file(tmp_path, capsys):
    path = tmp_path / "k.txt"
    assert run(capsys, "gen", "--kleinberg", "4,1,2", "--seed", "3", "--out", str(path))[0] == 0
    assert path.read_text().startswith("n 16\n")
    code, out, _ = run(capsys, "dynamics", "--graph", str(path), "--C", "1", "--L", "4")
    assert code == 0 and json.loads(out)["instance"]["n"] == 16


def test_experiment(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": {"generator": "cycle", "n": 8}, "trials": 2,
                               "F_grid": ["0", "1"]}))
    csv_path, json_path = tmp_path / "o.csv", tmp_path / "o.json"
    code, _, _ = run(capsys, "experiment", "--config", str(cfg), "--out", str(csv_path),
                     "--json", str(json_path))
    assert code == 0
    assert len(csv_path.read_text().splitlines()) == 1 + 2 * 2 * 2
    assert len(json.loads(json_path.read_text())["rows"]) == 8
    code, out, _ = run(capsys, "experiment", "--config", str(cfg), "--dry-run")
    assert code == 0 and out.count("\n") == 1


@pytest.mark.parametrize("argv, code", [
    (["wof", "--complete", "4", "--C", "2", "--L", "1"], 3),
    (["wof", "--complete", "4", "--C", "1", "--L", "1", "--F", "3/2"], 3),
    (["wof", "--complete", "21", "--C", "1", "--L", "1"], 4),
    (["wof", "--complete", "9", "--C", "1", "--L", "1", "--cap", "8"], 4),
    (["wof", "--complete", "4", "--bogus"], 2),
    (["frobnicate"], 2),
    ([], 2),
    (["wof", "--C", "1"], 2),
    (["wof", "--complete", "4", "--C", "one"], 3),
    (["dynamics", "--cycle", "5", "--C", "1", "--L", "2", "--init", "bits:01"], 3),
    (["wof", "--graph", "/nonexistent/g.txt"], 3),
    (["experiment", "--config", "/nonexistent/c.json"], 3),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_usage_on_stderr(capsys):
    code, out, err = run(capsys, "wof", "--nope")
    assert code == 2 and out == "" and "usage:" in err


def test_malformed_graph_file(tmp_path, capsys):
    p = tmp_path / "g.txt"
    p.write_text("n 3\n0 1\n0 1\n")
    code, _, err = run(capsys, "wof", "--graph", str(p))
    assert code == 3 and "line 3" in err


def test_module_entry_point(tmp_path):
    g = tmp_path / "c.txt"
    write_edgelist(make_cycle(5), g)
    proc = subprocess.run([sys.executable, "-m", "inoculation", "wof", "--graph", str(g),
                           "--C", "1", "--L", "2", "--F", "1/2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
