import json

import jsonschema
import pytest

from oddcolor.cli import load_schema, main
from oddcolor.graph import read_coloring

SCHEMA = load_schema()


def run(*argv):
    return main([str(a) for a in argv])


def report(path):
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, SCHEMA)
    return doc


@pytest.fixture(scope="module")
def c2(tmp_path_factory):
    p = tmp_path_factory.mktemp("cli") / "c.txt"
    assert run("cfls", "--m", 2, "--out", p) == 0
    return p


def test_cfls_writes_file(c2, tmp_path):
    col = read_coloring(c2)
    assert col.host.n == 16 and col.num_colors == 36
    assert "# color 0 = ((" in c2.read_text()
    r = tmp_path / "r.json"
    assert run("cfls", "--m", 1, "--out", tmp_path / "c1.txt", "--report", r) == 0
    doc = report(r)
    assert doc["result"]["colors"] == 1 and doc["manifest"]["outputs"]


def test_cfls_large_refused(tmp_path, capsys):
    assert run("cfls", "--m", 4, "--out", tmp_path / "x") == 2
    assert "allow_large" in capsys.readouterr().err


@pytest.mark.parametrize("check", ["k5odd", "k4odd", "mincolors:5,4", "patterns", "leftover"])
def test_verify_clean(c2, tmp_path, check):
    r = tmp_path / "r.json"
    assert run("verify", "--coloring", c2, "--check", check, "--report", r) == 0
    doc = report(r)
    assert doc["ok"] is True
    assert doc["manifest"]["inputs"][str(c2)]


def test_verify_violation_exit_1(c2, tmp_path):
    r = tmp_path / "r.json"
    assert run("verify", "--coloring", c2, "--check", "mincolors:5,7", "--report", r) == 1
    doc = report(r)
    assert doc["ok"] is False and doc["result"]["reports"][0]["num_violations"] == 144


def test_verify_sampled_seed_in_manifest(c2, tmp_path):
    r = tmp_path / "r.json"
    assert run("verify", "--coloring", c2, "--check", "k4odd", "--mode", "sample:42:1000",
               "--report", r) == 0
    assert report(r)["manifest"]["seeds"] == [42]


def test_usage_errors(c2, tmp_path, capsys):
    with pytest.raises(SystemExit) as ei:
        run("verify", "--check", "k5odd")
    assert ei.value.code == 2
    with pytest.raises(SystemExit) as ei:
        run("frobnicate")
    assert ei.value.code == 2
    assert run("verify", "--coloring", tmp_path / "missing", "--check", "k5odd") == 2
    assert run("verify", "--coloring", c2, "--check", "k9odd") == 2
    assert run("verify", "--coloring", c2, "--check", "k5odd", "--mode", "sample:x") == 2
    assert run("verify", "--coloring", c2, "--check", "c4odd") == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("oddcolor v1\ngraph complete n=3\ncolors t=1\ne 1 1 0\n")
    assert run("verify", "--coloring", bad, "--check", "k5odd") == 2
    assert "line 4" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        run("knn", "--n", 20, "--seed", -1)


def test_exact_g(tmp_path):
    r, w = tmp_path / "r.json", tmp_path / "w.txt"
    assert run("exact-g", "--host", "B:2", "--pattern", "C4", "--kmax", 3,
               "--witness-out", w, "--report", r) == 0
    doc = report(r)
    assert doc["result"]["g"] == 2 and read_coloring(w).num_colors == 2
    assert run("exact-g", "--host", "B:4", "--pattern", "C4", "--kmax", 2, "--report", r) == 0
    assert report(r)["result"]["result"] == "g > 2"
    assert run("exact-g", "--host", "B:5", "--pattern", "C4", "--kmax", 2) == 2


def test_knn_and_code(tmp_path):
    out, st = tmp_path / "k.txt", tmp_path / "s.json"
    assert run("knn", "--n", 14, "--seed", 3, "--out", out, "--stats", st) == 0
    doc = report(st)
    assert doc["result"]["c4_violations"] == 0 and doc["manifest"]["seeds"] == [3]
    r = tmp_path / "r.json"
    assert run("verify", "--coloring", out, "--check", "c4odd", "--report", r) == 0
    assert run("code", "--coloring", out, "--pattern", "C4", "--report", r) == 0
    assert report(r)["result"]["certified"] is True
    assert run("verify", "--coloring", out, "--check", "k5odd") == 2
    assert run("knn", "--n", 11, "--seed", 0) == 2


def test_code_failure_exit_1(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("oddcolor v1\ngraph complete n=4\ncolors t=1\n"
                 + "".join(f"e {a} {b} 0\n" for a in range(4) for b in range(a + 1, 4)))
    r = tmp_path / "r.json"
    assert run("code", "--coloring", p, "--pattern", "K4", "--report", r) == 1
    assert report(r)["result"]["failing_copy"]
    assert run("code", "--coloring", p, "--pattern", "K3") == 0


def test_hcode_max(tmp_path, capsys):
    r = tmp_path / "r.json"
    assert run("hcode-max", "--n", 4, "--pattern", "C4", "--report", r) == 0
    assert report(r)["result"]["lower"] == 16
    assert "D_C4(4) = 16" in capsys.readouterr().out
    with pytest.raises(SystemExit):
        run("hcode-max", "--n", 6, "--pattern", "C4")


def test_threads_flag(c2):
    with pytest.raises(SystemExit):
        run("verify", "--coloring", c2, "--check", "k5odd", "--threads", 0)
    assert run("verify", "--coloring", c2, "--check", "k5odd", "--threads", 2) == 0
