import json
import subprocess
import sys

import numpy as np
import pytest

from packlab import catalog, cli, io
from packlab.certify import srg_packing
from packlab.frames import normalize_columns
from packlab.graph import Graph, triangular_graph


def _analyze(capsys, path, *extra):
    code = cli.run(["analyze", str(path), *extra])
    out = capsys.readouterr().out
    return code, dict(line.split(" ", 1) for line in out.splitlines())


def test_construct_and_analyze_four_six(tmp_path, capsys):
    path = tmp_path / "p.txt"
    assert cli.run(["construct", "catalog:4,6", "-o", str(path)]) == 0
    capsys.readouterr()
    code, rep = _analyze(capsys, path)
    assert code == 0
    assert float(rep["coherence"]) == pytest.approx(1 / 3, abs=1e-15)
    assert rep["angles"].startswith("equiangular")
    assert rep["tight"].startswith("False")
    assert "residual" in rep["expected"]


def test_construct_and_analyze_family(tmp_path, capsys):
    path = tmp_path / "p.json"
    assert cli.run(["construct", "thm52:P,3", "-o", str(path)]) == 0
    capsys.readouterr()
    code, rep = _analyze(capsys, path, "--strict")
    assert code == 0
    assert float(rep["coherence"]) == pytest.approx(0.25, abs=1e-15)
    assert rep["angles"].startswith("orthobiangular")
    assert rep["tight"].startswith("True")
    assert "contact" in rep and "13-secure" in rep


@pytest.mark.parametrize("spec", ["weil:5,2", "mub:3,4", "approx:240,330"])
def test_construct_other_families(tmp_path, capsys, spec):
    path = tmp_path / "p.txt"
    assert cli.run(["construct", spec, "-o", str(path)]) == 0
    p = io.load_packing(str(path))
    assert p.n > p.d


def test_analyze_strict_fails_on_wrong_polynomial(tmp_path, capsys):
    # a (4,6) packing that is not the catalog optimum
    rng = np.random.default_rng(0)
    m = rng.standard_normal((4, 6))
    path = tmp_path / "bad.txt"
    path.write_text(io.packing_to_text(normalize_columns(m)))
    assert cli.run(["analyze", str(path)]) == 0
    assert cli.run(["analyze", str(path), "--strict"]) == 1


def test_analyze_catalog_rows_reproduce_expectations(tmp_path, capsys):
    for key in [(3, 6), (5, 16), (6, 24), (7, 28), (10, 40)]:
        path = tmp_path / f"{key}.txt"
        io.dump_packing(catalog.build(key), str(path))
        code, rep = _analyze(capsys, path, "--strict")
        e = catalog.entry(key)
        assert code == 0
        assert catalog.rounded_up(float(rep["coherence"])) == e.printed_mu
        assert int(rep["angles"].split("count=")[1].split()[0]) == e.angles
        assert rep["tight"].startswith(str(e.tight))


def test_certify_verb(tmp_path, capsys):
    sp = srg_packing(triangular_graph(6))
    pfile, yfile, out = tmp_path / "p.txt", tmp_path / "y.json", tmp_path / "found.json"
    io.dump_packing(sp.packing, str(pfile))
    yfile.write_text(io.certificate_to_json(sp.certificate))
    assert cli.run(["certify", str(pfile), "--certificate", str(yfile)]) == 0
    assert "verdict certified" in capsys.readouterr().out
    assert cli.run(["certify", str(pfile), "-o", str(out)]) == 0
    assert json.loads(out.read_text())["meta"]["verdict"] == "certified"
    yfile.write_text(io.certificate_to_json(np.zeros((15, 15))))
    assert cli.run(["certify", str(pfile), "--certificate", str(yfile)]) == 1


def test_secure_verb(tmp_path, capsys):
    square = tmp_path / "c4.txt"
    square.write_text(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).to_text())
    assert cli.run(["secure", str(square), "--d", "2"]) == 0
    out = capsys.readouterr().out
    assert "2-secure True" in out and "residual 1 2 3 4" in out
    assert cli.run(["secure", str(square), "--d", "3"]) == 0
    out = capsys.readouterr().out
    assert "3-secure False" in out and "deletion order" in out


def test_cad_export_verb(tmp_path, capsys):
    assert cli.run(["cad-export", "--d", "4", "--form", "2", "--class", "1", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["equalities"]) == 36
    out = tmp_path / "q.txt"
    assert cli.run(["cad-export", "--d", "3", "--form", "1", "--class", "2", "--format", "script",
                    "-o", str(out)]) == 0
    assert out.read_text().startswith("Resolve[")
    assert cli.run(["cad-export", "--d", "4", "--class", "99"]) == 2
    assert cli.run(["cad-export", "--d", "4", "--form", "3"]) == 2


def test_table_verb(tmp_path, capsys, srg_data_dir):
    js = tmp_path / "t.json"
    assert cli.run(["table", "--data", srg_data_dir, "--json", str(js)]) == 0
    out = capsys.readouterr().out
    assert "failed 0" in out
    assert json.loads(js.read_text())["failed"] == 0


def test_convert_round_trip_is_byte_identical(tmp_path):
    a, b, c = tmp_path / "a.txt", tmp_path / "b.json", tmp_path / "c.txt"
    io.dump_packing(catalog.build((6, 24)), str(a))
    assert cli.run(["convert", str(a), str(b)]) == 0
    assert cli.run(["convert", str(b), str(c), "--to", "text"]) == 0
    assert a.read_bytes() == c.read_bytes()


def test_convert_sloane(tmp_path):
    src, dst = tmp_path / "s.txt", tmp_path / "p.json"
    src.write_text("1\n0\n0\n2\n")
    assert cli.run(["convert", str(src), str(dst), "--sloane", "2", "2"]) == 0
    assert np.allclose(io.load_packing(str(dst)).columns, np.eye(2))


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["construct", "catalog:99,100", "-o", "x.txt"],
    ["construct", "catalog:6", "-o", "x.txt"],
    ["construct", "nothing:1,2", "-o", "x.txt"],
    ["construct", "catalog:4,6"],
    ["analyze", "/nonexistent/file.txt"],
    ["secure", "g.txt"],
    ["analyze", "p.txt", "--bogus"],
])
def test_usage_errors_exit_two(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert cli.run(argv) == 2


def test_help_exits_zero(capsys):
    assert cli.run(["--help"]) == 0
    assert "construct" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    path = tmp_path / "p.txt"
    proc = subprocess.run([sys.executable, "-m", "packlab.cli", "construct", "catalog:3,6", "-o", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and path.exists()
