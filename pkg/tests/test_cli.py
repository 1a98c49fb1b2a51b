import json
import subprocess
import sys

import pytest

from resbinar.algebra import binar_to_dict, load_model, save_model
from resbinar.cli import main
from resbinar.dimacs_cli import main as rbsat_main, read_dimacs

from conftest import chain_tables, make_binar


@pytest.fixture
def chain_model_file(tmp_path):
    meet, join = chain_tables(2)
    path = tmp_path / "chain.json"
    save_model(make_binar(meet, join, meet), path)
    return str(path)


def test_check_pass(chain_model_file, capsys):
    assert main(["check", chain_model_file, "--assume", "D1,D2", "--distributive"]) == 0
    assert "pass" in capsys.readouterr().out


def test_check_refute_fails_when_identity_holds(chain_model_file, capsys):
    # every identity holds on the 2-chain, so asking for a violation fails
    assert main(["check", chain_model_file, "--refute", "D1"]) == 1
    out = capsys.readouterr().out
    assert "D1 holds but should fail" in out


def test_check_flags_broken_model(tmp_path, capsys):
    meet, join = chain_tables(2)
    model = make_binar(meet, join, meet)
    data = binar_to_dict(model)
    data["ops"]["lres"] = [[0, 0], [0, 0]]  # wrong residual
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    assert main(["check", str(path)]) == 1
    assert "residuation fails" in capsys.readouterr().out


def test_check_missing_file(tmp_path, capsys):
    assert main(["check", str(tmp_path / "none.json")]) == 2


def test_search_sat_writes_model(tmp_path, capsys):
    out = tmp_path / "model.json"
    code = main(["search", "--size", "3", "--assume", "D1,D2",
                 "--solver", "builtin", "--out", str(out)])
    assert code == 10
    text = capsys.readouterr().out
    assert text.startswith("SAT:")
    model = load_model(out)
    assert model.size == 3


def test_search_unsat(capsys):
    code = main(["search", "--size", "3", "--refute", "D4", "--solver", "builtin"])
    assert code == 20
    assert capsys.readouterr().out.startswith("UNSAT:")


def test_search_invalid_task(capsys):
    assert main(["search", "--size", "2", "--assume", "D1", "--refute", "D1"]) == 2


def test_search_prints_model_json(capsys):
    code = main(["search", "--size", "2", "--solver", "builtin"])
    assert code == 10
    out = capsys.readouterr().out
    payload = out[out.index("{"):]
    data = json.loads(payload)
    assert data["size"] == 2


def test_encode_writes_dimacs(tmp_path, capsys):
    path = tmp_path / "task.cnf"
    assert main(["encode", "--size", "2", "--refute", "D1",
                 "--dimacs", str(path)]) == 0
    nvars, clauses = read_dimacs(str(path))
    assert nvars > 0 and clauses
    header = capsys.readouterr().out
    assert header.startswith("p cnf")


def test_encode_no_symmetry_differs(tmp_path):
    a = tmp_path / "sym.cnf"
    b = tmp_path / "nosym.cnf"
    main(["encode", "--size", "3", "--dimacs", str(a)])
    main(["encode", "--size", "3", "--dimacs", str(b), "--no-symmetry"])
    assert a.read_bytes() != b.read_bytes()
    assert len(read_dimacs(str(a))[1]) > len(read_dimacs(str(b))[1])


def test_grid_and_report_end_to_end(tmp_path, capsys):
    # Refuting D3 under the other five plus LD is one of the derived
    # implications, so every size must come back UNSAT.
    results = tmp_path / "results"
    code = main([
        "grid", "--targets", "D3", "--ld", "assume",
        "--min-size", "2", "--max-size", "4",
        "--solver", "pysat:minisat22", "--out", str(results),
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "3 results" in out and "0 expectation violations" in out
    assert out.count("[expected UNSAT]") == 3
    assert (results / "results.jsonl").exists()

    report_dir = tmp_path / "report"
    assert main(["report", "--in", str(results), "--out", str(report_dir)]) == 0
    summary = (report_dir / "summary.tex").read_text()
    assert "refute D3" in summary and "no model in range" in summary


def test_grid_rejects_bad_config(capsys):
    assert main(["grid", "--targets", "D9", "--max-size", "2"]) == 2


def test_enumerate_count_only(capsys):
    assert main(["enumerate", "--size", "2", "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "4"


def test_enumerate_lattices_up_to_iso(capsys):
    assert main(["enumerate", "--size", "4", "--lattices", "--up-to-iso",
                 "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_enumerate_models_stream(capsys):
    assert main(["enumerate", "--size", "2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4
    assert all(json.loads(line)["size"] == 2 for line in lines)


def test_enumerate_out_of_range(capsys):
    assert main(["enumerate", "--size", "9"]) == 2


def test_rbsat_roundtrip(tmp_path, capsys):
    sat = tmp_path / "sat.cnf"
    sat.write_text("c comment\np cnf 2 2\n1 2 0\n-1 0\n")
    assert rbsat_main([str(sat), "--engine", "minisat22"]) == 10
    out = capsys.readouterr().out
    assert "s SATISFIABLE" in out
    assert any(line.startswith("v ") for line in out.splitlines())

    unsat = tmp_path / "unsat.cnf"
    unsat.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert rbsat_main([str(unsat)]) == 20
    assert "s UNSATISFIABLE" in capsys.readouterr().out


def test_rbsat_missing_file(tmp_path, capsys):
    assert rbsat_main([str(tmp_path / "nope.cnf")]) == 0
    assert "s UNKNOWN" in capsys.readouterr().out


def test_console_scripts_installed():
    for name, args in (("resbinar", ["enumerate", "--size", "2", "--count-only"]),
                       ("rbsat", ["--help"])):
        proc = subprocess.run([name] + args, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
