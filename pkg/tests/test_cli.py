import json
import subprocess
import sys

import pytest

from vcsp_algebra.cli import main
from vcsp_algebra.language import Language, constant_n, load_language, rho_xor, serialize_language
from vcsp_algebra.vcsp import load_instance, solve


@pytest.fixture
def files(tmp_path):
    xor = Language(2, (rho_xor(),))
    (tmp_path / "xor.json").write_text(serialize_language(xor))
    (tmp_path / "tri.json").write_text(json.dumps({
        "domain_size": 2, "language": "xor.json", "variables": ["a", "b", "c"],
        "constraints": [{"scope": s, "function_name": "xor"} for s in (["a", "b"], ["b", "c"], ["a", "c"])],
    }))
    consts = Language(2, (constant_n(2, 0), constant_n(2, 1)))
    (tmp_path / "consts.json").write_text(serialize_language(consts))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_to_stdout(files, capsys):
    code, out, err = run(capsys, "solve", files / "tri.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["optimum"] == "1" and doc["command"] == "solve"
    assert err.strip() == "optimum 1"


def test_out_file_puts_summary_on_stdout(files, capsys):
    code, out, err = run(capsys, "solve", files / "tri.json", "--out", files / "r.json")
    assert code == 0 and err == ""
    assert out.strip() and "\n" not in out.strip()
    assert json.loads((files / "r.json").read_text())["result"]["optimum"] == "1"


def test_config_is_recorded(files, capsys):
    code, out, _ = run(capsys, "polymorphisms", files / "xor.json", "--arity", "2", "--seed", "5")
    doc = json.loads(out)
    assert code == 0 and doc["config"]["seed"] == 5 and doc["config"]["arity"] == 2
    assert doc["tool"] == "vcsp-algebra" and "version" in doc


def test_input_errors_exit_three(files, capsys):
    (files / "bad.json").write_text("{")
    code, out, err = run(capsys, "core", files / "bad.json")
    assert code == 3 and out == "" and "invalid JSON" in err
    code, _, err = run(capsys, "core", files / "missing.json")
    assert code == 3
    code, _, err = run(capsys, "classify", "boolean", files / "consts.json", "--budget-ops", "0")
    assert code == 3
    code, _, err = run(capsys, "classify", "ternary", files / "consts.json")
    assert code == 3 and "invalid choice" in err


def test_budget_exhaustion_exits_two(files, capsys):
    code, out, _ = run(capsys, "polymorphisms", files / "xor.json", "--arity", "3", "--budget-ops", "2")
    assert code == 2
    assert "budget_exceeded" in json.loads(out)["result"]


def test_classify_statuses(files, capsys):
    code, out, _ = run(capsys, "classify", "boolean", files / "xor.json")
    assert code == 0 and json.loads(out)["result"]["status"] == "NP_HARD"
    code, out, _ = run(capsys, "classify", "taylor", files / "consts.json")
    assert code == 0 and json.loads(out)["result"]["status"] == "CONJECTURED_TRACTABLE"


def test_unknown_verdict_exits_two(files, capsys):
    # the decisive arity for two elements is 3; stopping at 2 leaves XOR undecided
    code, out, _ = run(capsys, "classify", "taylor", files / "xor.json", "--arity", "2")
    assert code == 2 and json.loads(out)["result"]["status"] == "UNKNOWN"


def test_verify_own_evidence_and_tampering(files, capsys):
    run(capsys, "classify", "taylor", files / "xor.json", "--out", files / "t.json")
    code, out, _ = run(capsys, "verify-evidence", files / "xor.json", files / "t.json")
    assert code == 0 and json.loads(out)["result"]["valid"]
    doc = json.loads((files / "t.json").read_text())
    doc["result"]["evidence"]["prime"] = 2
    (files / "t.json").write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify-evidence", files / "xor.json", files / "t.json")
    assert code == 3 and not json.loads(out)["result"]["valid"]


def test_emitted_files_round_trip(files, capsys):
    (files / "f.json").write_text(json.dumps({"clauses": [["x", "y", "z"], ["x", "y", "w"]]}))
    code, out, _ = run(capsys, "reduce-1in3", files / "xor.json", files / "f.json",
                       "--emit-language", files / "L.json", "--emit-instance", files / "I.json")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["satisfiable"]
    inst, lang, _ = load_instance(files / "I.json")
    assert lang == load_language(files / "L.json")
    value, _ = solve(inst)
    assert str(value) == res["optimum"]


def test_emit_instance_needs_language(files, capsys):
    (files / "f.json").write_text(json.dumps({"clauses": [["x", "y", "z"]]}))
    code, _, err = run(capsys, "reduce-1in3", files / "xor.json", files / "f.json", "--emit-instance", files / "I.json")
    assert code == 3 and "--emit-language" in err


def test_lift_power_instance(files, capsys):
    code, out, _ = run(capsys, "lift", "power", files / "xor.json", "--exponent", "1",
                       "--instance", files / "tri.json")
    assert code == 0


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "vcsp_algebra", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "vcsp-algebra" in proc.stdout
