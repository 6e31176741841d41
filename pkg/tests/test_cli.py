import json
import subprocess
import sys

import pytest

from simcontracts.cli import main, resolve_contract
from simcontracts.errors import DanglingReference
from simcontracts.projectfile import example_project_path
from simcontracts import load_example_project

PROJECT = str(example_project_path())
TRACE = str(example_project_path().parent / "two_component_trace.csv")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", PROJECT)
    assert code == 0 and out.strip().endswith("ok")


def test_configure(capsys):
    code, out, _ = run(capsys, "configure", PROJECT, "--test-case", "tc_highway")
    assert code == 0
    assert "1. {M1, M2b}  cost 12" in out
    assert "x  {M1, M2a}" in out and "witness:" in out
    code, out, _ = run(capsys, "configure", PROJECT, "--test-case", "tc_highway", "--format", "machine")
    report = json.loads(out)
    assert report["valid"][0]["models"] == ["M1", "M2b"] and report["valid"][0]["cost"] == 12
    assert report["rejected"][0]["reason"] == "refinement"


def test_machine_output_is_byte_stable(capsys):
    outs = {run(capsys, "configure", PROJECT, "--test-case", "tc_highway", "--format", "machine")[1] for _ in range(3)}
    assert len(outs) == 1


def test_refine_failure_has_witness(capsys):
    code, out, _ = run(capsys, "refine", PROJECT, "--sub", "comp(C1,C2a)", "--super", "Ctc")
    assert code == 1 and "does not refine" in out and "witness: " in out
    code, out, _ = run(capsys, "refine", PROJECT, "--sub", "comp(C1,C2b)", "--super", "Ctc", "--format", "machine")
    assert code == 0 and json.loads(out)["refines"] is True


def test_compose_and_quotient(capsys):
    code, out, _ = run(capsys, "compose", PROJECT, "--contracts", "C1,C2b")
    assert code == 0 and "contract C1*C2b" in out and "guarantee: ego_speed in [0, 40] & pos_err in [0, 0.2]" in out
    code, out, _ = run(capsys, "quotient", PROJECT, "--top", "Ctc", "--by", "C1", "--format", "machine")
    q = json.loads(out)
    assert code == 0 and q["saturated_operands"] == ["Ctc", "C1"]


def test_monitor(capsys, tmp_path):
    code, out, _ = run(capsys, "monitor", PROJECT, "--test-case", "tc_highway", "--setup", "M1,M2b", "--trace", TRACE)
    assert code == 0 and out.startswith("verdict: clean")
    code, out, _ = run(capsys, "monitor", PROJECT, "--test-case", "tc_highway", "--setup", "M1,M2a", "--trace", TRACE, "--format", "machine")
    report = json.loads(out)
    assert code == 1 and report["verdict"] == "assumption-exits-only"
    assert [v["time"] for v in report["contracts"]["C2a"]] == [1.5, 2.0, 2.5]
    bad = tmp_path / "bad.csv"
    bad.write_text("time,ego_speed\n0,1\n0,2\n")
    code, _, err = run(capsys, "monitor", PROJECT, "--test-case", "tc_highway", "--setup", "M1,M2b", "--trace", str(bad))
    assert code == 2 and "bad.csv" in err and "line 3" in err


def test_input_errors_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 2 and err.startswith("error:")
    broken = tmp_path / "p.json"
    broken.write_text(example_project_path().read_text().replace('"C1"', '"C9"', 1))
    code, _, err = run(capsys, "validate", str(broken))
    assert code == 2 and "models[0].contract" in err
    code, _, err = run(capsys, "refine", PROJECT, "--sub", "comp(C1,", "--super", "Ctc")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["configure", PROJECT, "--bogus"])
    assert info.value.code == 2


def test_resolve_contract():
    p = load_example_project()
    assert resolve_contract(p, "C1").id == "C1"
    assert resolve_contract(p, "tc_highway").id == "tc_highway"
    assert resolve_contract(p, "sat(conj(C2a, C2b))").id == "(C2a^C2b)"
    with pytest.raises(DanglingReference):
        resolve_contract(p, "C1 C2a")
    with pytest.raises(DanglingReference):
        resolve_contract(p, "frob(C1)")


@pytest.mark.parametrize("sub", ["validate", "compose", "quotient", "refine", "configure", "monitor"])
def test_help(sub, capsys):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    assert info.value.code == 0
    assert "usage:" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "simcontracts", "configure", PROJECT, "--test-case", "tc_highway"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "{M1, M2b}" in proc.stdout
