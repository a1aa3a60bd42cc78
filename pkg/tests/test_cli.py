import io
import json

import jsonschema
import pytest

from rcdual.cli import run
from rcdual.report import REPORT_SCHEMA, RESULT_KEYS

from conftest import PROBLEMS


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _check(text, command):
    rep = json.loads(text)
    jsonschema.validate(rep, REPORT_SCHEMA)
    for key in RESULT_KEYS[command]:
        assert key in rep["results"], key
    return rep


def test_dual_affine1d():
    code, out, _ = _run("dual", PROBLEMS / "affine1d.json", "--seed", 7)
    assert code == 0
    rep = _check(out, "dual")
    assert rep["results"]["beta_hat"] == pytest.approx(1.0, abs=1e-8)
    assert rep["config"]["seed"] == 7 and rep["config"]["grid"] == 100001
    assert rep["all_passed"]


def test_equivalence_gap_is_success():
    code, out, _ = _run("equivalence", PROBLEMS / "gap.json")
    assert code == 0
    rep = _check(out, "equivalence")
    assert rep["results"]["verdict"] == "gap_detected"
    assert rep["results"]["inf_strict"]["value"] == "+inf"


def test_missing_file_and_usage_errors():
    assert _run("solve", "missing.json")[0] == 1
    assert _run("frobnicate")[0] == 1
    assert _run("dual", PROBLEMS / "affine1d.json", "--grid", "x")[0] == 1
    assert _run("dual", PROBLEMS / "mixed2d.json")[0] == 1
    assert _run("dual", PROBLEMS / "affine2d.json", "--grid", 5000)[0] == 1  # over budget


def test_failed_flag_exits_2(tmp_path):
    doc = json.loads((PROBLEMS / "affine1d.json").read_text())
    doc["known"]["alpha"] = 3.0
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run("dual", path, "--grid", 2001)
    assert code == 2
    rep = _check(out, "dual")
    assert not rep["flags"]["alpha_matches_known"]["passed"]
    assert rep["flags"]["alpha_matches_known"]["detail"]["alpha_known"] == 3.0


@pytest.mark.parametrize("argv,command", [
    (["solve", "mixed2d.json"], "solve"),
    (["reduce", "reduce_box.json"], "reduce"),
    (["reduce", "reduce_boundary.json"], "reduce"),
    (["conjugate", "disk2d.json", "--y", "0.3,-0.2"], "conjugate"),
    (["conjugate", "disk2d.json", "--function", "h0", "--y", "0.3,-0.2"], "conjugate"),
    (["verify-chain", "affine2d.json", "--grid", "201"], "verify-chain"),
])
def test_commands_validate(argv, command):
    code, out, _ = _run(argv[0], PROBLEMS / argv[1], *argv[2:])
    assert code == 0
    _check(out, command)


def test_conjugate_bad_function_name():
    assert _run("conjugate", PROBLEMS / "disk2d.json", "--function", "h5", "--y", "0,0")[0] == 1
    assert _run("conjugate", PROBLEMS / "disk2d.json", "--y", "0")[0] == 1


def test_report_file_and_text_format(tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = _run("solve", PROBLEMS / "affine1d.json", "--report", path, "--format", "text")
    assert code == 0
    assert out.startswith("solve :: affine1d")
    _check(path.read_text(), "solve")


def test_eps_sweep_echoed():
    code, out, _ = _run("solve", PROBLEMS / "affine1d.json", "--eps-strict", "0,1e-6", "--grid", 1001)
    rep = _check(out, "solve")
    assert rep["config"]["eps_strict"] == [0.0, 1e-6]
    assert set(rep["results"]["as_posed"]) == {"0.0", "1e-06"}


def test_byte_identical_reports():
    a = _run("dual", PROBLEMS / "square1d.json", "--seed", 3)[1]
    b = _run("dual", PROBLEMS / "square1d.json", "--seed", 3)[1]
    assert a == b
