import json

import pytest

from bfsdg.cli import main
from bfsdg.instances import gen_ci, gen_tensor, write_instance


@pytest.fixture(scope="module")
def ci_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("inst") / "ci.json"
    write_instance(gen_ci(), path)
    return path


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_dga(capsys, ci_file):
    code, out, _ = run(capsys, "verify-dga", ci_file)
    assert code == 0
    assert "M: d o d = 0" in out and "K: d o d = 0" in out


def test_bfs_writes_reports_and_report_reads_them(capsys, ci_file, tmp_path):
    code, out, _ = run(capsys, "bfs", ci_file, "--out", tmp_path / "rep")
    assert code == 0 and "RESULT: all checks pass" in out
    data = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert data["passed"] and data["r"] == "x4"
    assert (tmp_path / "rep" / "report.txt").read_text() == out
    code, out, _ = run(capsys, "report", tmp_path / "rep")
    assert code == 0 and "total:" in out


def test_r_override(capsys, ci_file):
    code, out, _ = run(capsys, "bfs", ci_file, "--r", "x4^2 + 1")
    assert code == 0 and "r = x4^2 + 1" in out


def test_gen_to_stdout_and_file(capsys, tmp_path, ci_file):
    code, out, _ = run(capsys, "gen", "ci")
    assert code == 0 and json.loads(out)
    code, _, _ = run(capsys, "gen", "perturbed", "--base", ci_file, "--seed", 4, "--out", tmp_path / "p.json")
    assert code == 0 and (tmp_path / "p.json").exists()
    code, _, _ = run(capsys, "gen", "ci", "--char", 32003, "--out", tmp_path / "p.json")
    assert code == 0


def test_tensor_instance_exits_one(capsys, tmp_path):
    path = tmp_path / "tensor.json"
    write_instance(gen_tensor(), path)
    code, out, _ = run(capsys, "bfs", path)
    assert code == 1
    fails = [ln for ln in out.splitlines() if ln.startswith("FAIL")]
    assert len(fails) == 2 and all("X property" in ln for ln in fails)


@pytest.mark.parametrize(
    "args",
    [
        ("bfs", "/nonexistent/instance.json"),
        ("bfs",),
        ("frobnicate",),
        ("gen", "perturbed"),
        ("bfs", "{ci}", "--r", "x9"),
        ("bfs", "{ci}", "--calibration", "maybe"),
        ("report", "/nonexistent"),
    ],
)
def test_usage_and_input_errors_exit_two(capsys, ci_file, args):
    args = [str(ci_file) if a == "{ci}" else a for a in args]
    code, _, _ = run(capsys, *args)
    assert code == 2


def test_malformed_json_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "bfs", bad)[0] == 2
    bad.write_text(json.dumps({"format": 1}))
    assert run(capsys, "bfs", bad)[0] == 2
