import json

import pytest

from bfsdg.instances import gen_ci, gen_perturbed
from bfsdg.pipeline import corrupt_gamma2, run_bfs


def pass_vector(rep):
    return [(stage, c.name, c.passed) for stage, chs in rep.stages.items() for c in chs]


def test_ci_report_shape(ci_run):
    rep, F = ci_run
    assert rep.passed
    d = json.loads(rep.to_json())
    assert d["passed"] is True
    assert set(d["golden"]) == {"beta", "X", "Xt", "f", "h0_ideal", "reading"}
    assert rep.to_text().rstrip().endswith("RESULT: all checks pass")
    assert "== calibration repairs" in rep.to_text()


def test_reports_are_deterministic(ci_spec, ci_run):
    rep2, _ = run_bfs(ci_spec)
    assert rep2.to_json() == ci_run[0].to_json()


def test_basis_change_covariance_ci(ci_run):
    rep, _ = run_bfs(gen_perturbed(gen_ci(), 11))
    assert pass_vector(rep) == pass_vector(ci_run[0])


def test_basis_change_covariance_tensor(tensor_spec, tensor_run):
    rep, _ = run_bfs(gen_perturbed(tensor_spec, 1))
    assert pass_vector(rep) == pass_vector(tensor_run[0])


@pytest.mark.parametrize("what", ["f2", "p11"])
def test_corruptions_fail(ci_spec, what):
    rep, _ = run_bfs(ci_spec, corrupt=what)
    assert not rep.passed
    assert any(n.startswith("corruption") for n in rep.notes)
    bad = [c for c in rep.stages["F(alpha, r)"] if not c.passed]
    assert bad and all(c.witness for c in bad)


def test_gamma2_needs_nonzero_divided_square(ci_spec):
    with pytest.raises(ValueError):
        corrupt_gamma2(ci_spec.M)
    M, _ = corrupt_gamma2(gen_perturbed(ci_spec, 3).M)
    assert M.divided != gen_perturbed(ci_spec, 3).M.divided
