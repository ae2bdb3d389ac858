from bfsdg.bfs_core.homotopy import build_c, forced_columns
from bfsdg.report import all_passed, failures


def test_c_is_chain_map_with_vanishings(ci_stages, tensor_stages):
    for st in (ci_stages, tensor_stages):
        checks = st.checks["morphism c"]
        assert all_passed(checks), [c.line() for c in failures(checks)]


def test_printed_c5_sign_breaks_chain_map(tensor_stages):
    st = tensor_stages
    _, checks = build_c(st.data, st.B, printed_c5_sign=True)
    bad = failures(checks)
    assert bad and any("5" in c.name for c in bad)


def test_homotopy_residuals_and_properties(ci_stages, tensor_stages):
    for st in (ci_stages, tensor_stages):
        checks = st.checks["homotopy h"]
        assert all_passed(checks), [c.line() for c in failures(checks)]
        assert sum(c.name.startswith("homotopy residual") for c in checks) == 6


def test_forced_columns_are_zero(tensor_stages):
    st = tensor_stages
    forced = forced_columns(st.data, st.B)
    h = st.hres.h.comps
    for i, cols in forced.items():
        for col in cols:
            assert not any(h[i].column(col)), (i, col)


def test_ci_homotopy_is_zero(ci_stages):
    assert all(m.is_zero() for m in ci_stages.hres.h.comps.values())
    assert ci_stages.hres.lifts == []


def test_tensor_lifts_substitute_back(tensor_stages):
    st = tensor_stages
    lifts = st.hres.lifts
    assert len(lifts) > 0
    assert all(rec.verified and rec.solvable_over_fractions for rec in lifts)
