import pytest

from bfsdg.bfs_core.calibrate import calibrate
from bfsdg.bfs_core.structure import (
    COMPONENTS,
    TermTypeError,
    TypecheckFailure,
    ap,
    assemble,
    check_term,
    compute_h0_ideal,
    infer,
    mul,
    pretty,
    printed_skeleton,
    typecheck,
    typecheck_problems,
    v,
    verify_F,
    well_typed,
)
from bfsdg.report import all_passed, failures


def test_infer_compositions():
    # phi1 in slot 0 of degree 1 is the K1 component
    assert infer(ap("a1", v(0, 0)), (1,)) == ("M", 1)
    assert infer(ap("b2", "a2", v(0, 0)), (2,)) == ("K", 1)
    assert infer(mul(v(0, 1), v(1, 1)), (1, 1)) == ("M", 2)


def test_ill_typed_terms():
    with pytest.raises(TermTypeError):
        check_term(ap("m1", v(0, 0)), (1,), ("R", 0))
    # not linear in the second argument
    assert not well_typed(ap("m2", mul(v(0, 1), v(0, 1))), (1, 1), ("M", 1))


def test_pretty_names_arguments():
    assert pretty(mul(v(0, 1), v(1, 0)), (1, 1)) == "theta1*phi1'"


def test_printed_tables_do_not_typecheck():
    probs = typecheck_problems(printed_skeleton())
    assert any(p.startswith("f1 block") for p in probs)
    assert any("alpha4" in p for p in probs)
    with pytest.raises(TypecheckFailure):
        typecheck(printed_skeleton())


def test_reading_targets_the_component_order():
    reading = calibrate("full").reading
    for key, entry in reading.items():
        if key[0] == "f":
            assert key[2] < len(COMPONENTS[key[1] - 1]) and key[3] < len(COMPONENTS[key[1]])
        assert entry is not None


def test_assembled_ranks(ci_stages):
    F = assemble(calibrate("full").reading, ci_stages.ingredients())
    # K = Koszul(x1, x2, x3): ranks 1 3 3 1; M = Koszul on four: 1 4 6 4 1
    assert [F.rank(i) for i in range(5)] == [1, 3 + 4, 3 + 6 + 3, 4 + 3, 1]


def test_verify_F_runs_every_family(ci_stages):
    F = assemble(calibrate("full").reading, ci_stages.ingredients())
    checks = verify_F(F)
    assert all_passed(checks), [c.line() for c in failures(checks)]
    names = " | ".join(c.name for c in checks)
    for needle in ("Leibniz rule in degrees (1,4)", "Leibniz rule in degrees (2,3)", "associativity", "rank condition"):
        assert needle in names


def test_h0_ideal_on_ci_with_r_zero(ci_spec, ci_stages):
    F = assemble(calibrate("full").reading, ci_stages.ingredients(ci_spec.ring.zero()))
    gens, gb = compute_h0_ideal(F, groebner=True)
    names = {str(g) for g in gens}
    assert {"x1", "x2", "x3"} <= names
    _, gb2 = compute_h0_ideal(F, groebner=True)
    assert [str(g) for g in gb] == [str(g) for g in gb2]


def test_h0_ideal_under_unit_scaling(ci_spec, ci_stages):
    reading = calibrate("full").reading
    r = ci_spec.r
    a = compute_h0_ideal(assemble(reading, ci_stages.ingredients(r)))
    b = compute_h0_ideal(assemble(reading, ci_stages.ingredients(r.scale(3))))
    assert a and b and a != b
