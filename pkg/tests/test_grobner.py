import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfsdg.exactalg import PolyMatrix, PolyRing
from bfsdg.grobner import (
    Lifter,
    NotInImage,
    column_module_equal,
    groebner_basis,
    lift,
    normal_form,
    syzygies,
)

R = PolyRing(["x", "y", "z"])
x, y, z = R.gens()


def test_ideal_basis_is_reduced_and_deterministic():
    gens = [[x * x - y], [x * y - z]]
    G1 = groebner_basis(gens, R, 1)
    G2 = groebner_basis(gens, R, 1)
    assert [g[0] for g in G1.basis] == [g[0] for g in G2.basis]
    leads = [g[0].lead()[0] for g in G1.basis]
    for i, a in enumerate(leads):
        for j, b in enumerate(leads):
            assert i == j or not all(p <= q for p, q in zip(a, b))
    for g in gens:
        rem, _ = normal_form(g, G1)
        assert not any(rem)


def test_normal_form_representation():
    G = groebner_basis([[x], [y]], R, 1)
    v = [x * z + y * y + z]
    rem, quots = normal_form(v, G)
    assert rem == [z]
    total = rem[0]
    for q, g in zip(quots, G.basis):
        total = total + q * g[0]
    assert total == v[0]


def test_lift_and_not_in_image():
    A = PolyMatrix.from_rows(R, [[x, y, z]])
    b = [x * y + z * z]
    sol = lift(A, b)
    assert A.apply(sol) == b
    with pytest.raises(NotInImage):
        lift(A, [R.one()])


def test_module_lift_rank_two():
    A = PolyMatrix.from_rows(R, [[x, y, R.zero()], [R.zero(), x, y]])
    lifter = Lifter(A)
    for b in ([x * x, x * y], [x * y + y * y, x * y + y * z]):
        assert A.apply(lifter.lift(b)) == b


def test_syzygies_of_koszul_row():
    A = PolyMatrix.from_rows(R, [[x, y, z]])
    syz = syzygies(A)
    assert syz
    for s in syz:
        assert A.apply(s) == [R.zero()]
    # the Koszul relations are in the syzygy module
    S = PolyMatrix.from_columns(R, syz, 3)
    K = PolyMatrix.from_columns(R, [[y, -x, R.zero()], [z, R.zero(), -x], [R.zero(), z, -y]], 3)
    assert column_module_equal(S, K)


def test_column_module_equal_detects_difference():
    A = PolyMatrix.from_rows(R, [[x, y]])
    B = PolyMatrix.from_rows(R, [[x, y * y]])
    assert column_module_equal(A, A)
    assert not column_module_equal(A, B)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)), min_size=1, max_size=4))
def test_lift_of_combination_succeeds(terms):
    A = PolyMatrix.from_rows(R, [[x * x, y * z, x + z]])
    coeffs = [R.zero()] * 3
    for k, (a, b, c, n) in enumerate(terms):
        coeffs[k % 3] = coeffs[k % 3] + R.monomial((a, b, c), n)
    b = A.apply(coeffs)
    assert A.apply(lift(A, b)) == b
