from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfsdg.exactalg import (
    DimensionMismatch,
    NotDivisible,
    NotUnimodular,
    PolyMatrix,
    PolyParseError,
    PolyRing,
    RingMismatch,
    det,
    rank,
    solve_fraction_field,
    unimodular_inverse,
)

R = PolyRing(["x", "y", "z"])
x, y, z = R.gens()


@st.composite
def polys(draw, ring=R, max_terms=4, max_deg=3):
    n = draw(st.integers(0, max_terms))
    out = ring.zero()
    for _ in range(n):
        exp = tuple(draw(st.integers(0, max_deg)) for _ in ring.variables)
        c = draw(st.fractions(min_value=-5, max_value=5, max_denominator=4))
        out = out + ring.monomial(exp, c)
    return out


def test_ring_validation():
    with pytest.raises(ValueError):
        PolyRing([])
    with pytest.raises(ValueError):
        PolyRing(["x", "x"])
    with pytest.raises(ValueError):
        PolyRing(["x"], 12)
    with pytest.raises(ValueError):
        PolyRing(["1x"])


def test_parse_and_print_round_trip():
    p = R.parse("(x + y)^2 - 1/2*x*z")
    assert p == x * x + x * y * 2 + y * y - (x * z).scale(Fraction(1, 2))
    assert R.parse(str(p)) == p
    assert str(R.zero()) == "0"


@pytest.mark.parametrize("text", ["x +", "x ** 2", "w", "(x", "", "x^y", "x $ y"])
def test_parse_errors(text):
    with pytest.raises(PolyParseError):
        R.parse(text)


def test_mod_p_coefficients():
    Rp = R.with_characteristic(7)
    p = R.parse("3/2*x + 7*y").change_ring(Rp)
    assert p == Rp.parse("5*x")
    with pytest.raises(ZeroDivisionError):
        Rp.coerce(Fraction(1, 7))
    assert Rp.inv(3) == 5


def test_ring_mismatch():
    S = PolyRing(["x", "y", "z"], 5)
    with pytest.raises(RingMismatch):
        _ = x + S.gen("x")


def test_divexact():
    assert (x * x - y * y).divexact(x - y) == x + y
    with pytest.raises(NotDivisible):
        (x + 1).divexact(y)


def test_evaluate_and_substitute():
    assert R.parse("x*y + 1").evaluate([2, 3, 0], 7) == 0
    assert (x * y).substitute({"x": y + 1}) == y * y + y


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_commutative_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == R.zero()


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_divexact_inverts_multiplication(a, b):
    if b:
        assert (a * b).divexact(b) == a


def mat(rows):
    return PolyMatrix.from_rows(R, [[R(v) for v in r] for r in rows])


def test_matrix_arithmetic_and_shapes():
    A = mat([["x", "y"], ["1", "0"]])
    I = PolyMatrix.identity(R, 2)
    assert A @ I == A
    assert (A - A).is_zero()
    assert A.transpose().transpose() == A
    with pytest.raises(DimensionMismatch):
        _ = A @ mat([["1", "2", "3"]])


def test_det_rank_inverse():
    A = mat([["x", "y"], ["1", "0"]])
    assert det(A) == -y
    assert rank(A) == 2
    assert rank(mat([["x", "y"], ["x*z", "y*z"]])) == 1
    U = mat([["1", "x"], ["0", "-1"]])
    assert U @ unimodular_inverse(U) == PolyMatrix.identity(R, 2)
    with pytest.raises(NotUnimodular):
        unimodular_inverse(A)


def test_solve_fraction_field():
    A = mat([["x", "0"], ["0", "y"]])
    s = solve_fraction_field(A, [x * y, y])
    assert s.consistent and s.polynomial and s.solution == [y, R.one()]
    s = solve_fraction_field(A, [R.one(), R.zero()])
    assert s.consistent and not s.polynomial
    s = solve_fraction_field(mat([["x"], ["y"]]), [R.one(), R.zero()])
    assert not s.consistent


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_det_is_multiplicative(entries):
    A = PolyMatrix.from_rows(R, [[R(entries[0]) + x, R(entries[1])], [R(entries[2]), R(entries[3]) * y]])
    B = mat([["1", "z"], ["x", "2"]])
    assert det(A @ B) == det(A) * det(B)
