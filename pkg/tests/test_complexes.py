import pytest

from bfsdg.complexes import (
    ChainMap,
    NotAComplex,
    build_complex,
    measure_sign,
    rank_condition_check,
    verify_chain_map,
)
from bfsdg.exactalg import DimensionMismatch, PolyMatrix, PolyRing
from bfsdg.multialg import koszul_algebra
from bfsdg.report import all_passed

R = PolyRing(["x", "y"])
x, y = R.gens()


def koszul2():
    return koszul_algebra([x, y]).complex


def test_dimension_checked():
    with pytest.raises(DimensionMismatch):
        build_complex([PolyMatrix.from_rows(R, [[x, y]]), PolyMatrix.from_rows(R, [[y]])])


def test_non_complex_rejected():
    with pytest.raises(NotAComplex):
        build_complex([PolyMatrix.from_rows(R, [[x, y]]), PolyMatrix.from_rows(R, [[y], [y]])])


def test_koszul_composites_vanish():
    K = koszul2()
    assert [K.rank(i) for i in range(3)] == [1, 2, 1]
    assert all(m.is_zero() for _, m in K.composites())
    assert K.rank(5) == 0 and K.d(7).rows == 0


def test_identity_chain_map_and_sign():
    K = koszul2()
    ident = ChainMap(K, K, 0, {i: PolyMatrix.identity(R, K.rank(i)) for i in range(3)}, {}, "id")
    assert all_passed(verify_chain_map(ident))
    assert measure_sign(ident, 1) == 1
    neg = ChainMap(K, K, 0, {i: PolyMatrix.identity(R, K.rank(i)).scale((-1) ** i) for i in range(3)}, {}, "alt")
    assert measure_sign(neg, 1) == -1
    assert not all_passed(verify_chain_map(neg))


def test_rank_condition():
    assert all_passed(rank_condition_check(koszul2()))
    bad = build_complex([PolyMatrix.from_rows(R, [[x, R.zero()]])], R)
    assert not all_passed(rank_condition_check(bad))
