from math import comb

from bfsdg.bfs_core.tate import SUMMANDS, build_tate_B, mono_mul


def expected_rank(ranks, shape):
    out = 1
    for deg in set(shape):
        k = shape.count(deg)
        n = ranks[deg]
        out *= comb(n, k) if deg % 2 else comb(n + k - 1, k)
    return out


def test_ranks_match_summands(ci_stages, tensor_stages):
    for st in (ci_stages, tensor_stages):
        B, M = st.B, st.spec.M
        ranks = {i: M.rank(i) for i in range(1, 4)}
        for i, summ in SUMMANDS.items():
            assert B.rank(i) == sum(expected_rank(ranks, shape) for _, shape in summ)


def test_d_squared_zero(ci_stages, tensor_stages):
    for st in (ci_stages, tensor_stages):
        assert all(m.is_zero() for _, m in st.B.complex.composites())


def test_odd_generators_square_to_zero():
    g = ((1, 0, 1),)
    assert mono_mul(g, g)[0] == 0


def test_summand_columns_partition(ci_stages):
    B = ci_stages.B
    for i, summ in SUMMANDS.items():
        cols = sorted(c for name, _ in summ for c in B.columns(i, name))
        assert cols == list(range(B.rank(i)))


def test_even_generator_square_is_twice_divided_square():
    g = ((2, 0, 1),)
    assert mono_mul(g, g) == (2, ((2, 0, 2),))
