"""Randomized algebraic identities: any r, any basis, and the Tate product."""

from functools import cache

from hypothesis import given, settings
from hypothesis import strategies as st

from bfsdg.bfs_core.calibrate import calibrate
from bfsdg.bfs_core.structure import assemble, verify_F
from bfsdg.bfs_core.tate import mono_mul
from bfsdg.instances import gen_ci, gen_perturbed
from bfsdg.pipeline import prepare
from bfsdg.report import failures

CI = gen_ci()
RING = CI.ring


@cache
def ci_stages():
    return prepare(CI)


@st.composite
def ring_elements(draw):
    out = RING.zero()
    for _ in range(draw(st.integers(0, 3))):
        exp = tuple(draw(st.integers(0, 2)) for _ in RING.variables)
        out = out + RING.monomial(exp, draw(st.integers(-4, 4)))
    return out


@settings(max_examples=12, deadline=None)
@given(ring_elements())
def test_F_is_a_dga_for_every_r(r):
    F = assemble(calibrate("full").reading, ci_stages().ingredients(r))
    bad = [c for c in verify_F(F) if not c.passed and "rank" not in c.name]
    assert not bad, [c.line() for c in bad]


@settings(max_examples=6, deadline=None)
@given(st.integers(100, 10_000), ring_elements())
def test_F_is_a_dga_in_any_basis(seed, r):
    st_ = prepare(gen_perturbed(CI, seed))
    assert not [c for chs in st_.checks.values() for c in failures(chs)]
    F = assemble(calibrate("full").reading, st_.ingredients(r))
    bad = [c for c in verify_F(F) if not c.passed and "rank" not in c.name]
    assert not bad, [c.line() for c in bad]


factors = st.lists(
    st.tuples(st.integers(1, 3), st.integers(0, 3), st.just(1)), min_size=1, max_size=2
).map(lambda fs: tuple(sorted(set(fs))))


def mdeg(m):
    return sum(d * e for d, _, e in m)


def mul3(x, y, z, left=True):
    """(coefficient, monomial) of (xy)z or x(yz); coefficient 0 when it vanishes."""
    k1, p = mono_mul(x, y) if left else mono_mul(y, z)
    if not k1:
        return 0, None
    k2, q = mono_mul(p, z) if left else mono_mul(x, p)
    return (k1 * k2, q) if k2 else (0, None)


@settings(max_examples=200, deadline=None)
@given(factors, factors, factors)
def test_tate_product_associative(a, b, c):
    assert mul3(a, b, c, left=True) == mul3(a, b, c, left=False)


@settings(max_examples=200, deadline=None)
@given(factors, factors)
def test_tate_product_graded_commutative(a, b):
    k1, p = mono_mul(a, b)
    k2, q = mono_mul(b, a)
    sign = -1 if mdeg(a) * mdeg(b) % 2 else 1
    assert k1 == sign * k2
    if k1:
        assert p == q
