"""X: Lambda^2 M_1 -> M_2 and X^t: M_1 (x) M_2 -> M_3 read off from h_4 by duality."""

from __future__ import annotations

from itertools import combinations

from ..exactalg import PolyMatrix, unimodular_inverse
from ..multialg import inverse_pairing
from ..report import Check, first_nonzero


class IdentityFailure(ArithmeticError):
    pass


def _add(*vs):
    out = list(vs[0])
    for v in vs[1:]:
        out = [a + b for a, b in zip(out, v)]
    return out


def _neg(v):
    return [-x for x in v]


class XMaps:
    def __init__(self, data, B, hres):
        M = data.M
        self.data, self.M, self.B = data, M, B
        ring = M.ring
        r1, r2, r3 = M.rank(1), M.rank(2), M.rank(3)
        self.pairs = list(combinations(range(r1), 2))
        self.pair_index = {p: k for k, p in enumerate(self.pairs)}
        h4 = hres.h.comps[4]
        b4inv = unimodular_inverse(data.beta[4])
        # scalar [beta_4^{-1} h_4(e_a ^ e_b (x) f_c)]_M as a row over B_4
        self.functional = (M.orientation @ b4inv @ h4).row(0)
        self.H = {}
        for a, b in self.pairs:
            for c in range(r2):
                mono = ((1, a, 1), (1, b, 1), (2, c, 1))
                self.H[(a, b, c)] = self.functional[B.where[4][mono]]
        P2T_inv = inverse_pairing(M, 2).transpose()
        P13_inv = inverse_pairing(M, 1)
        xcols = []
        for a, b in self.pairs:
            xcols.append(P2T_inv.apply([self.H[(a, b, c)] for c in range(r2)]))
        self.X = PolyMatrix.from_columns(ring, xcols, r2)
        tcols = []
        for a in range(r1):
            for c in range(r2):
                tcols.append(P13_inv.apply([self.h(a, b, c) for b in range(r1)]))
        self.Xt = PolyMatrix.from_columns(ring, tcols, r3)
        self.provenance = "h_4 restricted to Lambda^2 M_1 (x) M_2"

    def h(self, a, b, c):
        """The scalar at an arbitrary ordered pair, using antisymmetry."""
        if a == b:
            return self.M.ring.zero()
        if a < b:
            return self.H[(a, b, c)]
        return -self.H[(b, a, c)]

    def X_basis(self, a, b):
        if a == b:
            return self.M.zero(2)
        if a < b:
            return self.X.column(self.pair_index[(a, b)])
        return _neg(self.X.column(self.pair_index[(b, a)]))

    def Xv(self, x, y):
        """X(x ^ y) for vectors x, y in M_1."""
        acc = self.M.zero(2)
        for a, u in enumerate(x):
            if not u:
                continue
            for b, v in enumerate(y):
                if v and a != b:
                    acc = _add(acc, [(u * v) * z for z in self.X_basis(a, b)])
        return acc

    def Xtv(self, x, s):
        """X^t(x (x) s) for x in M_1, s in M_2."""
        r2 = self.M.rank(2)
        acc = self.M.zero(3)
        for a, u in enumerate(x):
            if not u:
                continue
            for c, v in enumerate(s):
                if v:
                    acc = _add(acc, [(u * v) * z for z in self.Xt.column(a * r2 + c)])
        return acc


def extract_X(data, B, hres):
    xm = XMaps(data, B, hres)
    return xm, x_property_checks(data, xm)


def x_property_checks(data, xm):
    M = data.M
    ring = M.ring
    e = M.basis
    r1, r2, r3 = M.rank(1), M.rank(2), M.rank(3)
    mul = M.mul
    al = lambda i, v: data.alpha[i].apply(v)
    be = lambda i, v: data.beta[i].apply(v)
    a1 = lambda p: data.alpha[1].column(p)
    out = []

    def record(name, gen):
        wit = None
        for label, vec in gen():
            if any(vec):
                wit = f"at {label}: {[str(x) for x in vec]}"
                break
        out.append(Check(name, wit is None, wit))

    def g_def():
        for a in range(r1):
            for b in range(r1):
                for c in range(r2):
                    lhs = M.bracket(mul(2, xm.X_basis(a, b), 2, e(2, c)))
                    mid = xm.h(a, b, c)
                    rhs = M.bracket(mul(1, e(1, b), 3, xm.Xt.column(a * r2 + c)))
                    yield (a, b, c), [lhs - mid, mid - rhs]

    record("X(t ^ t') s = beta_4^-1 h_4(t ^ t' (x) s) = t' X^t(t (x) s)", g_def)

    w = first_nonzero(data.beta[2] @ xm.X)
    out.append(Check("X property (1): beta_2 X = 0", w is None, w))
    w = first_nonzero(data.beta[3] @ xm.Xt)
    out.append(Check("X property (2): beta_3 X^t = 0", w is None, w))

    def g3a():
        for a in range(r1):
            for p in range(3):
                yield ("Xt", a, p), xm.Xtv(e(1, a), data.alpha[2].column(p))

    record("X property (3a): X^t(- (x) alpha_2(K_2)) = 0", g3a)

    def g3b():
        for a, b in xm.pairs:
            for p in range(3):
                yield ("aX", a, b, p), mul(1, a1(p), 2, xm.X_basis(a, b))

    # needs h_4 to vanish on t ^ t' (x) u alpha_1(phi) for every u, which the
    # homotopy constraints only guarantee for u in {t, t'}
    record("X property (3b): alpha_1(K_1) X = 0", g3b)

    def g4a():
        for a in range(r1):
            for b in range(r1):
                for c in range(r1):
                    for p in range(3):
                        u = mul(2, mul(1, a1(p), 1, e(1, c)), 2, xm.X_basis(a, b))
                        v = mul(2, mul(1, a1(p), 1, e(1, a)), 2, xm.X_basis(c, b))
                        yield (a, b, c, p), _add(u, v)

    record("X property (4): alpha_1(phi) t'' X(t ^ t') + alpha_1(phi) t X(t'' ^ t') = 0", g4a)

    def g4b():
        for a in range(r1):
            for b in range(r1):
                for c in range(r1):
                    u = mul(1, e(1, c), 2, xm.X_basis(a, b))
                    v = mul(1, e(1, a), 2, xm.X_basis(c, b))
                    yield (a, b, c), _add(u, v)

    record("X property (4'): t'' X(t ^ t') + t X(t'' ^ t') = 0", g4b)

    def g5():
        for a, b in xm.pairs:
            t, t1 = e(1, a), e(1, b)
            lhs = M.d(2).apply(xm.X_basis(a, b))
            b1t, b1t1 = be(1, t)[0], be(1, t1)[0]
            rhs = _add(
                [b1t1 * x for x in t],
                [-b1t * x for x in t1],
                _neg(al(1, be(2, mul(1, t, 1, t1)))),
            )
            yield (a, b), _add(lhs, _neg(rhs))

    record("X property (5): m_2 X(t ^ t') = beta_1(t') t - beta_1(t) t' - alpha_1 beta_2(t t')", g5)

    def g6():
        for a in range(r1):
            for u in range(r3):
                t, th = e(1, a), e(3, u)
                lhs = xm.Xtv(t, M.d(3).apply(th))
                rhs = _add(
                    _neg(mul(1, t, 2, al(2, be(3, th)))),
                    [be(1, t)[0] * x for x in th],
                    al(3, be(4, mul(1, t, 3, th))),
                )
                yield (a, u), _add(lhs, _neg(rhs))

    record(
        "X property (6): X^t(t (x) m_3(u)) = -t alpha_2 beta_3(u) + beta_1(t) u + alpha_3 beta_4(t u)",
        g6,
    )

    def g7():
        for a in range(r1):
            for c in range(r2):
                t, s = e(1, a), e(2, c)
                lhs = _add(xm.Xv(t, M.d(2).apply(s)), _neg(M.d(3).apply(xm.Xtv(t, s))))
                rhs = _add(
                    al(2, be(3, mul(1, t, 2, s))),
                    _neg(mul(1, t, 1, al(1, be(2, s)))),
                    [-be(1, t)[0] * x for x in s],
                )
                yield (a, c), _add(lhs, _neg(rhs))

    record("X property (7): X(t ^ m_2(s)) - m_3 X^t(t (x) s) = alpha_2 beta_3(t s) - t alpha_1 beta_2(s) - beta_1(t) s", g7)

    def g8():
        for c in range(r2):
            for c1 in range(c, r2):
                s, s1 = e(2, c), e(2, c1)
                lhs = _add(xm.Xtv(M.d(2).apply(s), s1), xm.Xtv(M.d(2).apply(s1), s))
                rhs = _add(
                    _neg(al(3, be(4, mul(2, s, 2, s1)))),
                    mul(1, al(1, be(2, s)), 2, s1),
                    mul(1, al(1, be(2, s1)), 2, s),
                )
                yield (c, c1), _add(lhs, _neg(rhs))

    record("X property (8): X^t(m_2(s) (x) s') + X^t(m_2(s') (x) s) = -alpha_3 beta_4(s s') + alpha_1 beta_2(s) s' + alpha_1 beta_2(s') s", g8)

    def g9():
        for a in range(r1):
            for b in range(r1):
                for c in range(r1):
                    u = xm.Xtv(e(1, a), xm.X_basis(c, b))
                    v = xm.Xtv(e(1, c), xm.X_basis(a, b))
                    yield (a, b, c), _add(u, v)

    record("X property (9): X^t(t (x) X(t'' ^ t')) + X^t(t'' (x) X(t ^ t')) = 0", g9)
    return out
