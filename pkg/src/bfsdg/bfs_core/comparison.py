"""The comparison map alpha: K -> M and the duality map beta: M -> K of degree -1."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..complexes import ChainMap, measure_sign, verify_chain_map
from ..exactalg import NotUnimodular, PolyMatrix, unimodular_inverse
from ..multialg import DualityFailure, inverse_pairing, koszul_algebra
from ..report import Check, first_nonzero


class SplittingMismatch(ValueError):
    pass


@dataclass
class ComparisonData:
    M: object
    K: object
    sequence: list
    splitting: tuple
    alpha: ChainMap = None
    beta: ChainMap = None
    omega: list = None
    checks: list = field(default_factory=list)

    @property
    def ring(self):
        return self.M.ring

    def a(self, i):
        return self.alpha[i]

    def b(self, i):
        return self.beta[i]


def build_alpha(M, sequence, splitting, K=None):
    """alpha_1 includes K_1 onto the splitting columns; higher alpha_i are products."""
    ring = M.ring
    if M.n != 4:
        raise ValueError(f"M has length {M.n}, expected 4")
    if len(splitting) != 3 or len(set(splitting)) != 3:
        raise SplittingMismatch("the splitting must name three distinct basis elements of M_1")
    if any(not 0 <= s < M.rank(1) for s in splitting):
        raise SplittingMismatch(f"splitting index out of range 0..{M.rank(1) - 1}")
    K = K or koszul_algebra(list(sequence), name="K")
    m1 = M.d(1)
    for q, s in enumerate(splitting):
        if m1[0, s] != sequence[q]:
            raise SplittingMismatch(
                f"m_1 on splitting element {s} is {m1[0, s]}, expected {sequence[q]}"
            )
    one = ring.one()
    a1 = PolyMatrix(ring, M.rank(1), 3)
    for q, s in enumerate(splitting):
        a1.entries[s][q] = one
    comps = {0: PolyMatrix.identity(ring, 1), 1: a1}
    for i in (2, 3):
        cols = []
        for S in K.labels(i):
            v = a1.column(S[0])
            for deg, k in enumerate(S[1:], start=1):
                v = M.mul(deg, v, 1, a1.column(k))
            cols.append(v)
        comps[i] = PolyMatrix.from_columns(ring, cols, M.rank(i))
    alpha = ChainMap(K.complex, M.complex, 0, comps, {}, "alpha")
    data = ComparisonData(M, K, list(sequence), tuple(splitting), alpha=alpha)
    data.checks.extend(verify_chain_map(alpha, range(1, 4)))
    wit = None
    for i in (1, 2):
        for j in range(1, 4 - i):
            if i + j > 3:
                continue
            for s, S in enumerate(K.labels(i)):
                for t, T in enumerate(K.labels(j)):
                    lhs = comps[i + j].apply(K.mul_basis(i, s, j, t))
                    rhs = M.mul(i, comps[i].column(s), j, comps[j].column(t))
                    if lhs != rhs:
                        wit = f"alpha({S} * {T}) differs from alpha({S}) * alpha({T})"
    data.checks.append(Check("alpha is multiplicative", wit is None, wit))
    return data


def build_beta(data):
    """Solve [beta_i(theta) phi]_K = (-1)^(i+1) [theta alpha_{4-i}(phi)]_M for i = 1..4."""
    M, K = data.M, data.K
    ring = M.ring
    comps = {}
    for i in range(1, 5):
        # rows of the K pairing are indexed by K_{i-1}, columns by K_{4-i}
        Pinv_T = inverse_pairing(K, i - 1).transpose()
        sign = 1 if (i + 1) % 2 == 0 else -1
        a = data.alpha[4 - i]
        cols = []
        for s in range(M.rank(i)):
            theta = M.basis(i, s)
            w = [
                M.bracket(M.mul(i, theta, 4 - i, a.column(t))).scale(sign)
                for t in range(K.rank(4 - i))
            ]
            cols.append(Pinv_T.apply(w))
        comps[i] = PolyMatrix.from_columns(ring, cols, K.rank(i - 1))
    comps[0] = PolyMatrix(ring, 0, 1)
    beta = ChainMap(M.complex, K.complex, -1, comps, {}, "beta")
    data.beta = beta

    # orientation generator of M_4
    try:
        oinv = unimodular_inverse(M.orientation)
    except NotUnimodular as exc:
        raise DualityFailure(f"orientation of M is not a unit ({exc})") from exc
    data.omega = oinv.column(0)

    checks = data.checks
    # the defining identity, re-evaluated
    wit = None
    for i in range(1, 5):
        sign = 1 if i % 2 else -1
        for s in range(M.rank(i)):
            bt = comps[i].column(s)
            for t in range(K.rank(4 - i)):
                lhs = K.bracket(K.mul(i - 1, bt, 4 - i, K.basis(4 - i, t)))
                rhs = M.bracket(M.mul(i, M.basis(i, s), 4 - i, data.alpha[4 - i].column(t)))
                if lhs != rhs.scale(sign):
                    wit = f"degree {i}, basis pair ({s}, {t})"
    checks.append(Check("beta satisfies its defining pairing identity", wit is None, wit))
    for i in range(1, 4):
        w = first_nonzero(comps[i] @ data.alpha[i])
        checks.append(Check(f"beta_{i} o alpha_{i} = 0", w is None, w))
    w = None
    try:
        unimodular_inverse(comps[4])
    except NotUnimodular as exc:
        w = str(exc)
    checks.append(Check("beta_4 is an isomorphism", w is None, w))

    # commutation sign of beta, measured per degree
    for i in range(2, 5):
        s = measure_sign(beta, i)
        beta.eps[i] = s if s is not None else 1
        checks.append(
            Check(
                f"beta commutes with the differentials in degree {i} (measured sign {s})",
                s is not None,
                None if s is not None else "neither sign works",
            )
        )
    beta.eps[1] = 1

    # adjoint identities, sign measured as well
    data.adjoint_signs = {}
    for i in range(1, 4):
        for j in range(1, 5 - i):
            found = None
            for sg in (1, -1):
                ok = True
                for p in range(K.rank(i)):
                    ap = data.alpha[i].column(p)
                    for s in range(M.rank(j)):
                        lhs = comps[i + j].apply(M.mul(i, ap, j, M.basis(j, s)))
                        rhs = K.mul(i, K.basis(i, p), j - 1, comps[j].column(s))
                        if lhs != [x.scale(sg) for x in rhs]:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    found = sg
                    break
            data.adjoint_signs[(i, j)] = found
            checks.append(
                Check(
                    f"beta(alpha(phi_{i}) theta_{j}) = phi beta(theta) (measured sign {found})",
                    found is not None,
                    None if found is not None else "no sign fits",
                )
            )
    return data
