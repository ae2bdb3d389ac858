"""The six-term Tate-like complex B built on the positive-degree modules of M.

Elements live in the free graded-commutative algebra on the bases of
M_1, M_2, M_3 with divided powers on the even generators.  A monomial is a
sorted tuple of factors ``(deg, idx, exp)``; the differential is the
derivation extending m, with d(g^(e)) = d(g) g^(e-1).  Degree-0 outputs of
m_1 are ring elements and become coefficients.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement
from math import comb

from ..complexes import BasedModule, build_complex
from ..exactalg import PolyMatrix

# summand name -> multiset of generator degrees, in the order used for B_i
SUMMANDS = {
    0: [("R", ())],
    1: [("M1", (1,))],
    2: [("L2M1", (1, 1)), ("M2", (2,))],
    3: [("L3M1", (1, 1, 1)), ("M1xM2", (1, 2)), ("M3", (3,))],
    4: [("L2M1xM2", (1, 1, 2)), ("D2M2", (2, 2)), ("M1xM3", (1, 3))],
    5: [("M1xD2M2", (1, 2, 2)), ("L2M1xM3", (1, 1, 3))],
}


def _monomials(shape, ranks):
    """Monomials with the given degree multiset, lexicographic on index tuples."""
    by_deg = {}
    for d in shape:
        by_deg[d] = by_deg.get(d, 0) + 1
    parts = []
    for d in sorted(by_deg):
        k = by_deg[d]
        if d % 2:
            choices = list(combinations(range(ranks[d]), k))
        else:
            choices = list(combinations_with_replacement(range(ranks[d]), k))
        parts.append((d, choices))
    out = [()]
    for d, choices in parts:
        out = [m + (d, c) for m in out for c in choices]
    result = []
    for m in out:
        factors = []
        for q in range(0, len(m), 2):
            d, idxs = m[q], m[q + 1]
            counts = {}
            for i in idxs:
                counts[i] = counts.get(i, 0) + 1
            factors.extend((d, i, e) for i, e in sorted(counts.items()))
        result.append(tuple(factors))
    return result


def _index_tuple(mono):
    """Readable label: per degree, the (weakly) increasing index tuple."""
    out = {}
    for d, i, e in mono:
        out.setdefault(d, []).extend([i] * e)
    return tuple(tuple(out[d]) for d in sorted(out))


def mono_mul(a, b):
    """(coefficient, monomial) for a*b, coefficient 0 when the product vanishes."""
    seq = list(a) + list(b)
    # sign of sorting, counting transpositions of odd factors only
    sign = 1
    arr = list(seq)
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1][:2] > arr[j][:2]:
            if arr[j - 1][0] % 2 and arr[j][0] % 2:
                sign = -sign
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            j -= 1
    merged = []
    coeff = sign
    for f in arr:
        if merged and merged[-1][:2] == f[:2]:
            d, i, e = merged[-1]
            if d % 2:
                return 0, None
            coeff *= comb(e + f[2], e)
            merged[-1] = (d, i, e + f[2])
        else:
            merged.append(f)
    return coeff, tuple(merged)


class TateComplexB:
    def __init__(self, M):
        self.M = M
        self.ring = ring = M.ring
        ranks = {d: M.rank(d) for d in (1, 2, 3)}
        self.monos = {}
        self.labels = {}
        self.summand_of = {}
        self.summand_slices = {}
        for i, summands in SUMMANDS.items():
            ms, labs = [], []
            for name, shape in summands:
                start = len(ms)
                for m in _monomials(shape, ranks):
                    ms.append(m)
                    labs.append((name, _index_tuple(m)))
                self.summand_slices[(i, name)] = range(start, len(ms))
            self.monos[i] = ms
            self.labels[i] = labs
        self.where = {i: {m: k for k, m in enumerate(ms)} for i, ms in self.monos.items()}
        mats = [self._diff_matrix(i) for i in range(1, 6)]
        modules = [BasedModule(tuple(self.labels[i]), i) for i in range(6)]
        self.complex = build_complex(mats, ring, modules)

    def rank(self, i):
        return len(self.monos.get(i, ()))

    def d(self, i):
        return self.complex.d(i)

    def _gen_diff(self, d, idx):
        """m applied to a generator: a list of (coefficient Poly, monomial)."""
        col = self.M.d(d).column(idx)
        if d == 1:
            return [(col[0], ())] if col[0] else []
        return [(c, ((d - 1, k, 1),)) for k, c in enumerate(col) if c]

    def diff_mono(self, mono):
        """d(mono) as {monomial: Poly}."""
        out = {}
        deg_before = 0
        for pos, (d, i, e) in enumerate(mono):
            prefix = mono[:pos]
            rest = list(mono[pos + 1 :])
            if e > 1:
                rest = [(d, i, e - 1)] + rest
            suffix = tuple(sorted(rest, key=lambda f: f[:2]))
            s = -1 if deg_before % 2 else 1
            for c, g in self._gen_diff(d, i):
                c1, m1 = mono_mul(prefix, g)
                if not c1:
                    continue
                c2, m2 = mono_mul(m1, suffix)
                if not c2:
                    continue
                coeff = c.scale(s * c1 * c2)
                acc = out.get(m2)
                out[m2] = coeff if acc is None else acc + coeff
            deg_before += d * e
        return {m: c for m, c in out.items() if c}

    def _diff_matrix(self, i):
        mat = PolyMatrix(self.ring, self.rank(i - 1), self.rank(i))
        tgt = self.where[i - 1]
        for col, mono in enumerate(self.monos[i]):
            for m, c in self.diff_mono(mono).items():
                if m not in tgt:
                    raise ValueError(f"d leaves B: {mono} -> {m}")
                mat.entries[tgt[m]][col] = c
        return mat

    def columns(self, i, name):
        return self.summand_slices[(i, name)]

    def vector(self, i, terms):
        """Coordinates of sum c * mono over the basis of B_i."""
        v = [self.ring.zero()] * self.rank(i)
        for c, mono in terms:
            k = self.where[i][mono]
            v[k] = v[k] + c
        return v

    def product_vector(self, i, factors):
        """Coordinates in B_i of the product of vectors in M_1, M_2, M_3 (given as (deg, vec))."""
        acc = {(): self.ring.one()}
        for d, vec in factors:
            nxt = {}
            for m, c in acc.items():
                for k, a in enumerate(vec):
                    if not a:
                        continue
                    q, mm = mono_mul(m, ((d, k, 1),))
                    if not q:
                        continue
                    val = (c * a).scale(q)
                    prev = nxt.get(mm)
                    nxt[mm] = val if prev is None else prev + val
            acc = {m: c for m, c in nxt.items() if c}
        return self.vector(i, [(c, m) for m, c in acc.items()])

    def divided_square_vector(self, vec):
        """Coordinates in B_4 of the divided square of an element of M_2."""
        terms = []
        nz = [(k, a) for k, a in enumerate(vec) if a]
        for k, a in nz:
            terms.append((a * a, ((2, k, 2),)))
        for (k, a), (l, b) in combinations(nz, 2):
            terms.append((a * b, ((2, k, 1), (2, l, 1))))
        return self.vector(4, terms)


def build_tate_B(M):
    return TateComplexB(M)
