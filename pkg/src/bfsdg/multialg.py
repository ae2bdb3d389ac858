"""DG algebras with divided squares: storage, constructors and the axiom verifier.

Products are stored sparsely: ``products[(i, j)][(s, t)]`` is the coordinate
vector of b_s * b_t in degree i + j, for 1 <= i <= j and i + j <= n.  The
reversed order comes from graded commutativity.  Divided squares are stored
on basis elements of even degree e with 2e <= n; the value on a general
element is assembled by the polarization rule.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement, product

from .complexes import BasedModule, ChainComplex, build_complex
from .exactalg import NotUnimodular, PolyMatrix, det, unimodular_inverse
from .report import Check


class DualityFailure(ArithmeticError):
    pass


def _zero_vec(ring, n):
    z = ring.zero()
    return [z] * n


def _add_into(acc, vec, c=None):
    for k, v in enumerate(vec):
        if v:
            acc[k] = acc[k] + (v if c is None else c * v)


class DgAlgebra:
    def __init__(self, complex_, products, divided, orientation, name="A"):
        self.complex = complex_
        self.ring = complex_.ring
        self.n = complex_.n
        self.products = {k: dict(v) for k, v in products.items()}
        self.divided = dict(divided)
        self.orientation = orientation
        self.name = name

    # -- shape ---------------------------------------------------------
    def rank(self, i):
        return self.complex.rank(i)

    def labels(self, i):
        return self.complex.modules[i].labels

    def d(self, i):
        return self.complex.d(i)

    def basis(self, i, s):
        v = _zero_vec(self.ring, self.rank(i))
        v[s] = self.ring.one()
        return v

    def zero(self, i):
        return _zero_vec(self.ring, self.rank(i))

    # -- products ------------------------------------------------------
    def mul_basis(self, i, s, j, t):
        """b_s * b_t for b_s in degree i and b_t in degree j."""
        ring = self.ring
        if i + j > self.n:
            return []
        if i == 0:
            return self.basis(j, t)
        if j == 0:
            return self.basis(i, s)
        if i <= j:
            v = self.products.get((i, j), {}).get((s, t))
            return list(v) if v is not None else self.zero(i + j)
        v = self.products.get((j, i), {}).get((t, s))
        if v is None:
            return self.zero(i + j)
        return [-x for x in v] if (i * j) % 2 else list(v)

    def mul(self, i, x, j, y):
        """Product of coordinate vectors x (degree i) and y (degree j)."""
        if i + j > self.n or i < 0 or j < 0:
            return []
        ring = self.ring
        acc = self.zero(i + j)
        for s, a in enumerate(x):
            if not a:
                continue
            for t, b in enumerate(y):
                if not b:
                    continue
                _add_into(acc, self.mul_basis(i, s, j, t), a * b)
        return acc

    def dvec(self, i, x):
        if i <= 0 or i > self.n:
            return []
        return self.d(i).apply(x)

    def gamma2_basis(self, e, s):
        m = self.divided.get(e)
        if m is None:
            return self.zero(2 * e)
        v = m.get(s)
        return list(v) if v is not None else self.zero(2 * e)

    def gamma2(self, e, x):
        """Divided square of a general element of even degree e."""
        acc = self.zero(2 * e)
        nz = [(s, a) for s, a in enumerate(x) if a]
        for s, a in nz:
            _add_into(acc, self.gamma2_basis(e, s), a * a)
        for (s, a), (t, b) in combinations(nz, 2):
            _add_into(acc, self.mul_basis(e, s, e, t), a * b)
        return acc

    def bracket(self, x):
        """Orientation applied to a top-degree vector."""
        return self.orientation.apply(x)[0]

    # -- matrices --------------------------------------------------------
    def left_mult_matrix(self, i, x, j):
        """Matrix of y |-> x * y from degree j to degree i + j."""
        cols = [self.mul(i, x, j, self.basis(j, t)) for t in range(self.rank(j))]
        return PolyMatrix.from_columns(self.ring, cols, self.rank(i + j))

    def product_matrix(self, i, j):
        """rank(i+j) x (rank i * rank j), column s*rank(j)+t holding b_s b_t."""
        cols = [
            self.mul_basis(i, s, j, t) for s in range(self.rank(i)) for t in range(self.rank(j))
        ]
        return PolyMatrix.from_columns(self.ring, cols, self.rank(i + j))

    def change_ring(self, ring):
        conv = lambda v: [a.change_ring(ring) for a in v]
        return DgAlgebra(
            self.complex.change_ring(ring),
            {k: {st: conv(v) for st, v in tab.items()} for k, tab in self.products.items()},
            {e: {s: conv(v) for s, v in tab.items()} for e, tab in self.divided.items()},
            self.orientation.change_ring(ring),
            self.name,
        )


# --- pairings --------------------------------------------------------------


def pairing_matrix(A, i):
    """[orientation(b_s * b'_t)] for b_s in degree i, b'_t in degree n - i."""
    n = A.n
    rows = []
    for s in range(A.rank(i)):
        rows.append([A.bracket(A.mul_basis(i, s, n - i, t)) for t in range(A.rank(n - i))])
    return PolyMatrix(A.ring, A.rank(i), A.rank(n - i), rows)


def pairing_check(A, i):
    P = pairing_matrix(A, i)
    name = f"{A.name}: pairing in degrees {i} and {A.n - i} is perfect"
    if P.rows != P.cols:
        return Check(name, False, f"pairing matrix is {P.rows}x{P.cols}"), P
    try:
        unimodular_inverse(P)
    except NotUnimodular:
        return Check(name, False, f"determinant {det(P)} is not a unit"), P
    return Check(name, True, f"det = {det(P)}"), P


def inverse_pairing(A, i):
    """Inverse of the degree-i pairing matrix, or DualityFailure."""
    P = pairing_matrix(A, i)
    if P.rows != P.cols:
        raise DualityFailure(f"{A.name}: ranks {A.rank(i)} and {A.rank(A.n - i)} differ")
    try:
        return unimodular_inverse(P)
    except NotUnimodular as exc:
        raise DualityFailure(f"{A.name}: pairing in degree {i} is not perfect ({exc})") from exc


# --- composite bases -------------------------------------------------------


def composite_basis(kind, rank, a=2, other_rank=None):
    """Labels of Lambda^a, D_a (sorted index tuples) or a tensor product (pairs)."""
    if kind == "wedge":
        return BasedModule(tuple(combinations(range(rank), a)))
    if kind == "divided":
        return BasedModule(tuple(combinations_with_replacement(range(rank), a)))
    if kind == "tensor":
        return BasedModule(tuple(product(range(rank), range(other_rank))))
    raise ValueError(f"unknown composite kind {kind!r}")


def comultiplication(kind, rank, a, ring):
    """Delta: N_a -> F (x) N_{a-1}; row index k * rank(N_{a-1}) + position."""
    src = composite_basis(kind, rank, a).labels
    tgt = composite_basis(kind, rank, a - 1).labels
    where = {lab: k for k, lab in enumerate(tgt)}
    M = PolyMatrix(ring, rank * len(tgt), len(src))
    one = ring.one()
    for col, lab in enumerate(src):
        if kind == "wedge":
            for pos, k in enumerate(lab):
                rest = lab[:pos] + lab[pos + 1 :]
                M.entries[k * len(tgt) + where[rest]][col] = one if pos % 2 == 0 else -one
        else:
            for k in sorted(set(lab)):
                rest = list(lab)
                rest.remove(k)
                M.entries[k * len(tgt) + where[tuple(rest)]][col] = one
    return M


def divided_square_coords(coeffs, ring):
    """(sum c_k b_k)^(2) in the basis of D_2, ordered as composite_basis('divided')."""
    labels = composite_basis("divided", len(coeffs), 2).labels
    out = []
    for k, l in labels:
        c = coeffs[k]
        out.append(c * c if k == l else c * coeffs[l])
    return [ring(x) if not hasattr(x, "ring") else x for x in out]


# --- constructors ----------------------------------------------------------


def _wedge_sign(S, T):
    """Sign of e_S ^ e_T relative to e_{S u T}, or 0 if they overlap."""
    if set(S) & set(T):
        return 0
    inv = sum(1 for s in S for t in T if s > t)
    return -1 if inv % 2 else 1


def koszul_algebra(seq, name="K"):
    """Exterior algebra on len(seq) generators with d(e_k) = seq[k]."""
    if not seq:
        raise ValueError("Koszul algebra of an empty sequence")
    ring = seq[0].ring
    n = len(seq)
    labels = [tuple(combinations(range(n), i)) for i in range(n + 1)]
    where = [{lab: k for k, lab in enumerate(L)} for L in labels]
    mats = []
    for i in range(1, n + 1):
        m = PolyMatrix(ring, len(labels[i - 1]), len(labels[i]))
        for col, S in enumerate(labels[i]):
            for pos, k in enumerate(S):
                rest = S[:pos] + S[pos + 1 :]
                m.entries[where[i - 1][rest]][col] = seq[k] if pos % 2 == 0 else -seq[k]
        mats.append(m)
    modules = [BasedModule(labels[i], i) for i in range(n + 1)]
    C = build_complex(mats, ring, modules)
    products = {}
    one = ring.one()
    for i in range(1, n + 1):
        for j in range(i, n + 1 - i):
            tab = {}
            for s, S in enumerate(labels[i]):
                for t, T in enumerate(labels[j]):
                    sg = _wedge_sign(S, T)
                    if sg:
                        v = _zero_vec(ring, len(labels[i + j]))
                        v[where[i + j][tuple(sorted(S + T))]] = one if sg > 0 else -one
                        tab[(s, t)] = v
            products[(i, j)] = tab
    # basis monomials of even degree are decomposable, so their squares vanish
    divided = {e: {} for e in range(2, n // 2 + 1, 2)}
    orientation = PolyMatrix(ring, 1, 1, [[one]])
    return DgAlgebra(C, products, divided, orientation, name)


def tensor_dga(A, B, name=None):
    """A (x) B with the Koszul sign rule; basis of degree k ordered by (deg in A, s, t)."""
    ring = A.ring
    if B.ring != ring:
        raise ValueError("tensor factors live in different rings")
    n = A.n + B.n
    labels, where = [], []
    for k in range(n + 1):
        L = [
            (i, s, t)
            for i in range(max(0, k - B.n), min(A.n, k) + 1)
            for s in range(A.rank(i))
            for t in range(B.rank(k - i))
        ]
        labels.append(tuple(L))
        where.append({lab: q for q, lab in enumerate(L)})

    def embed(k, i, va, vb):
        """Coordinates of va (x) vb, va in A_i and vb in B_{k-i}."""
        out = _zero_vec(ring, len(labels[k]))
        for s, a in enumerate(va):
            if a:
                for t, b in enumerate(vb):
                    if b:
                        q = where[k][(i, s, t)]
                        out[q] = out[q] + a * b
        return out

    mats = []
    for k in range(1, n + 1):
        cols = []
        for i, s, t in labels[k]:
            j = k - i
            col = _zero_vec(ring, len(labels[k - 1]))
            if i >= 1:
                _add_into(col, embed(k - 1, i - 1, A.dvec(i, A.basis(i, s)), B.basis(j, t)))
            if j >= 1:
                v = embed(k - 1, i, A.basis(i, s), B.dvec(j, B.basis(j, t)))
                _add_into(col, v if i % 2 == 0 else [-x for x in v])
            cols.append(col)
        mats.append(PolyMatrix.from_columns(ring, cols, len(labels[k - 1])))
    modules = [BasedModule(labels[k], k) for k in range(n + 1)]
    C = build_complex(mats, ring, modules)

    def mul_labels(k1, l1, k2, l2):
        (i1, s1, t1), (i2, s2, t2) = l1, l2
        j1, j2 = k1 - i1, k2 - i2
        if i1 + i2 > A.n or j1 + j2 > B.n:
            return None
        va = A.mul_basis(i1, s1, i2, s2)
        vb = B.mul_basis(j1, t1, j2, t2)
        v = embed(k1 + k2, i1 + i2, va, vb)
        return [-x for x in v] if (j1 * i2) % 2 else v

    products = {}
    for k1 in range(1, n + 1):
        for k2 in range(k1, n + 1 - k1):
            tab = {}
            for s, l1 in enumerate(labels[k1]):
                for t, l2 in enumerate(labels[k2]):
                    v = mul_labels(k1, l1, k2, l2)
                    if v is not None and any(v):
                        tab[(s, t)] = v
            products[(k1, k2)] = tab

    divided = {}
    for e in range(2, n // 2 + 1, 2):
        tab = {}
        for s, (i, a, b) in enumerate(labels[e]):
            j = e - i
            if i % 2:
                continue  # product of two odd elements
            if j == 0:
                v = embed(2 * e, 2 * i, A.gamma2_basis(i, a), B.basis(0, 0))
            elif i == 0:
                v = embed(2 * e, 0, A.basis(0, 0), B.gamma2_basis(j, b))
            else:
                v = embed(2 * e, 2 * i, A.gamma2_basis(i, a), B.gamma2_basis(j, b))
                v = [x + x for x in v]
            if any(v):
                tab[s] = v
        divided[e] = tab

    top = labels[n]
    orient = [A.orientation.entries[0][s] * B.orientation.entries[0][t] for _, s, t in top]
    orientation = PolyMatrix(ring, 1, len(top), [orient])
    return DgAlgebra(C, products, divided, orientation, name or f"{A.name}*{B.name}")


def change_basis(A, g, name=None):
    """Transport the structure along new bases: column s of g[i] is new b_s in old coordinates."""
    ring = A.ring
    ginv = {i: unimodular_inverse(g[i]) for i in g}
    mats = [ginv[i - 1] @ A.d(i) @ g[i] for i in range(1, A.n + 1)]
    C = build_complex(mats, ring, A.complex.modules)
    cols = {i: [g[i].column(s) for s in range(A.rank(i))] for i in g}
    products = {}
    for (i, j), _ in A.products.items():
        tab = {}
        for s in range(A.rank(i)):
            for t in range(A.rank(j)):
                v = ginv[i + j].apply(A.mul(i, cols[i][s], j, cols[j][t]))
                if any(v):
                    tab[(s, t)] = v
        products[(i, j)] = tab
    divided = {}
    for e in A.divided:
        tab = {}
        for s in range(A.rank(e)):
            v = ginv[2 * e].apply(A.gamma2(e, cols[e][s]))
            if any(v):
                tab[s] = v
        divided[e] = tab
    orientation = A.orientation @ g[A.n]
    return DgAlgebra(C, products, divided, orientation, name or A.name)


# --- the verifier ----------------------------------------------------------


def _lab(A, i, s):
    return f"{i}:{A.labels(i)[s]}"


def _first(vec):
    for k, v in enumerate(vec):
        if v:
            return k, v
    return None


def _neg(v):
    return [-x for x in v]


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _add(a, b):
    return [x + y for x, y in zip(a, b)]


def verify_dga(A, divided=True, pairings=True):
    """Every axiom family checked on basis elements; one Check per family."""
    n = A.n
    checks = []
    nm = A.name

    def record(name, wit):
        checks.append(Check(f"{nm}: {name}", wit is None, wit))

    # d^2 = 0
    wit = None
    for i, comp in A.complex.composites():
        nz = comp.nonzero_entries()
        if nz:
            r, c, v = nz[0]
            wit = f"d_{i - 1} d_{i} entry ({r},{c}) = {v}"
            break
    record("d o d = 0", wit)

    # unit
    wit = None
    if A.rank(0) != 1:
        wit = f"degree 0 has rank {A.rank(0)}"
    record("degree 0 is free of rank 1 on the unit", wit)

    # Leibniz
    for i in range(1, n + 1):
        for j in range(1, n + 2 - i):
            wit = None
            for s in range(A.rank(i)):
                for t in range(A.rank(j)):
                    x, y = A.basis(i, s), A.basis(j, t)
                    lhs = A.dvec(i + j, A.mul(i, x, j, y)) if i + j <= n else []
                    r1 = A.mul(i - 1, A.dvec(i, x), j, y)
                    r2 = A.mul(i, x, j - 1, A.dvec(j, y))
                    rhs = _add(r1, r2 if i % 2 == 0 else _neg(r2)) if r1 else []
                    diff = _sub(lhs, rhs) if lhs else rhs
                    f = _first(diff)
                    if f:
                        wit = f"basis pair ({_lab(A, i, s)}, {_lab(A, j, t)}): component {f[0]} = {f[1]}"
                        break
                if wit:
                    break
            record(f"Leibniz rule in degrees ({i},{j})", wit)

    # graded commutativity on stored square blocks, odd squares
    for i in range(1, n // 2 + 1):
        wit = None
        tab = A.products.get((i, i), {})
        sign = -1 if i % 2 else 1
        for s in range(A.rank(i)):
            for t in range(s, A.rank(i)):
                a = tab.get((s, t)) or A.zero(2 * i)
                b = tab.get((t, s)) or A.zero(2 * i)
                diff = _sub(a, b if sign > 0 else _neg(b))
                f = _first(diff)
                if f:
                    wit = f"basis pair ({_lab(A, i, s)}, {_lab(A, i, t)}): component {f[0]} = {f[1]}"
                    break
            if wit:
                break
        record(f"graded commutativity in degrees ({i},{i})", wit)
        if i % 2:
            wit = None
            for s in range(A.rank(i)):
                f = _first(tab.get((s, s)) or [])
                if f:
                    wit = f"square of {_lab(A, i, s)}: component {f[0]} = {f[1]}"
                    break
            record(f"odd squares vanish in degree {i}", wit)

    # associativity
    for i in range(1, n + 1):
        for j in range(1, n + 1 - i):
            for k in range(1, n + 1 - i - j):
                wit = None
                for s in range(A.rank(i)):
                    x = A.basis(i, s)
                    for t in range(A.rank(j)):
                        xy = A.mul(i, x, j, A.basis(j, t))
                        for u in range(A.rank(k)):
                            z = A.basis(k, u)
                            lhs = A.mul(i + j, xy, k, z)
                            rhs = A.mul(i, x, j + k, A.mul(j, A.basis(j, t), k, z))
                            f = _first(_sub(lhs, rhs))
                            if f:
                                wit = (
                                    f"basis triple ({_lab(A, i, s)}, {_lab(A, j, t)}, "
                                    f"{_lab(A, k, u)}): component {f[0]} = {f[1]}"
                                )
                                break
                        if wit:
                            break
                    if wit:
                        break
                record(f"associativity in degrees ({i},{j},{k})", wit)

    if divided:
        for e in range(2, n // 2 + 1, 2):
            wit1 = wit2 = None
            for s in range(A.rank(e)):
                x = A.basis(e, s)
                g = A.gamma2_basis(e, s)
                if wit1 is None:
                    lhs = A.dvec(2 * e, g)
                    rhs = A.mul(e - 1, A.dvec(e, x), e, x)
                    f = _first(_sub(lhs, rhs))
                    if f:
                        wit1 = f"divided square of {_lab(A, e, s)}: component {f[0]} = {f[1]}"
                if wit2 is None:
                    f = _first(_sub(_add(g, g), A.mul(e, x, e, x)))
                    if f:
                        wit2 = f"divided square of {_lab(A, e, s)}: component {f[0]} = {f[1]}"
            record(f"d(x^(2)) = d(x) x in degree {e}", wit1)
            record(f"2 x^(2) = x x in degree {e}", wit2)

    if pairings:
        if A.rank(n) != 1:
            record("top module has rank 1", f"rank {A.rank(n)}")
        for i in range(0, n + 1):
            c, _ = pairing_check(A, i)
            checks.append(c)
    return checks
