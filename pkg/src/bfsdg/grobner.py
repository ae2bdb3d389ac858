"""Buchberger's algorithm for submodules of R^n, with division and lifting.

Module elements are handled internally as sparse dicts ``{(pos, exp): coeff}``.
The order is position-over-term: a smaller position wins, ties are broken by
grevlex on the monomial.  Every basis element carries its expression in the
original generators, so lifting through a matrix is just division plus
bookkeeping.
"""

from __future__ import annotations

from .exactalg import DimensionMismatch, Poly, PolyMatrix, grevlex_key


class NotInImage(ArithmeticError):
    pass


def _key(t):
    pos, exp = t
    return (-pos, grevlex_key(exp))


def _to_sparse(vec):
    out = {}
    for pos, p in enumerate(vec):
        for e, c in p.terms.items():
            out[(pos, e)] = c
    return out


def _to_dense(sv, ring, rank):
    buckets = [dict() for _ in range(rank)]
    for (pos, e), c in sv.items():
        buckets[pos][e] = c
    return [Poly(ring, b) for b in buckets]


def _lead(sv):
    t = max(sv, key=_key)
    return t, sv[t]


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _axpy(sv, g, exp, c, p):
    """sv - c * x^exp * g, in place."""
    for (pos, e), v in g.items():
        t = (pos, tuple([x + y for x, y in zip(e, exp)]))
        w = sv.get(t)
        w = -c * v if w is None else w - c * v
        if p:
            w %= p
        if w:
            sv[t] = w
        else:
            sv.pop(t, None)


def _rep_axpy(rep, grep, exp, c):
    for i, q in enumerate(grep):
        if q.terms:
            rep[i] = rep[i] - q.mul_term(exp, c)


class ModuleGb:
    """Reduced Groebner basis of the submodule generated by ``generators``."""

    def __init__(self, ring, rank, generators, basis, reps):
        self.ring = ring
        self.rank = rank
        self.generators = generators
        self._sparse = basis
        self._reps = reps
        self.basis = [_to_dense(g, ring, rank) for g in basis]
        self.leads = [_lead(g)[0] for g in basis]

    @property
    def representations(self):
        """Row k: coefficients expressing basis[k] in the original generators."""
        return self._reps

    def _reduce(self, sv, ngens, full=True, track=None):
        """Divide sv by the basis; returns (remainder, quotients per basis element)."""
        p = self.ring.characteristic
        ring = self.ring
        quots = [dict() for _ in self._sparse]
        rem = {}
        sv = dict(sv)
        while sv:
            t, c = _lead(sv)
            pos, e = t
            for k, (lpos, le) in enumerate(self.leads):
                if lpos == pos and _divides(le, e):
                    g = self._sparse[k]
                    lc = g[(lpos, le)]
                    q = c * ring.inv(lc)
                    if p:
                        q %= p
                    qe = tuple(x - y for x, y in zip(e, le))
                    _axpy(sv, g, qe, q, p)
                    w = quots[k].get(qe)
                    w = q if w is None else w + q
                    if p:
                        w %= p
                    if w:
                        quots[k][qe] = w
                    else:
                        quots[k].pop(qe, None)
                    break
            else:
                if not full:
                    rem.update(sv)
                    break
                rem[t] = c
                del sv[t]
        return rem, [Poly(ring, q) for q in quots]


def _reduce_tracked(sv, rep, basis, reps, ring, full=True):
    p = ring.characteristic
    sv = dict(sv)
    rep = list(rep)
    rem = {}
    leads = [_lead(g) for g in basis]
    while sv:
        t, c = _lead(sv)
        pos, e = t
        for k, ((lpos, le), lc) in enumerate(leads):
            if lpos == pos and _divides(le, e):
                q = c * ring.inv(lc)
                if p:
                    q %= p
                qe = tuple(x - y for x, y in zip(e, le))
                _axpy(sv, basis[k], qe, q, p)
                _rep_axpy(rep, reps[k], qe, q)
                break
        else:
            if not full:
                rem.update(sv)
                return rem, rep
            rem[t] = c
            del sv[t]
    return rem, rep


def _monic(sv, rep, ring):
    _, c = _lead(sv)
    inv = ring.inv(c)
    p = ring.characteristic
    if p:
        sv = {t: v * inv % p for t, v in sv.items()}
    else:
        sv = {t: v * inv for t, v in sv.items()}
    return sv, [q.scale(inv) for q in rep]


def groebner_basis(gens, ring=None, rank=None):
    """Reduced Groebner basis of the submodule spanned by ``gens`` (lists of Poly)."""
    gens = [list(g) for g in gens]
    if ring is None:
        if not gens or not gens[0]:
            raise ValueError("ring and rank are required for an empty generator list")
        ring = gens[0][0].ring
    if rank is None:
        rank = len(gens[0]) if gens else 0
    for g in gens:
        if len(g) != rank:
            raise DimensionMismatch("generators have different ambient ranks")
        for x in g:
            if x.ring != ring:
                raise ValueError("generators live in different rings")
    n = len(gens)
    zero = ring.zero()
    basis, reps = [], []
    pairs = []

    def unit(i):
        r = [zero] * n
        r[i] = ring.one()
        return r

    def lcm_pair(i, j):
        (pi, ei), (pj, ej) = _lead(basis[i])[0], _lead(basis[j])[0]
        return tuple(max(a, b) for a, b in zip(ei, ej))

    def add(sv, rep):
        sv, rep = _monic(sv, rep, ring)
        basis.append(sv)
        reps.append(rep)
        k = len(basis) - 1
        pk = _lead(sv)[0][0]
        for i in range(k):
            if _lead(basis[i])[0][0] == pk:
                pairs.append((i, k))

    for i, g in enumerate(gens):
        sv = _to_sparse(g)
        if not sv:
            continue
        rem, rep = _reduce_tracked(sv, unit(i), basis, reps, ring, full=False)
        if rem:
            add(rem, rep)

    done = set()
    p = ring.characteristic
    while pairs:
        pairs.sort(key=lambda ij: (sum(lcm_pair(*ij)), ij))
        i, j = pairs.pop(0)
        done.add((i, j))
        (pos, ei), ci = _lead(basis[i])
        (_, ej), cj = _lead(basis[j])
        lcm = tuple(max(a, b) for a, b in zip(ei, ej))
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            (pk, ek), _ = _lead(basis[k])
            if pk == pos and _divides(ek, lcm):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a not in pairs and b not in pairs:
                    skip = True
                    break
        if skip:
            continue
        si = tuple(a - b for a, b in zip(lcm, ei))
        sj = tuple(a - b for a, b in zip(lcm, ej))
        sv = {}
        _axpy(sv, basis[i], si, -ring.inv(ci) if not p else (-ring.inv(ci)) % p, p)
        _axpy(sv, basis[j], sj, ring.inv(cj), p)
        rep = [zero] * n
        _rep_axpy(rep, reps[i], si, -ring.inv(ci) if not p else (-ring.inv(ci)) % p)
        _rep_axpy(rep, reps[j], sj, ring.inv(cj))
        rem, rep = _reduce_tracked(sv, rep, basis, reps, ring, full=False)
        if rem:
            add(rem, rep)

    # minimize: leads are pairwise distinct, drop those divisible by another
    keep = []
    for k, g in enumerate(basis):
        (pk, ek), _ = _lead(g)
        if not any(
            m != k and _lead(h)[0][0] == pk and _divides(_lead(h)[0][1], ek)
            for m, h in enumerate(basis)
        ):
            keep.append(k)
    basis = [basis[k] for k in keep]
    reps = [reps[k] for k in keep]
    # interreduce
    for k in range(len(basis)):
        others = basis[:k] + basis[k + 1 :]
        oreps = reps[:k] + reps[k + 1 :]
        (lt, lc) = _lead(basis[k])
        tail = dict(basis[k])
        del tail[lt]
        rem, rep = _reduce_tracked(tail, [zero] * n, others, oreps, ring, full=True)
        rem[lt] = lc
        rep = [a + b for a, b in zip(rep, reps[k])]
        basis[k], reps[k] = _monic(rem, rep, ring)
    order = sorted(range(len(basis)), key=lambda k: _key(_lead(basis[k])[0]), reverse=True)
    basis = [basis[k] for k in order]
    reps = [reps[k] for k in order]
    return ModuleGb(ring, rank, gens, basis, reps)


def normal_form(v, G):
    """(remainder, quotients) with v == sum(q_k * G.basis[k]) + remainder."""
    if len(v) != G.rank:
        raise DimensionMismatch(f"vector of length {len(v)} in rank {G.rank}")
    rem, quots = G._reduce(_to_sparse(v), len(G.generators))
    return _to_dense(rem, G.ring, G.rank), quots


class Lifter:
    """Reusable solver for A x = b with polynomial x (Groebner basis of A's columns)."""

    def __init__(self, A):
        self.A = A
        self.gb = groebner_basis([A.column(j) for j in range(A.cols)], A.ring, A.rows)

    def lift(self, b):
        A = self.A
        ring = A.ring
        if len(b) != A.rows:
            raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.rows} rows")
        rem, quots = normal_form(b, self.gb)
        if any(rem):
            raise NotInImage("right-hand side is not in the column module")
        x = [ring.zero()] * A.cols
        for q, rep in zip(quots, self.gb.representations):
            if q.terms:
                for j, r in enumerate(rep):
                    if r.terms:
                        x[j] = x[j] + q * r
        return x


def lift(A, b):
    """Polynomial x with A x = b, or NotInImage."""
    return Lifter(A).lift(b)


def syzygies(A):
    """Generators of {s : A s = 0}, via elimination on the stacked module [A; I]."""
    ring = A.ring
    m, n = A.rows, A.cols
    one, zero = ring.one(), ring.zero()
    gens = []
    for j in range(n):
        gens.append(A.column(j) + [one if i == j else zero for i in range(n)])
    G = groebner_basis(gens, ring, m + n)
    out = []
    for g in G.basis:
        if not any(g[:m]):
            out.append(g[m:])
    return out


def column_module_equal(A, B):
    """True if the column modules of A and B coincide (mutual lifts)."""
    la, lb = Lifter(A), Lifter(B)
    try:
        for j in range(B.cols):
            la.lift(B.column(j))
        for j in range(A.cols):
            lb.lift(A.column(j))
    except NotInImage:
        return False
    return True


__all__ = [
    "ModuleGb",
    "NotInImage",
    "Lifter",
    "groebner_basis",
    "normal_form",
    "lift",
    "syzygies",
    "column_module_equal",
    "PolyMatrix",
]
