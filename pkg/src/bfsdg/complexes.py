"""Based free modules, chain complexes, chain maps and homotopies.

A map of degree ``shift`` sends C_i to D_{i+shift}.  Its commutation rule is
``d^D o phi_i = eps(i) * phi_{i-1} o d^C_i`` with the sign function stored on
the map itself, so every caller states the convention it relies on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .exactalg import DEFAULT_PRIME, DimensionMismatch, PolyMatrix, rank
from .report import Check


class NotAComplex(ValueError):
    def __init__(self, index, witness=None):
        super().__init__(f"d_{index - 1} o d_{index} is not zero" + (f" ({witness})" if witness else ""))
        self.index = index
        self.witness = witness


@dataclass(frozen=True)
class BasedModule:
    """Free module with structured basis labels (tuples, atoms, ...)."""

    labels: tuple
    degree: int = 0

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    @property
    def rank(self):
        return len(self.labels)

    def index(self, label):
        return self.labels.index(label)


class ChainComplex:
    """Modules 0..n and differentials d_i: C_i -> C_{i-1} for 1 <= i <= n."""

    def __init__(self, ring, ranks, diffs, modules=None):
        self.ring = ring
        self.ranks = list(ranks)
        self.n = len(self.ranks) - 1
        self._d = dict(diffs)
        for i in range(1, self.n + 1):
            m = self._d.get(i)
            if m is None:
                self._d[i] = PolyMatrix(ring, self.ranks[i - 1], self.ranks[i])
            elif (m.rows, m.cols) != (self.ranks[i - 1], self.ranks[i]):
                raise DimensionMismatch(
                    f"d_{i} is {m.rows}x{m.cols}, expected {self.ranks[i - 1]}x{self.ranks[i]}"
                )
        self.modules = modules or [
            BasedModule(tuple(range(r)), i) for i, r in enumerate(self.ranks)
        ]

    def rank(self, i):
        return self.ranks[i] if 0 <= i <= self.n else 0

    def d(self, i):
        """d_i, with zero matrices outside 1..n."""
        if 1 <= i <= self.n:
            return self._d[i]
        return PolyMatrix(self.ring, self.rank(i - 1), self.rank(i))

    def composites(self):
        """[(i, d_{i-1} d_i)] for 2 <= i <= n."""
        return [(i, self.d(i - 1) @ self.d(i)) for i in range(2, self.n + 1)]

    def change_ring(self, ring):
        return ChainComplex(
            ring, self.ranks, {i: m.change_ring(ring) for i, m in self._d.items()}, self.modules
        )


def build_complex(mats, ring=None, modules=None):
    """Chain complex from [d_1, d_2, ...]; rejects if some d_{i-1} d_i != 0."""
    if not mats:
        raise ValueError("at least one differential is required")
    ring = ring or mats[0].ring
    ranks = [mats[0].rows] + [m.cols for m in mats]
    for i in range(1, len(mats)):
        if mats[i].rows != mats[i - 1].cols:
            raise DimensionMismatch(f"d_{i + 1} has {mats[i].rows} rows, d_{i} has {mats[i - 1].cols} columns")
    C = ChainComplex(ring, ranks, {i + 1: m for i, m in enumerate(mats)}, modules)
    for i, comp in C.composites():
        nz = comp.nonzero_entries()
        if nz:
            r, c, v = nz[0]
            raise NotAComplex(i, f"entry ({r},{c}) = {v}")
    return C


@dataclass
class ChainMap:
    """phi_i: C_i -> D_{i+shift}; ``eps`` maps i to the commutation sign."""

    source: ChainComplex
    target: ChainComplex
    shift: int
    comps: dict
    eps: dict = field(default_factory=dict)
    name: str = "phi"

    def __getitem__(self, i):
        m = self.comps.get(i)
        if m is None:
            return PolyMatrix(self.source.ring, self.target.rank(i + self.shift), self.source.rank(i))
        return m

    def sign(self, i):
        return self.eps.get(i, 1)

    def residual(self, i, sign=None):
        s = self.sign(i) if sign is None else sign
        lhs = self.target.d(i + self.shift) @ self[i]
        rhs = self[i - 1] @ self.source.d(i)
        return lhs - rhs.scale(s)


def _witness(mat):
    nz = mat.nonzero_entries()
    if not nz:
        return None
    r, c, v = nz[0]
    return f"entry ({r},{c}) = {v}"


def verify_chain_map(phi, degrees=None):
    """One check per degree: d o phi_i - eps(i) phi_{i-1} o d == 0."""
    if degrees is None:
        degrees = range(0, phi.source.n + 1)
    checks = []
    for i in degrees:
        w = _witness(phi.residual(i))
        checks.append(Check(f"{phi.name}: chain map in degree {i}", w is None, w))
    return checks


def measure_sign(phi, i):
    """The sign in {+1, -1} that makes degree i commute, +1 if both do, None if neither."""
    for s in (1, -1):
        if phi.residual(i, s).is_zero():
            return s
    return None


@dataclass
class Homotopy:
    """h_i: B_i -> A_{i + shift}, with the identity it was built to satisfy."""

    comps: dict
    shift: int
    identity: str = "c = d h + h d"

    def __getitem__(self, i):
        return self.comps[i]


def _rank_mod_p(rows, p):
    rows = [list(r) for r in rows]
    rk = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = pow(rows[rk][c], -1, p)
        for i in range(len(rows)):
            if i != rk and rows[i][c] % p:
                f = rows[i][c] * inv % p
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def rank_condition_check(C, seed=0, p=DEFAULT_PRIME):
    """rank d_i + rank d_{i+1} == rank C_i for i >= 1, plus a mod-p point cross-check."""
    ranks = {i: rank(C.d(i)) for i in range(1, C.n + 2)}
    rng = random.Random(seed)
    point = [rng.randrange(1, p) for _ in C.ring.variables]
    checks = []
    for i in range(1, C.n + 1):
        want = C.rank(i)
        got = ranks[i] + ranks[i + 1]
        checks.append(
            Check(
                f"rank condition in degree {i}",
                got == want,
                None if got == want else f"rank d_{i} + rank d_{i + 1} = {got}, module rank {want}",
            )
        )
    for i in range(1, C.n + 1):
        m = C.d(i)
        rp = _rank_mod_p(m.evaluate(point, p), p) if m.rows and m.cols else 0
        ok = rp <= ranks[i]
        checks.append(
            Check(
                f"rank of d_{i} at a random point mod {p} does not exceed the exact rank",
                ok,
                None if ok else f"{rp} > {ranks[i]}",
            )
        )
    return checks
