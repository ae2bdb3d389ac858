"""Example families of input algebras and the JSON instance format.

Families:
  ci         M = Koszul(x1..x4), sequence (x1, x2, x3), splitting the first three.
  tensor     M = P (x) Koszul(w) where P is the Pfaffian algebra of a generic
             5x5 skew matrix of linear forms in x, y, z.
  perturbed  an integral unimodular change of basis applied to another instance.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .complexes import BasedModule, build_complex
from .exactalg import PolyMatrix, PolyRing, is_prime, unimodular_inverse
from .grobner import groebner_basis, lift
from .multialg import DgAlgebra, change_basis, koszul_algebra, tensor_dga

FORMAT = 1


class SchemaError(ValueError):
    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


@dataclass
class InstanceSpec:
    ring: PolyRing
    M: DgAlgebra
    sequence: list
    splitting: tuple
    r: object
    options: dict = field(default_factory=dict)
    name: str = "instance"


# --- Pfaffian algebras -----------------------------------------------------


def _pf4(a):
    """Pfaffian of a 4x4 skew matrix given as a nested list."""
    return a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2]


def pfaffian_algebra(T, name="P"):
    """Length-3 Gorenstein DG algebra resolving the 4x4 Pfaffians of a 5x5 skew T.

    Products are obtained by lifting through the differentials: first b_i b_j
    through d_2, then b_i c_k through d_3.
    """
    ring = T.ring
    n = 5
    pf = []
    for i in range(n):
        keep = [k for k in range(n) if k != i]
        sub = [[T[a, b] for b in keep] for a in keep]
        pf.append(_pf4(sub) if i % 2 == 0 else -_pf4(sub))
    d1 = PolyMatrix(ring, 1, n, [pf])
    if not (d1 @ T).is_zero():
        raise ValueError("signed Pfaffians do not annihilate the skew matrix")
    d3 = d1.transpose()
    C = build_complex([d1, T, d3], ring)
    zero = ring.zero()
    e = lambda i: [ring.one() if k == i else zero for k in range(n)]

    p11 = {}
    for i in range(n):
        for j in range(i + 1, n):
            rhs = [pf[i] * x for x in e(j)]
            rhs = [a - pf[j] * b for a, b in zip(rhs, e(i))]
            v = lift(T, rhs)
            p11[(i, j)] = v
            p11[(j, i)] = [-x for x in v]
    mul11 = lambda i, j: p11.get((i, j), [zero] * n)

    p12 = {}
    for i in range(n):
        for k in range(n):
            # d(b_i c_k) = d(b_i) c_k - b_i d(c_k)
            rhs = [pf[i] * x for x in e(k)]
            col = T.column(k)
            for l in range(n):
                if col[l]:
                    rhs = [a - col[l] * b for a, b in zip(rhs, mul11(i, l))]
            p12[(i, k)] = lift(d3, rhs)
    products = {
        (1, 1): {st: v for st, v in p11.items() if any(v)},
        (1, 2): {st: v for st, v in p12.items() if any(v)},
    }
    orientation = PolyMatrix(ring, 1, 1, [[ring.one()]])
    return DgAlgebra(C, products, {}, orientation, name)


def _has_pure_powers(polys, ring):
    G = groebner_basis([[p] for p in polys], ring, 1)
    leads = [g[0].lead()[0] for g in G.basis]
    nv = 3
    for v in range(nv):
        if not any(e[v] > 0 and sum(e) == e[v] for e in leads):
            return False
    return True


def generic_skew_matrix(ring, seed, variables=("x", "y", "z")):
    """A 5x5 skew matrix of small integral linear forms with m-primary Pfaffians."""
    rng = random.Random(seed)
    gens = [ring.gen(v) for v in variables]
    for _ in range(200):
        T = PolyMatrix(ring, 5, 5)
        for i in range(5):
            for j in range(i + 1, 5):
                f = ring.zero()
                for g in gens:
                    f = f + g.scale(rng.randint(-2, 2))
                T.entries[i][j] = f
                T.entries[j][i] = -f
        pf = pfaffian_algebra(T).d(1).row(0)
        if all(p for p in pf) and _has_pure_powers(pf, ring):
            return T
    raise RuntimeError("no suitable skew matrix found")


def _coprime_pair(pf, ring):
    """Two Pfaffian positions without a common factor.

    f and g are coprime exactly when their syzygy module is generated by a
    single relation whose first entry has the degree of g.
    """
    from .grobner import syzygies

    for i in range(len(pf)):
        for j in range(i + 1, len(pf)):
            syz = syzygies(PolyMatrix(ring, 1, 2, [[pf[i], pf[j]]]))
            if len(syz) == 1 and syz[0][0].degree() == pf[j].degree():
                return i, j
    raise RuntimeError("no coprime pair of Pfaffians")


# --- generators ------------------------------------------------------------


def gen_ci(characteristic=0):
    ring = PolyRing(["x1", "x2", "x3", "x4"], characteristic)
    g = ring.gens()
    M = koszul_algebra(g, name="M")
    return InstanceSpec(ring, M, g[:3], (0, 1, 2), g[3], {"calibration": "full", "seed": 0}, "ci")


def gen_tensor(characteristic=0, seed=0, extra_variables=(), r=None):
    ring = PolyRing(["x", "y", "z", "w", *extra_variables], characteristic)
    T = generic_skew_matrix(ring, seed)
    P = pfaffian_algebra(T)
    W = koszul_algebra([ring.gen("w")], name="W")
    M = tensor_dga(P, W, name="M")
    pf = P.d(1).row(0)
    i, j = _coprime_pair(pf, ring)
    # M_1 basis: (1, s, 0) for P_1 (x) W_0, then (0, 0, 0) for P_0 (x) W_1
    labels = M.labels(1)
    si = labels.index((1, i, 0))
    sj = labels.index((1, j, 0))
    sw = labels.index((0, 0, 0))
    m1 = M.d(1).row(0)
    seq = [m1[si], m1[sj], m1[sw]]
    if r is None:
        r = ring.gen("x") + ring.gen("w")
    return InstanceSpec(
        ring, M, seq, (si, sj, sw), r, {"calibration": "full", "seed": seed}, "tensor"
    )


def _random_unimodular(ring, n, rng, bound=2):
    """Product of a permutation and elementary integer row operations."""
    one = ring.one()
    g = PolyMatrix.identity(ring, n)
    perm = list(range(n))
    rng.shuffle(perm)
    P = PolyMatrix(ring, n, n)
    for a, b in enumerate(perm):
        P.entries[a][b] = one if rng.random() < 0.5 else -one
    g = P
    for _ in range(2 * n):
        a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if a == b:
            continue
        E = PolyMatrix.identity(ring, n)
        E.entries[a][b] = ring.const(rng.randint(-bound, bound))
        g = g @ E
    return g


def gen_perturbed(base, seed):
    """Transport the structure of ``base`` along random integral unimodular bases."""
    rng = random.Random(seed)
    ring = base.ring
    M = base.M
    g = {0: PolyMatrix.identity(ring, 1)}
    # degree 1: keep the splitting summand's image intact by mixing the splitting
    # basis only among itself and adding multiples of splitting vectors to the rest
    n1 = M.rank(1)
    split = list(base.splitting)
    rest = [k for k in range(n1) if k not in split]
    g1 = PolyMatrix(ring, n1, n1)
    # new splitting columns first are exactly the old ones, in place
    one = ring.one()
    for k in split:
        g1.entries[k][k] = one
    sub = _random_unimodular(ring, len(rest), rng)
    for a, ka in enumerate(rest):
        for b, kb in enumerate(rest):
            g1.entries[ka][kb] = sub[a, b]
        for k in split:
            g1.entries[k][ka] = ring.const(rng.randint(-1, 1))
    g[1] = g1
    for i in (2, 3):
        g[i] = _random_unimodular(ring, M.rank(i), rng)
    g[4] = PolyMatrix(ring, 1, 1, [[one if rng.random() < 0.5 else -one]])
    M2 = change_basis(M, g, name="M")
    seq = [M2.d(1)[0, s] for s in base.splitting]
    return InstanceSpec(
        ring,
        M2,
        seq,
        tuple(base.splitting),
        base.r,
        dict(base.options, seed=seed),
        f"{base.name}-perturbed-{seed}",
    )


# --- serialization ---------------------------------------------------------


def _vec_strs(v):
    return [str(x) for x in v]


def to_json(spec):
    M = spec.M
    ring = spec.ring
    products = {}
    for (i, j), tab in sorted(M.products.items()):
        for (s, t), v in sorted(tab.items()):
            if any(v):
                products[f"{i}:{s + 1},{j}:{t + 1}"] = _vec_strs(v)
    divided = {}
    for e, tab in sorted(M.divided.items()):
        divided[str(e)] = [
            _vec_strs(tab.get(s, [ring.zero()] * M.rank(2 * e))) for s in range(M.rank(e))
        ]
    doc = {
        "format": FORMAT,
        "name": spec.name,
        "ring": {"characteristic": ring.characteristic, "variables": list(ring.variables)},
        "M": {
            "ranks": [M.rank(i) for i in range(M.n + 1)],
            "differentials": {str(i): M.d(i).to_strings() for i in range(1, M.n + 1)},
            "products": products,
            "divided_squares": divided,
            "orientation": M.orientation.to_strings()[0],
        },
        "regular_sequence": _vec_strs(spec.sequence),
        "splitting": [s + 1 for s in spec.splitting],
        "r": str(spec.r),
        "options": dict(spec.options),
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def _req(obj, key, loc):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field '{key}'", loc)
    return obj[key]


def _poly(ring, text, loc):
    from .exactalg import PolyParseError

    if not isinstance(text, (str, int)):
        raise SchemaError("expected a polynomial string", loc)
    try:
        return ring.parse(str(text))
    except PolyParseError as exc:
        raise SchemaError(str(exc), loc) from exc


def from_json(text, source="<instance>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", source)
    if _req(doc, "format", source) != FORMAT:
        raise SchemaError(f"unsupported format {doc['format']!r}", "format")
    rd = _req(doc, "ring", source)
    char = _req(rd, "characteristic", "ring")
    vars_ = _req(rd, "variables", "ring")
    if not isinstance(char, int) or (char != 0 and not is_prime(char)):
        raise SchemaError("characteristic must be 0 or a prime", "ring.characteristic")
    try:
        ring = PolyRing(list(vars_), char)
    except ValueError as exc:
        raise SchemaError(str(exc), "ring.variables") from exc
    md = _req(doc, "M", source)
    ranks = _req(md, "ranks", "M")
    if not (isinstance(ranks, list) and len(ranks) == 5 and all(isinstance(r, int) for r in ranks)):
        raise SchemaError("ranks must be a list of 5 integers", "M.ranks")
    if ranks[0] != 1 or ranks[4] != 1:
        raise SchemaError("M_0 and M_4 must have rank 1", "M.ranks")
    diffs = _req(md, "differentials", "M")
    mats = []
    for i in range(1, 5):
        loc = f"M.differentials.{i}"
        rows = _req(diffs, str(i), "M.differentials")
        if not isinstance(rows, list) or len(rows) != ranks[i - 1]:
            raise SchemaError(f"expected {ranks[i - 1]} rows", loc)
        ents = []
        for a, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != ranks[i]:
                raise SchemaError(f"row {a + 1} must have {ranks[i]} entries", loc)
            ents.append([_poly(ring, x, f"{loc}[{a + 1}][{b + 1}]") for b, x in enumerate(row)])
        mats.append(PolyMatrix(ring, ranks[i - 1], ranks[i], ents))
    try:
        C = build_complex(mats, ring)
    except ValueError as exc:
        raise SchemaError(str(exc), "M.differentials") from exc
    products = {}
    for key, vec in _req(md, "products", "M").items():
        loc = f"M.products.{key}"
        try:
            left, right = key.split(",")
            i, s = (int(x) for x in left.split(":"))
            j, t = (int(x) for x in right.split(":"))
        except ValueError as exc:
            raise SchemaError("keys must look like 'i:s,j:t'", loc) from exc
        if not (1 <= i <= j and i + j <= 4):
            raise SchemaError("products are stored for 1 <= i <= j with i + j <= 4", loc)
        if not (1 <= s <= ranks[i] and 1 <= t <= ranks[j]):
            raise SchemaError("basis index out of range", loc)
        if not isinstance(vec, list) or len(vec) != ranks[i + j]:
            raise SchemaError(f"expected a vector of length {ranks[i + j]}", loc)
        products.setdefault((i, j), {})[(s - 1, t - 1)] = [
            _poly(ring, x, f"{loc}[{k + 1}]") for k, x in enumerate(vec)
        ]
    for ij in ((1, 1), (1, 2), (1, 3), (2, 2)):
        products.setdefault(ij, {})
    dv = _req(md, "divided_squares", "M")
    rows = _req(dv, "2", "M.divided_squares")
    if not isinstance(rows, list) or len(rows) != ranks[2]:
        raise SchemaError(f"expected {ranks[2]} vectors", "M.divided_squares.2")
    tab = {}
    for s, vec in enumerate(rows):
        loc = f"M.divided_squares.2[{s + 1}]"
        if not isinstance(vec, list) or len(vec) != ranks[4]:
            raise SchemaError(f"expected a vector of length {ranks[4]}", loc)
        v = [_poly(ring, x, f"{loc}[{k + 1}]") for k, x in enumerate(vec)]
        if any(v):
            tab[s] = v
    orient = _req(md, "orientation", "M")
    if not isinstance(orient, list) or len(orient) != ranks[4]:
        raise SchemaError("orientation must be a row of length rank M_4", "M.orientation")
    orientation = PolyMatrix(
        ring, 1, ranks[4], [[_poly(ring, x, "M.orientation") for x in orient]]
    )
    M = DgAlgebra(C, products, {2: tab}, orientation, "M")
    seq = [_poly(ring, x, "regular_sequence") for x in _req(doc, "regular_sequence", source)]
    if len(seq) != 3:
        raise SchemaError("the regular sequence must have 3 elements", "regular_sequence")
    split = _req(doc, "splitting", source)
    if not (isinstance(split, list) and len(split) == 3 and all(isinstance(s, int) for s in split)):
        raise SchemaError("splitting must list exactly 3 indices", "splitting")
    if any(not 1 <= s <= ranks[1] for s in split):
        raise SchemaError(f"splitting indices must lie in 1..{ranks[1]}", "splitting")
    r = _poly(ring, _req(doc, "r", source), "r")
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise SchemaError("options must be an object", "options")
    return InstanceSpec(
        ring, M, seq, tuple(s - 1 for s in split), r, options, doc.get("name", "instance")
    )


def parse_instance(path):
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read(), str(path))


def write_instance(spec, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(spec))
