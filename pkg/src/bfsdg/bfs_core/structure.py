"""The big-from-small complex F(alpha, r): a small term language for its
differential blocks and product table, a typechecker, and exact assembly.

A term is a nested tuple:

    ("v", e, c)        component c of the e-th argument
    ("ap", name, t)    one of the maps k_i, m_i, a_i (alpha), b_i (beta)
    ("mul", s, t)      product in K or in M; R acts by scalars
    ("br", t)          orientation bracket of K_3 or M_4, landing in R
    ("X", s, t)        X(s ^ t)      M_1, M_1 -> M_2
    ("Xt", s, t)       X^t(s (x) t)  M_1, M_2 -> M_3
    ("r",)             the element r
    ("omega",)         the generator of M_4 with bracket 1

An entry is a tuple of signed terms ``(sign, term)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..complexes import BasedModule, ChainComplex, rank_condition_check
from ..exactalg import PolyMatrix
from ..grobner import groebner_basis
from ..multialg import DgAlgebra, verify_dga
from ..report import Check


class TypecheckFailure(TypeError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class TermTypeError(TypeError):
    pass


# components of F_i as (family, degree); family R is the ring
COMPONENTS = {
    0: (("R", 0),),
    1: (("K", 1), ("M", 1)),
    2: (("K", 2), ("M", 2), ("K", 1)),
    3: (("M", 3), ("K", 2)),
    4: (("M", 4),),
}
_VAR_NAMES = {
    0: ("1",),
    1: ("phi1", "theta1"),
    2: ("phi2", "theta2", "psi1"),
    3: ("theta3", "phi2"),
    4: ("theta4",),
}


def ty(fam, d):
    return ("R", 0) if d == 0 else (fam, d)


def _maps():
    out = {}
    for i in range(1, 4):
        out[f"k{i}"] = (ty("K", i), ty("K", i - 1))
        out[f"a{i}"] = (ty("K", i), ty("M", i))
    for i in range(1, 5):
        out[f"m{i}"] = (ty("M", i), ty("M", i - 1))
        out[f"b{i}"] = (ty("M", i), ty("K", i - 1))
    return out


MAPS = _maps()
_MAP_PRETTY = {"k": "k", "m": "m", "a": "alpha", "b": "beta"}


def tname(t):
    return "R" if t[0] == "R" else f"{t[0]}{t[1]}"


# --- constructors -----------------------------------------------------------


def v(e, c):
    return ("v", e, c)


def ap(name, *chain_then_arg):
    """ap("a2", "b3", t) = a2(b3(t))."""
    *names, arg = (name,) + chain_then_arg
    for n in reversed(names):
        arg = ("ap", n, arg)
    return arg


def mul(s, t):
    return ("mul", s, t)


R_ = ("r",)
OMEGA = ("omega",)


# --- typing -----------------------------------------------------------------


def infer(term, slots):
    """Type of a term; slots[e] is the F-degree of argument e."""
    kind = term[0]
    if kind == "v":
        _, e, c = term
        comps = COMPONENTS[slots[e]]
        if c >= len(comps):
            raise TermTypeError(f"F_{slots[e]} has no component {c}")
        return comps[c]
    if kind == "r":
        return ("R", 0)
    if kind == "omega":
        return ("M", 4)
    if kind == "ap":
        _, name, arg = term
        if name not in MAPS:
            raise TermTypeError(f"{pretty(term, slots)}: no map named {_pretty_map(name)}")
        dom, cod = MAPS[name]
        got = infer(arg, slots)
        if got != dom:
            raise TermTypeError(
                f"{pretty(term, slots)}: {_pretty_map(name)} expects {tname(dom)}, got {tname(got)}"
            )
        return cod
    if kind == "mul":
        a, b = infer(term[1], slots), infer(term[2], slots)
        if a[0] == "R":
            return b
        if b[0] == "R":
            return a
        if a[0] != b[0]:
            raise TermTypeError(f"{pretty(term, slots)}: cannot multiply {tname(a)} by {tname(b)}")
        top = 3 if a[0] == "K" else 4
        if a[1] + b[1] > top:
            raise TermTypeError(f"{pretty(term, slots)}: product lands above degree {top}")
        return (a[0], a[1] + b[1])
    if kind == "br":
        a = infer(term[1], slots)
        if a not in (("K", 3), ("M", 4)):
            raise TermTypeError(f"{pretty(term, slots)}: bracket of {tname(a)}")
        return ("R", 0)
    if kind in ("X", "Xt"):
        want = (("M", 1), ("M", 1)) if kind == "X" else (("M", 1), ("M", 2))
        got = (infer(term[1], slots), infer(term[2], slots))
        if got != want:
            raise TermTypeError(
                f"{pretty(term, slots)}: {kind} expects ({tname(want[0])}, {tname(want[1])}), "
                f"got ({tname(got[0])}, {tname(got[1])})"
            )
        return ("M", 2) if kind == "X" else ("M", 3)
    raise TermTypeError(f"unknown term {term!r}")


def variables(term):
    if term[0] == "v":
        return [term[1:]]
    out = []
    for sub in term[1:]:
        if isinstance(sub, tuple):
            out.extend(variables(sub))
    return out


def check_term(term, slots, target):
    """Raise TermTypeError unless the term has the target type and is multilinear."""
    got = infer(term, slots)
    if got != target:
        raise TermTypeError(f"{pretty(term, slots)} has type {tname(got)}, slot needs {tname(target)}")
    elts = sorted(e for e, _ in variables(term))
    if elts != list(range(len(slots))):
        raise TermTypeError(f"{pretty(term, slots)} is not linear in each argument")


def well_typed(term, slots, target):
    try:
        check_term(term, slots, target)
        return True
    except TermTypeError:
        return False


# --- printing ---------------------------------------------------------------


def _pretty_map(name):
    return _MAP_PRETTY.get(name[0], name[0]) + name[1:]


def pretty(term, slots):
    kind = term[0]
    if kind == "v":
        _, e, c = term
        names = _VAR_NAMES[slots[e]]
        base = names[c] if c < len(names) else f"?{c}"
        return base + "'" * e
    if kind == "r":
        return "r"
    if kind == "omega":
        return "omega"
    if kind == "ap":
        return f"{_pretty_map(term[1])}({pretty(term[2], slots)})"
    if kind == "mul":
        a, b = (pretty(t, slots) for t in term[1:])
        wrap = lambda s, t: f"({s})" if t[0] == "mul" else s
        return f"{wrap(a, term[1])}*{wrap(b, term[2])}"
    if kind == "br":
        return f"[{pretty(term[1], slots)}]"
    if kind == "X":
        return f"X({pretty(term[1], slots)} ^ {pretty(term[2], slots)})"
    if kind == "Xt":
        return f"Xt({pretty(term[1], slots)} (x) {pretty(term[2], slots)})"
    return repr(term)


def pretty_entry(entry, slots):
    if not entry:
        return "0"
    parts = []
    for k, (s, t) in enumerate(entry):
        txt = pretty(t, slots)
        if k == 0:
            parts.append(txt if s > 0 else f"-{txt}")
        else:
            parts.append(f"{'+' if s > 0 else '-'} {txt}")
    return " ".join(parts)


# --- the printed skeleton ---------------------------------------------------

PRODUCT_DEGREES = ((1, 1), (1, 2), (1, 3), (2, 2))


def slots_of(key):
    """Argument degrees of an entry key."""
    if key[0] == "f":
        return (key[1],)
    return (key[1], key[2])


def target_of(key):
    if key[0] == "f":
        return COMPONENTS[key[1] - 1][key[2]]
    return COMPONENTS[key[1] + key[2]][key[3]]


def block_of(key):
    """Repairs are bounded per block: a whole f_i, or one product component."""
    return key[:2] if key[0] == "f" else key


def printed_skeleton():
    """Every entry exactly as printed, including the entries that do not typecheck.

    Keys: ("f", i, row, col) for the differential F_i -> F_{i-1};
    ("p", i, j, comp) for the product F_i x F_j -> F_{i+j}.
    """
    x = lambda c: v(0, c)
    y = lambda c: v(1, c)
    S = {}
    # f_1 : K1 + M1 -> R, printed (m1   beta1 + r k1)
    S[("f", 1, 0, 0)] = ((1, ap("m1", x(0))),)
    S[("f", 1, 0, 1)] = ((1, ap("b1", x(1))), (1, mul(R_, ap("k1", x(1)))))
    # f_2 : K2 + M2 + K1 -> K1 + M1, printed [[m2, beta2, r], [0, -k2, -alpha1]]
    S[("f", 2, 0, 0)] = ((1, ap("m2", x(0))),)
    S[("f", 2, 0, 1)] = ((1, ap("b2", x(1))),)
    S[("f", 2, 0, 2)] = ((1, mul(R_, x(2))),)
    S[("f", 2, 1, 1)] = ((-1, ap("k2", x(1))),)
    S[("f", 2, 1, 2)] = ((-1, ap("a1", x(2))),)
    # f_3 : M3 + K2 -> K2 + M2 + K1, printed [[beta3, -r], [-k3, -alpha2], [0, m2]]
    S[("f", 3, 0, 0)] = ((1, ap("b3", x(0))),)
    S[("f", 3, 0, 1)] = ((-1, mul(R_, x(1))),)
    S[("f", 3, 1, 0)] = ((-1, ap("k3", x(0))),)
    S[("f", 3, 1, 1)] = ((-1, ap("a2", x(1))),)
    S[("f", 3, 2, 1)] = ((1, ap("m2", x(1))),)
    # f_4 : M4 -> M3 + K2, printed [alpha3 beta4 - r m4; -k3 beta4]
    S[("f", 4, 0, 0)] = ((1, ap("a3", "b4", x(0))), (-1, mul(R_, ap("m4", x(0)))))
    S[("f", 4, 1, 0)] = ((-1, ap("k3", "b4", x(0))),)

    # (1,1): (phi1, theta1) (phi1', theta1')
    S[("p", 1, 1, 0)] = ((1, mul(x(0), y(0))),)
    S[("p", 1, 1, 1)] = (
        (-1, mul(ap("a1", x(0)), y(1))),
        (-1, mul(x(1), ap("a1", y(0)))),
        (-1, mul(R_, mul(x(1), y(1)))),
        (1, ("X", x(1), y(1))),
    )
    S[("p", 1, 1, 2)] = (
        (1, mul(ap("a1", x(1)), y(0))),
        (-1, mul(ap("a1", y(0)), x(1))),
        (1, ap("b2", mul(x(1), y(1)))),
    )
    # (1,2): (phi1, theta1) (phi2, theta2, phi1')
    S[("p", 1, 2, 0)] = (
        (1, mul(x(1), ap("a2", y(0)))),
        (-1, mul(("br", mul(x(0), y(0))), ("ap", "a4", OMEGA))),
        (-1, mul(ap("a1", x(0)), y(1))),
        (-1, mul(R_, mul(x(1), y(1)))),
        (1, ("Xt", y(1), x(1))),
    )
    S[("p", 1, 2, 1)] = (
        (1, mul(x(0), y(2))),
        (-1, mul(ap("m1", x(1)), y(0))),
        (-1, ap("b3", mul(x(1), y(1)))),
    )
    # (1,3): (phi1, theta1) (theta3, phi2)
    S[("p", 1, 3, 0)] = (
        (1, mul(("br", mul(x(0), y(1))), OMEGA)),
        (-1, mul(x(1), y(0))),
    )
    # (2,2): (phi2, theta2, phi1) (phi2', theta2', phi1')
    S[("p", 2, 2, 0)] = (
        (1, mul(("br", mul(x(0), y(2))), OMEGA)),
        (1, mul(("br", mul(x(2), y(0))), OMEGA)),
        (-1, mul(x(1), y(1))),
    )
    return S


def typecheck(skeleton):
    """Names of every ill-typed term; raises TypecheckFailure if there are any."""
    problems = typecheck_problems(skeleton)
    if problems:
        raise TypecheckFailure(problems)


def typecheck_problems(skeleton):
    problems = []
    for key in sorted(skeleton):
        slots, target = slots_of(key), target_of(key)
        for k, (_, term) in enumerate(skeleton[key]):
            try:
                check_term(term, slots, target)
            except TermTypeError as exc:
                problems.append(f"{entry_name(key)} term {k + 1}: {exc}")
    return problems


def entry_name(key):
    if key[0] == "f":
        i, row, col = key[1:]
        return (
            f"f{i} block {tname(COMPONENTS[i][col])} -> {tname(COMPONENTS[i - 1][row])}"
        )
    i, j, comp = key[1:]
    return f"product ({i},{j}) component {tname(COMPONENTS[i + j][comp])}"


# --- evaluation -------------------------------------------------------------


@dataclass
class Ingredients:
    """Everything a term can refer to, over one ring."""

    M: object
    K: object
    alpha: object
    beta: object
    r: object
    omega: list
    X: object = None  # XMaps, or None for X = 0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def ring(self):
        return self.M.ring

    def module_rank(self, t):
        fam, d = t
        if fam == "R":
            return 1
        return (self.K if fam == "K" else self.M).rank(d)

    def zero(self, t):
        return [self.ring.zero()] * self.module_rank(t)

    def map_matrix(self, name):
        fam, i = name[0], int(name[1:])
        if fam == "k":
            return self.K.d(i)
        if fam == "m":
            return self.M.d(i)
        if fam == "a":
            return self.alpha[i]
        return self.beta[i]

    @classmethod
    def from_pipeline(cls, data, xmaps, r):
        return cls(data.M, data.K, data.alpha, data.beta, r, list(data.omega), xmaps)


def _is_zero(vec):
    return not any(vec)


def evaluate(term, env, ing, slots):
    """(type, vector) of a term, env mapping (e, c) to a vector or None."""
    kind = term[0]
    if kind == "v":
        t = COMPONENTS[slots[term[1]]][term[2]]
        val = env.get(term[1:])
        return t, (val if val is not None else ing.zero(t))
    if kind == "r":
        return ("R", 0), [ing.r]
    if kind == "omega":
        return ("M", 4), list(ing.omega)
    if kind == "ap":
        _, name, arg = term
        t, x = evaluate(arg, env, ing, slots)
        cod = MAPS[name][1]
        if _is_zero(x):
            return cod, ing.zero(cod)
        return cod, ing.map_matrix(name).apply(x)
    if kind == "mul":
        (a, x), (b, y) = evaluate(term[1], env, ing, slots), evaluate(term[2], env, ing, slots)
        if a[0] == "R":
            return b, [x[0] * z for z in y]
        if b[0] == "R":
            return a, [y[0] * z for z in x]
        alg = ing.K if a[0] == "K" else ing.M
        t = (a[0], a[1] + b[1])
        if _is_zero(x) or _is_zero(y):
            return t, ing.zero(t)
        return t, alg.mul(a[1], x, b[1], y)
    if kind == "br":
        a, x = evaluate(term[1], env, ing, slots)
        alg = ing.K if a[0] == "K" else ing.M
        return ("R", 0), [alg.bracket(x)]
    if kind in ("X", "Xt"):
        (_, x), (_, y) = evaluate(term[1], env, ing, slots), evaluate(term[2], env, ing, slots)
        t = ("M", 2) if kind == "X" else ("M", 3)
        if ing.X is None:
            return t, ing.zero(t)
        return t, (ing.X.Xv(x, y) if kind == "X" else ing.X.Xtv(x, y))
    raise TermTypeError(f"unknown term {term!r}")


def term_tensor(term, key, ing):
    """Exact values of one term on all basis tuples of the component it reads.

    Returns {(basis indices...): vector in the target component}; the index
    of argument e runs over the component named by the term's variable.
    """
    slots = slots_of(key)
    target = target_of(key)
    vars_ = dict(variables(term))  # e -> c
    ranges = [range(ing.module_rank(COMPONENTS[slots[e]][vars_[e]])) for e in range(len(slots))]
    out = {}

    def rec(e, idx, env):
        if e == len(slots):
            _, val = evaluate(term, env, ing, slots)
            if any(val):
                out[tuple(idx)] = val
            return
        c = vars_[e]
        t = COMPONENTS[slots[e]][c]
        for s in ranges[e]:
            vec = ing.zero(t)
            vec[s] = ing.ring.one()
            env[(e, c)] = vec
            rec(e + 1, idx + [s], env)
        env.pop((e, c), None)

    rec(0, [], {})
    del target
    return out


# --- assembling F -----------------------------------------------------------


def component_offsets(ing, deg):
    offs, pos = [], 0
    for t in COMPONENTS[deg]:
        offs.append(pos)
        pos += ing.module_rank(t)
    return offs, pos


def f_labels(ing, deg):
    labels = []
    for t in COMPONENTS[deg]:
        if t[0] == "R":
            labels.append(("R", ()))
            continue
        alg = ing.K if t[0] == "K" else ing.M
        for lab in alg.labels(t[1]):
            labels.append((tname(t), lab))
    return tuple(labels)


def assemble(reading, ing, name="F"):
    """The DG algebra F determined by a well-typed reading over the ingredients."""
    ring = ing.ring
    typecheck(reading)
    offs = {d: component_offsets(ing, d) for d in range(5)}
    ranks = [offs[d][1] for d in range(5)]
    diffs = {}
    for i in range(1, 5):
        mat = PolyMatrix(ring, ranks[i - 1], ranks[i])
        for key, entry in reading.items():
            if key[0] != "f" or key[1] != i:
                continue
            _, _, row, col = key
            r0, c0 = offs[i - 1][0][row], offs[i][0][col]
            for sign, term in entry:
                for (s,), vec in term_tensor(term, key, ing).items():
                    for k, a in enumerate(vec):
                        if a:
                            mat.entries[r0 + k][c0 + s] = mat.entries[r0 + k][c0 + s] + a.scale(sign)
        diffs[i] = mat
    modules = [BasedModule(f_labels(ing, d), d) for d in range(5)]
    complex_ = ChainComplex(ring, ranks, diffs, modules)

    products = {}
    for i, j in PRODUCT_DEGREES:
        tab = {}
        for key, entry in reading.items():
            if key[0] != "p" or key[1:3] != (i, j):
                continue
            comp = key[3]
            t0 = offs[i + j][0][comp]
            for sign, term in entry:
                vars_ = dict(variables(term))
                a0, b0 = offs[i][0][vars_[0]], offs[j][0][vars_[1]]
                for (s, t), vec in term_tensor(term, key, ing).items():
                    slot = tab.setdefault((a0 + s, b0 + t), [ring.zero()] * ranks[i + j])
                    for k, a in enumerate(vec):
                        if a:
                            slot[t0 + k] = slot[t0 + k] + a.scale(sign)
        products[(i, j)] = {st: vec for st, vec in tab.items() if any(vec)}
    return DgAlgebra(complex_, products, {}, ing.M.orientation, name)


def verify_F(F, seed=0):
    """DG axioms (no divided powers), Poincare pairings, and the rank condition."""
    checks = verify_dga(F, divided=False, pairings=True)
    checks.extend(Check(f"{F.name}: {c.name}", c.passed, c.witness) for c in rank_condition_check(F.complex, seed))
    return checks


def compute_h0_ideal(F, groebner=False):
    """Entries of f_1; with groebner=True also the reduced Groebner basis of their ideal."""
    gens = [a for a in F.d(1).row(0) if a]
    if not groebner:
        return gens
    gb = groebner_basis([[g] for g in gens], F.ring, 1)
    return gens, [g[0] for g in gb.basis]
