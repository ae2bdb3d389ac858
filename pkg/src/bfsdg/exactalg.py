"""Exact scalars, sparse multivariate polynomials and dense polynomial matrices.

Coefficients live in Q (``fractions.Fraction``) or in Z/p (plain ints in
``range(p)``).  Terms are stored as ``{exponent tuple: coefficient}`` with no
zero coefficients; the term order is graded reverse lexicographic throughout.
"""

from __future__ import annotations

import re
from fractions import Fraction

DEFAULT_PRIME = 32003


class RingMismatch(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotUnimodular(ArithmeticError):
    pass


class NotDivisible(ArithmeticError):
    pass


class PolyParseError(ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at column {position + 1}: {text!r}")


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def grevlex_key(exp):
    return (sum(exp), tuple(-e for e in reversed(exp)))


class PolyRing:
    """Polynomial ring over Q (characteristic 0) or Z/p on named variables."""

    __slots__ = ("characteristic", "variables", "nvars", "_index", "_zexp")

    def __init__(self, variables, characteristic=0):
        variables = tuple(variables)
        if not variables or any(not isinstance(v, str) or not v for v in variables):
            raise ValueError("variable names must be nonempty strings")
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        for v in variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                raise ValueError(f"bad variable name {v!r}")
        if characteristic != 0 and not is_prime(characteristic):
            raise ValueError(f"characteristic {characteristic} is neither 0 nor prime")
        self.characteristic = characteristic
        self.variables = variables
        self.nvars = len(variables)
        self._index = {v: i for i, v in enumerate(variables)}
        self._zexp = (0,) * len(variables)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.characteristic == other.characteristic
            and self.variables == other.variables
        )

    def __hash__(self):
        return hash((self.characteristic, self.variables))

    def __repr__(self):
        field = "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"
        return f"PolyRing({field}[{', '.join(self.variables)}])"

    # scalars
    def coerce(self, c):
        p = self.characteristic
        if isinstance(c, str):
            c = Fraction(c)
        if p == 0:
            return c if isinstance(c, Fraction) else Fraction(c)
        if isinstance(c, Fraction):
            if c.denominator % p == 0:
                raise ZeroDivisionError(f"denominator {c.denominator} vanishes mod {p}")
            return c.numerator * pow(c.denominator, -1, p) % p
        return int(c) % p

    def inv(self, c):
        if not c:
            raise ZeroDivisionError("inverse of zero")
        if self.characteristic == 0:
            return 1 / c
        return pow(c, -1, self.characteristic)

    # constructors
    def zero(self):
        return Poly(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        c = self.coerce(c)
        return Poly(self, {self._zexp: c} if c else {})

    def gen(self, name):
        i = name if isinstance(name, int) else self._index[name]
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.coerce(1)})

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def monomial(self, exp, c=1):
        c = self.coerce(c)
        return Poly(self, {tuple(exp): c} if c else {})

    def var_index(self, name):
        return self._index[name]

    def parse(self, text):
        return parse_poly(self, text)

    def __call__(self, value):
        if isinstance(value, Poly):
            if value.ring != self:
                raise RingMismatch(f"{value.ring} vs {self}")
            return value
        if isinstance(value, str):
            return parse_poly(self, value)
        return self.const(value)

    def with_characteristic(self, p):
        return PolyRing(self.variables, p)


class Poly:
    """Immutable polynomial; ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # helpers
    def _other(self, other):
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = self._other(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        p = self.ring.characteristic
        res = dict(self.terms)
        for e, c in other.terms.items():
            v = res.get(e)
            if v is None:
                res[e] = c
            else:
                v = (v + c) % p if p else v + c
                if v:
                    res[e] = v
                else:
                    del res[e]
        return Poly(self.ring, res)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.characteristic
        if p:
            return Poly(self.ring, {e: p - c for e, c in self.terms.items()})
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._other(other)
        if not self.terms or not other.terms:
            return Poly(self.ring, {})
        p = self.ring.characteristic
        res = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                v = res.get(e)
                res[e] = c1 * c2 if v is None else v + c1 * c2
        if p:
            res = {e: c % p for e, c in res.items() if c % p}
        else:
            res = {e: c for e, c in res.items() if c}
        return Poly(self.ring, res)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.ring.coerce(c)
        if not c:
            return Poly(self.ring, {})
        p = self.ring.characteristic
        if p:
            return Poly(self.ring, {e: v * c % p for e, v in self.terms.items()})
        return Poly(self.ring, {e: v * c for e, v in self.terms.items()})

    def mul_term(self, exp, c):
        p = self.ring.characteristic
        out = {}
        for e, v in self.terms.items():
            w = v * c
            if p:
                w %= p
            out[tuple([a + b for a, b in zip(e, exp)])] = w
        return Poly(self.ring, out)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # structure
    def lead(self):
        """Leading (exponent, coefficient) in grevlex."""
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and self.ring._zexp in self.terms)

    def constant_value(self):
        """Coefficient of the constant term."""
        return self.terms.get(self.ring._zexp, self.ring.coerce(0))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def divexact(self, other):
        """Quotient q with self == q*other; raises NotDivisible otherwise."""
        other = self._other(other)
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_constant():
            return self.scale(self.ring.inv(other.constant_value()))
        le, lc = other.lead()
        linv = self.ring.inv(lc)
        p = self.ring.characteristic
        rem = self
        quot = {}
        while rem.terms:
            e, c = rem.lead()
            if any(a < b for a, b in zip(e, le)):
                raise NotDivisible(f"{other} does not divide {self}")
            qe = tuple(a - b for a, b in zip(e, le))
            qc = c * linv
            if p:
                qc %= p
            quot[qe] = qc
            rem = rem - other.mul_term(qe, qc)
        return Poly(self.ring, quot)

    def evaluate(self, point, p):
        """Value mod p at an integer point (a sequence, one entry per variable)."""
        total = 0
        for e, c in self.terms.items():
            if isinstance(c, Fraction):
                c = c.numerator * pow(c.denominator, -1, p)
            v = c % p
            for x, k in zip(point, e):
                if k:
                    v = v * pow(x, k, p) % p
            total += v
        return total % p

    def substitute(self, values):
        """Replace variables by polynomials (dict name -> Poly) in the same ring."""
        ring = self.ring
        out = ring.zero()
        gens = [values.get(v, ring.gen(v)) for v in ring.variables]
        for e, c in self.terms.items():
            t = ring.const(c)
            for g, k in zip(gens, e):
                if k:
                    t = t * g**k
            out = out + t
        return out

    def change_ring(self, ring):
        """Map coefficients into another ring with the same variables (e.g. reduce mod p)."""
        if ring.variables != self.ring.variables:
            raise RingMismatch("variable lists differ")
        out = {}
        for e, c in self.terms.items():
            v = ring.coerce(c)
            if v:
                out[e] = v
        return Poly(ring, out)

    # printing
    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.variables
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
            )
            neg = isinstance(c, Fraction) and c < 0
            a = -c if neg else c
            if mono:
                s = mono if a == 1 else f"{a}*{mono}"
            else:
                s = str(a)
            parts.append(("-" if neg else "+", s))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out

    def __repr__(self):
        return f"Poly({str(self)!r})"


def poly_arith(a, b, kind):
    """Exact add/sub/mul of two polynomials in the same ring."""
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^()":
                raise PolyParseError(f"unexpected character {ch!r}", text, start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, ring, text):
        self.ring = ring
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, msg):
        raise PolyParseError(msg, self.text, self.peek()[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        p = self.term()
        if sign < 0:
            p = -p
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.power()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.power()
        return p

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            t = self.peek()
            if t[0] != "num" or "/" in t[1]:
                self.fail("exponent must be a non-negative integer")
            self.take()
            base = base ** int(t[1])
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return self.ring.const(Fraction(val))
        if kind == "name":
            self.take()
            try:
                return self.ring.gen(val)
            except KeyError:
                raise PolyParseError(f"unknown variable {val!r}", self.text, pos) from None
        if kind == "(":
            self.take()
            p = self.expr()
            if self.peek()[0] != ")":
                self.fail("expected ')'")
            self.take()
            return p
        if kind == "-":
            self.take()
            return -self.atom()
        self.fail(f"unexpected token {val!r}" if val else "unexpected end of input")


def parse_poly(ring, text):
    return _Parser(ring, text).parse()


# --- matrices --------------------------------------------------------------


class PolyMatrix:
    """Dense matrix of polynomials over one ring."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring, rows, cols, entries=None):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        if entries is None:
            z = ring.zero()
            entries = [[z] * cols for _ in range(rows)]
        elif len(entries) != rows or any(len(r) != cols for r in entries):
            raise DimensionMismatch(f"entries do not form a {rows}x{cols} array")
        self.entries = entries

    @classmethod
    def zeros(cls, ring, rows, cols):
        return cls(ring, rows, cols)

    @classmethod
    def identity(cls, ring, n):
        m = cls(ring, n, n)
        one = ring.one()
        for i in range(n):
            m.entries[i][i] = one
        return m

    @classmethod
    def from_rows(cls, ring, rows, cols=None):
        rows = [[ring(x) for x in r] for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(ring, len(rows), cols, rows)

    @classmethod
    def from_columns(cls, ring, columns, rows):
        m = cls(ring, rows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise DimensionMismatch("column length mismatch")
            for i in range(rows):
                m.entries[i][j] = col[i]
        return m

    @classmethod
    def blocks(cls, ring, grid, row_sizes, col_sizes):
        """Assemble from a grid of PolyMatrix-or-None blocks."""
        m = cls(ring, sum(row_sizes), sum(col_sizes))
        r0 = 0
        for bi, rs in enumerate(row_sizes):
            c0 = 0
            for bj, cs in enumerate(col_sizes):
                blk = grid[bi][bj]
                if blk is not None:
                    if blk.rows != rs or blk.cols != cs:
                        raise DimensionMismatch(
                            f"block ({bi},{bj}) is {blk.rows}x{blk.cols}, expected {rs}x{cs}"
                        )
                    for i in range(rs):
                        m.entries[r0 + i][c0 : c0 + cs] = blk.entries[i]
                c0 += cs
            r0 += rs
        return m

    def copy(self):
        return PolyMatrix(self.ring, self.rows, self.cols, [list(r) for r in self.entries])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j):
        return [self.entries[i][j] for i in range(self.rows)]

    def row(self, i):
        return list(self.entries[i])

    def submatrix(self, rows, cols):
        return PolyMatrix(
            self.ring, len(rows), len(cols), [[self.entries[i][j] for j in cols] for i in rows]
        )

    def transpose(self):
        return PolyMatrix(
            self.ring,
            self.cols,
            self.rows,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def _check_same(self, other):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __add__(self, other):
        self._check_same(other)
        return PolyMatrix(
            self.ring,
            self.rows,
            self.cols,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
        )

    def __sub__(self, other):
        self._check_same(other)
        return PolyMatrix(
            self.ring,
            self.rows,
            self.cols,
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
        )

    def __neg__(self):
        return PolyMatrix(self.ring, self.rows, self.cols, [[-a for a in r] for r in self.entries])

    def scale(self, c):
        if isinstance(c, Poly):
            return PolyMatrix(
                self.ring, self.rows, self.cols, [[c * a for a in r] for r in self.entries]
            )
        return PolyMatrix(
            self.ring, self.rows, self.cols, [[a.scale(c) for a in r] for r in self.entries]
        )

    def __matmul__(self, other):
        return mat_compose(self, other)

    def apply(self, vec):
        """Matrix times a column given as a list of Poly."""
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.cols} columns")
        return [lin_comb(row, vec, self.ring) for row in self.entries]

    def is_zero(self):
        return all(not a for r in self.entries for a in r)

    def nonzero_entries(self):
        return [(i, j, a) for i, r in enumerate(self.entries) for j, a in enumerate(r) if a]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (
            self.ring == other.ring
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def to_strings(self):
        return [[str(a) for a in r] for r in self.entries]

    def change_ring(self, ring):
        return PolyMatrix(
            ring, self.rows, self.cols, [[a.change_ring(ring) for a in r] for r in self.entries]
        )

    def evaluate(self, point, p):
        return [[a.evaluate(point, p) for a in r] for r in self.entries]

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols}, {self.to_strings()})"


def lin_comb(coeffs, vecs_or_polys, ring):
    """Sum of coeffs[k] * polys[k], accumulating in one dict."""
    p = ring.characteristic
    acc = {}
    for a, b in zip(coeffs, vecs_or_polys):
        if not a.terms or not b.terms:
            continue
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple([x + y for x, y in zip(e1, e2)])
                v = acc.get(e)
                acc[e] = c1 * c2 if v is None else v + c1 * c2
    if p:
        return Poly(ring, {e: c % p for e, c in acc.items() if c % p})
    return Poly(ring, {e: c for e, c in acc.items() if c})


def mat_compose(A, B):
    """Exact product A*B."""
    if A.ring != B.ring:
        raise RingMismatch(f"{A.ring} vs {B.ring}")
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot compose {A.rows}x{A.cols} with {B.rows}x{B.cols}")
    ring = A.ring
    bcols = [B.column(j) for j in range(B.cols)]
    return PolyMatrix(
        ring, A.rows, B.cols, [[lin_comb(row, col, ring) for col in bcols] for row in A.entries]
    )


# --- fraction-free elimination ---------------------------------------------


def _ff_gauss_jordan(rows, ncols):
    """Fraction-free Gauss-Jordan on a list of row lists (modified in place).

    Only the first ``ncols`` columns are used for pivoting.  Returns
    (pivot columns, final pivot, number of row swaps).  Every pivot entry of
    the result equals the final pivot.
    """
    nrows = len(rows)
    prev = None
    pivots = []
    swaps = 0
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv_row = None
        best = None
        for i in range(r, nrows):
            a = rows[i][c]
            if a:
                key = (len(a.terms), a.degree())
                if best is None or key < best:
                    best, piv_row = key, i
        if piv_row is None:
            continue
        if piv_row != r:
            rows[r], rows[piv_row] = rows[piv_row], rows[r]
            swaps += 1
        piv = rows[r][c]
        prow = rows[r]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            a = row[c]
            if prev is None:
                if a:
                    rows[i] = [piv * x - a * y for x, y in zip(row, prow)]
                else:
                    rows[i] = [piv * x for x in row]
            else:
                if a:
                    rows[i] = [(piv * x - a * y).divexact(prev) for x, y in zip(row, prow)]
                else:
                    rows[i] = [(piv * x).divexact(prev) for x in row]
        pivots.append(c)
        prev = piv
        r += 1
    return pivots, prev, swaps


def rank(A):
    """Rank over the fraction field."""
    rows = [list(r) for r in A.entries]
    pivots, _, _ = _ff_gauss_jordan(rows, A.cols)
    return len(pivots)


def det(A):
    if A.rows != A.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return A.ring.one()
    rows = [list(r) for r in A.entries]
    pivots, last, swaps = _ff_gauss_jordan(rows, n)
    if len(pivots) < n:
        return A.ring.zero()
    return -last if swaps % 2 else last


def unimodular_inverse(A):
    """Inverse over R of a square matrix with nonzero constant determinant."""
    if A.rows != A.cols:
        raise DimensionMismatch("inverse of a non-square matrix")
    n = A.rows
    ring = A.ring
    if n == 0:
        return PolyMatrix(ring, 0, 0)
    one, zero = ring.one(), ring.zero()
    rows = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(A.entries)]
    pivots, last, _ = _ff_gauss_jordan(rows, n)
    if len(pivots) < n:
        raise NotUnimodular("matrix is singular")
    if not last.is_constant():
        raise NotUnimodular(f"determinant is not a unit: pivot {last}")
    inv_c = ring.inv(last.constant_value())
    return PolyMatrix(ring, n, n, [[x.scale(inv_c) for x in r[n:]] for r in rows])


class FractionSolution:
    """Solution of A x = b over the fraction field: x_i = numerators[i] / denominator."""

    def __init__(self, consistent, numerators, denominator, pivots):
        self.consistent = consistent
        self.numerators = numerators
        self.denominator = denominator
        self.pivots = pivots
        self.polynomial = False
        self.solution = None
        if consistent:
            try:
                self.solution = [n.divexact(denominator) for n in numerators]
                self.polynomial = True
            except NotDivisible:
                pass

    def __repr__(self):
        return (
            f"FractionSolution(consistent={self.consistent}, polynomial={self.polynomial}, "
            f"den={self.denominator})"
        )


def solve_fraction_field(A, b):
    """Particular solution (free variables zero) of A x = b over Frac(R)."""
    if len(b) != A.rows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.rows} rows")
    ring = A.ring
    rows = [list(r) + [b[i]] for i, r in enumerate(A.entries)]
    pivots, last, _ = _ff_gauss_jordan(rows, A.cols)
    if last is None:
        last = ring.one()
    consistent = all(not rows[i][-1] for i in range(len(pivots), A.rows))
    nums = [ring.zero()] * A.cols
    for i, c in enumerate(pivots):
        nums[c] = rows[i][-1]
    return FractionSolution(consistent, nums, last, pivots)
