"""Exact arithmetic over Q and over number fields Q[x]/(m(x)), plus dense
linear algebra (rref, rank, nullspace, solve) over those fields.

Rationals are :class:`fractions.Fraction`.  A number field is given by a monic
squarefree minimal polynomial; its elements are coefficient vectors of length
``degree`` in the power basis 1, a, ..., a^(d-1).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DivisionByZero,
    FieldMismatch,
    NotMonic,
    NotSquarefree,
    ParseError,
    Singular,
)

# ---------------------------------------------------------------------------
# dense polynomials over Q, coefficient lists low -> high

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def _poly_sub(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def _poly_divmod(p, q):
    p = _trim(p)
    q = _trim(q)
    if not q:
        raise DivisionByZero("polynomial division by zero")
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(p) >= len(q):
        c = p[-1] / lead
        shift = len(p) - len(q)
        quot[shift] = c
        for i, b in enumerate(q):
            p[i + shift] -= c * b
        p = _trim(p)
    return _trim(quot), p


def _poly_gcd(p, q):
    p, q = _trim(p), _trim(q)
    while q:
        p, q = q, _poly_divmod(p, q)[1]
    if p:
        p = [c / p[-1] for c in p]
    return p


def _poly_xgcd(p, q):
    """Return (g, s) with g = gcd(p, q) monic and s*p = g (mod q)."""
    r0, r1 = _trim(p), _trim(q)
    s0, s1 = [Fraction(1)], []
    while r1:
        quo, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, _poly_sub(s0, _poly_mul(quo, s1))
    if not r0:
        return [], []
    lead = r0[-1]
    return [c / lead for c in r0], [c / lead for c in s0]


def _derivative(p):
    return _trim([i * c for i, c in enumerate(p)][1:])


# ---------------------------------------------------------------------------
# parsing of polynomial expressions such as "-5/2*b - 4" or "x^2 - x - 4"

_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+(?:/\d+)?)\s*\*?\s*)?
        (?P<gen>[A-Za-z_]\w*)?
        (?:\s*\^\s*(?P<exp>\d+))?\s*""",
    re.VERBOSE,
)


def parse_poly(text: str, gen: str) -> list[Fraction]:
    """Parse a polynomial in ``gen`` with rational coefficients.

    Accepts sums of terms like ``3``, ``-1/19``, ``b``, ``2*b``, ``2b``,
    ``b^2``, with an optional surrounding ``(...)/den`` denominator.
    """
    s = text.strip()
    den = Fraction(1)
    m = re.fullmatch(r"\((.*)\)\s*/\s*(\d+)", s)
    if m:
        s, den = m.group(1), Fraction(int(m.group(2)))
        if den == 0:
            raise ParseError(f"zero denominator in {text!r}")
    if not s:
        raise ParseError(f"empty polynomial {text!r}")
    coeffs: dict[int, Fraction] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"cannot parse {text!r}", column=pos + 1)
        if not first and m.group("sign") is None:
            raise ParseError(f"missing operator in {text!r}", column=pos + 1)
        coef, g, exp = m.group("coef"), m.group("gen"), m.group("exp")
        if coef is None and g is None:
            raise ParseError(f"dangling sign in {text!r}", column=pos + 1)
        if g is not None and g != gen:
            raise ParseError(f"unknown symbol {g!r} (generator is {gen!r})", column=m.start("gen") + 1)
        if exp is not None and g is None:
            raise ParseError(f"exponent without generator in {text!r}", column=pos + 1)
        c = Fraction(coef) if coef is not None else Fraction(1)
        if m.group("sign") == "-":
            c = -c
        e = (int(exp) if exp is not None else 1) if g is not None else 0
        coeffs[e] = coeffs.get(e, Fraction(0)) + c
        pos = m.end()
        first = False
    deg = max(coeffs)
    return [coeffs.get(i, Fraction(0)) / den for i in range(deg + 1)]


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(coeffs: Sequence[Fraction], gen: str) -> str:
    """Render ``c0 + c1*g + ...`` highest power first, e.g. ``-5/2*b - 4``."""
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        mag = abs(c)
        if e == 0:
            body = format_rational(mag)
        else:
            mono = gen if e == 1 else f"{gen}^{e}"
            body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# number fields

class NumberField:
    """Q[x]/(m(x)) for a monic squarefree m with rational coefficients.

    Degree-1 fields all represent Q and compare equal to each other.
    """

    __slots__ = ("minpoly", "gen", "degree", "_mul_table")

    def __init__(self, minpoly: Iterable, gen: str = "a"):
        m = [Fraction(c) for c in minpoly]
        if not m:
            raise NotMonic("minimal polynomial must be nonempty")
        if m[-1] != 1:
            raise NotMonic(f"leading coefficient is {m[-1]}, expected 1")
        if len(m) < 2:
            raise NotMonic("minimal polynomial must have degree >= 1")
        if len(_poly_gcd(m, _derivative(m))) > 1:
            raise NotSquarefree("minimal polynomial shares a factor with its derivative")
        self.minpoly = tuple(m)
        self.gen = gen
        self.degree = len(m) - 1
        # x^(d+j) reduced mod m, for j = 0 .. d-2
        d = self.degree
        table = []
        cur = [-c for c in m[:-1]]  # x^d
        for _ in range(max(d - 1, 0)):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [cur[i] - top * m[i] for i in range(d)]
        if d >= 1:
            table.append(tuple(cur))
        self._mul_table = tuple(table)

    def is_rational(self) -> bool:
        return self.degree == 1

    def _key(self):
        return (1,) if self.degree == 1 else (self.minpoly, self.gen)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.is_rational():
            return "NumberField(Q)"
        return f"NumberField({self.spec()})"

    def spec(self) -> str:
        """Canonical text form: ``Q`` or ``Q[b]/(b^2 - b - 4)``."""
        if self.is_rational():
            return "Q"
        return f"Q[{self.gen}]/({format_poly(self.minpoly, self.gen)})"

    # element constructors
    def __call__(self, x) -> "FieldElement":
        return self.coerce(x)

    def coerce(self, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            if x.field == self:
                return x if x.field is self else FieldElement(self, x.coeffs)
            if x.field.is_rational():
                return self.from_coeffs([x.coeffs[0]])
            raise FieldMismatch(f"cannot coerce element of {x.field!r} into {self!r}")
        if isinstance(x, (int, Fraction)):
            return self.from_coeffs([Fraction(x)])
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self!r}")

    def from_coeffs(self, coeffs: Sequence) -> "FieldElement":
        c = [Fraction(v) for v in coeffs]
        if len(c) > self.degree:
            return FieldElement(self, _reduce(self, c))
        return FieldElement(self, tuple(c) + (Fraction(0),) * (self.degree - len(c)))

    def parse(self, text: str) -> "FieldElement":
        return self.from_coeffs(parse_poly(text, self.gen))

    @property
    def zero(self) -> "FieldElement":
        return self.from_coeffs([])

    @property
    def one(self) -> "FieldElement":
        return self.from_coeffs([1])

    @property
    def generator(self) -> "FieldElement":
        return self.from_coeffs([0, 1])


def _reduce(K: NumberField, c: list) -> tuple:
    d = K.degree
    out = list(c[:d]) + [Fraction(0)] * max(d - len(c), 0)
    for j, v in enumerate(c[d:]):
        if v == 0:
            continue
        row = K._mul_table[j]
        for i in range(d):
            out[i] += v * row[i]
    return tuple(out)


def nf_new(minpoly: Iterable, gen: str = "a") -> NumberField:
    return NumberField(minpoly, gen)


QQ = NumberField([0, 1], "x")


class FieldElement:
    """Immutable element c0 + c1*a + ... of a :class:`NumberField`."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def _other(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                if other.field.is_rational():
                    return self.field.from_coeffs([other.coeffs[0]])
                if self.field.is_rational():
                    raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_coeffs([other])
        return NotImplemented

    def _lift(self, other):
        # Q elements meeting a larger field are promoted
        if (
            isinstance(other, FieldElement)
            and self.field.is_rational()
            and not other.field.is_rational()
        ):
            return other.field.from_coeffs([self.coeffs[0]]), other
        o = self._other(other)
        return self, o

    def __add__(self, other):
        if not isinstance(other, (FieldElement, int, Fraction)):
            return NotImplemented
        a, b = self._lift(other)
        return FieldElement(a.field, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, (FieldElement, int, Fraction)):
            return NotImplemented
        a, b = self._lift(other)
        return FieldElement(a.field, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, tuple(x * other for x in self.coeffs))
        if not isinstance(other, FieldElement):
            return NotImplemented
        a, b = self._lift(other)
        K = a.field
        if K.degree == 1:
            return FieldElement(K, (a.coeffs[0] * b.coeffs[0],))
        prod = [Fraction(0)] * (2 * K.degree - 1)
        for i, x in enumerate(a.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[i + j] += x * y
        return FieldElement(K, _reduce(K, prod))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        K = self.field
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if K.degree == 1:
            return FieldElement(K, (1 / self.coeffs[0],))
        g, s = _poly_xgcd(list(self.coeffs), list(K.minpoly))
        if len(g) != 1:
            raise DivisionByZero(f"{self} is a zero divisor modulo the minimal polynomial")
        return K.from_coeffs(s)

    def __truediv__(self, other):
        if not isinstance(other, (FieldElement, int, Fraction)):
            return NotImplemented
        a, b = self._lift(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            if self.field.is_rational() or other.field.is_rational():
                return (
                    self.is_rational() and other.is_rational()
                    and self.coeffs[0] == other.coeffs[0]
                )
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.field, self.coeffs))

    def __str__(self):
        return format_poly(self.coeffs, self.field.gen)

    def __repr__(self):
        return f"FieldElement({self})"


def fe_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply ``op`` in {add, sub, mul, div}; both operands must share a field."""
    if isinstance(a, FieldElement) and isinstance(b, FieldElement) and a.field != b.field:
        raise FieldMismatch(f"{a.field!r} vs {b.field!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# matrices

class ExactMatrix:
    """Dense row-major matrix of :class:`FieldElement` entries."""

    __slots__ = ("field", "rows")

    def __init__(self, field: NumberField, rows: Iterable[Iterable]):
        self.field = field
        self.rows = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        if len({len(r) for r in self.rows}) > 1:
            raise ValueError("ragged matrix")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"ExactMatrix([{body}])"

    def apply(self, vec: Sequence[FieldElement]) -> list[FieldElement]:
        if len(vec) != self.ncols:
            raise ValueError("dimension mismatch")
        out = []
        for row in self.rows:
            acc = self.field.zero
            for x, v in zip(row, vec):
                if x and v:
                    acc = acc + x * v
            out.append(acc)
        return out

    def rref(self):
        return mat_rref(self)

    def rank(self) -> int:
        return mat_rank(self)

    def nullspace(self):
        return mat_nullspace(self)

    def solve(self, rhs):
        return mat_solve(self, rhs)


def _as_matrix(M, field=None) -> ExactMatrix:
    if isinstance(M, ExactMatrix):
        return M
    return ExactMatrix(field or QQ, M)


def mat_rref(M) -> tuple[ExactMatrix, list[int]]:
    """Reduced row-echelon form and the (strictly increasing) pivot columns.

    The pivot in each column is the first nonzero entry at or below the
    current row; no other pivoting strategy is used.
    """
    M = _as_matrix(M)
    K = M.field
    rows = [list(r) for r in M.rows]
    nrows, ncols = M.nrows, M.ncols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return ExactMatrix(K, rows), pivots


def mat_rank(M) -> int:
    return len(mat_rref(M)[1])


def mat_nullspace(M) -> list[list[FieldElement]]:
    """Basis of {v : M v = 0}; each vector has one free variable set to 1."""
    M = _as_matrix(M)
    R, pivots = mat_rref(M)
    K = M.field
    ncols = M.ncols
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [K.zero] * ncols
        v[fcol] = K.one
        for i, pc in enumerate(pivots):
            v[pc] = -R.rows[i][fcol]
        basis.append(v)
    return basis


def mat_solve(M, rhs: Sequence) -> list[FieldElement]:
    """Solve M x = rhs for square invertible M."""
    M = _as_matrix(M)
    K = M.field
    n = M.nrows
    if M.ncols != n:
        raise Singular(f"matrix is {M.nrows}x{M.ncols}, not square")
    if len(rhs) != n:
        raise ValueError("right-hand side has wrong length")
    aug = ExactMatrix(K, [list(row) + [K.coerce(b)] for row, b in zip(M.rows, rhs)])
    R, pivots = mat_rref(aug)
    if pivots != list(range(n)):
        raise Singular(f"matrix has rank {len([p for p in pivots if p < n])} < {n}")
    return [R.rows[i][n] for i in range(n)]
