"""Truncated q-expansions with exact coefficients.

A :class:`QExpansion` stores the coefficients a(n) for first <= n < prec
densely; a(n) = 0 is known exactly for n < first.  ``prec`` is exclusive,
matching the usual ``+ O(q^prec)`` notation.  The canonical zero to
precision P has ``first == prec == P`` and no stored coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

from .algebra import QQ, FieldElement, NumberField
from .characters import (
    DirichletCharacter,
    chi_power,
    chi_product,
    minus4,
    trivial,
    warn_if_odd,
)
from .errors import FieldMismatch, MetaError, PrecisionError


def _lcm(a, b):
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class FormMeta:
    """Weight numerator, level and character of a form.

    ``weight_num`` is twice the weight: 7 means weight 7/2, 8 means weight 4.
    """

    weight_num: int
    level: int
    character: DirichletCharacter

    def __post_init__(self):
        if self.level < 1:
            raise MetaError(f"level must be positive, got {self.level}")
        if self.halfint and self.level % 4:
            raise MetaError(f"half-integral weight needs 4 | N, got N={self.level}")
        if self.level % self.character.modulus:
            raise MetaError(
                f"character modulus {self.character.modulus} does not divide level {self.level}"
            )
        if self.halfint:
            warn_if_odd(self.character, "half-integral weight form")

    @property
    def halfint(self) -> bool:
        return self.weight_num % 2 == 1


def product_meta(k: int, chi: DirichletCharacter) -> DirichletCharacter:
    """Character of f*Theta for f of weight k/2 and character chi."""
    return chi_product(chi, chi_power(minus4(), (k + 1) // 2))


@dataclass(frozen=True, eq=False)
class QExpansion:
    field: NumberField
    first: int
    prec: int
    coeffs: tuple
    meta: Optional[FormMeta] = None
    comments: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.first < 0:
            raise ValueError("first exponent must be >= 0")
        if self.prec < self.first:
            raise ValueError(f"prec {self.prec} < first {self.first}")
        if len(self.coeffs) != self.prec - self.first:
            raise ValueError(
                f"expected {self.prec - self.first} coefficients, got {len(self.coeffs)}"
            )
        for c in self.coeffs:
            if not isinstance(c, FieldElement) or c.field != self.field:
                raise FieldMismatch("coefficient outside the expansion's field")

    # construction -------------------------------------------------------
    @classmethod
    def from_list(cls, coeffs: Sequence, prec: Optional[int] = None, first: int = 0,
                  field: NumberField = QQ, meta: Optional[FormMeta] = None) -> "QExpansion":
        """Build from values for exponents first, first+1, ...; pads with zeros up to ``prec``."""
        vals = [field.coerce(c) for c in coeffs]
        if prec is None:
            prec = first + len(vals)
        if first + len(vals) > prec:
            raise ValueError("more coefficients than the precision allows")
        vals += [field.zero] * (prec - first - len(vals))
        return cls(field, first, prec, tuple(vals), meta)

    @classmethod
    def from_dict(cls, terms: dict, prec: int, field: NumberField = QQ,
                  meta: Optional[FormMeta] = None) -> "QExpansion":
        """Build from a sparse {exponent: coefficient} mapping."""
        vals = [field.zero] * prec
        for n, c in terms.items():
            if not 0 <= n < prec:
                raise ValueError(f"exponent {n} outside [0, {prec})")
            vals[n] = field.coerce(c)
        return cls(field, 0, prec, tuple(vals), meta).normalize()

    @classmethod
    def zero(cls, prec: int, field: NumberField = QQ, meta=None) -> "QExpansion":
        return cls(field, prec, prec, (), meta)

    @classmethod
    def one(cls, prec: int, field: NumberField = QQ) -> "QExpansion":
        return cls.from_list([1], prec=prec, field=field)

    # access -------------------------------------------------------------
    def __getitem__(self, n: int) -> FieldElement:
        return self.coeff(n)

    def coeff(self, n: int) -> FieldElement:
        if n < 0:
            raise IndexError("negative exponent")
        if n >= self.prec:
            raise PrecisionError(f"a({n}) unknown: series is O(q^{self.prec})")
        if n < self.first:
            return self.field.zero
        return self.coeffs[n - self.first]

    def terms(self):
        """Yield (n, a(n)) for each nonzero stored coefficient."""
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.first + i, c

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> Optional[int]:
        """Least n with a(n) != 0, or None if zero to precision."""
        return next((n for n, _ in self.terms()), None)

    def normalize(self) -> "QExpansion":
        v = self.valuation()
        if v is None:
            if not self.coeffs and self.first == self.prec:
                return self
            return QExpansion(self.field, self.prec, self.prec, (), self.meta)
        if v == self.first:
            return self
        return QExpansion(self.field, v, self.prec, self.coeffs[v - self.first:], self.meta)

    def truncate(self, prec: int) -> "QExpansion":
        prec = min(prec, self.prec)
        first = min(self.first, prec)
        return QExpansion(self.field, first, prec, self.coeffs[: prec - first], self.meta).normalize()

    def with_meta(self, meta: Optional[FormMeta]) -> "QExpansion":
        return QExpansion(self.field, self.first, self.prec, self.coeffs, meta, self.comments)

    def change_field(self, K: NumberField) -> "QExpansion":
        if K == self.field and K is self.field:
            return self
        return QExpansion(K, self.first, self.prec, tuple(K.coerce(c) for c in self.coeffs),
                          self.meta)

    def dense(self, start: int = 0, stop: Optional[int] = None) -> list[FieldElement]:
        stop = self.prec if stop is None else stop
        return [self.coeff(n) for n in range(start, stop)]

    # equality is on the coefficient function, precision and metadata
    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.prec != other.prec or self.field != other.field or self.meta != other.meta:
            return False
        a, b = self.normalize(), other.normalize()
        return a.first == b.first and a.coeffs == b.coeffs

    def __hash__(self):
        a = self.normalize()
        return hash((a.first, a.prec, a.coeffs))

    def __add__(self, other):
        return qx_add(self, other)

    def __sub__(self, other):
        return qx_add(self, qx_scale(-1, other))

    def __neg__(self):
        return qx_scale(-1, self)

    def __mul__(self, other):
        if isinstance(other, QExpansion):
            return qx_mul(self, other)
        return qx_scale(other, self)

    def __rmul__(self, other):
        return qx_scale(other, self)

    def __str__(self):
        parts = []
        for n, c in self.terms():
            cs = str(c)
            mono = "" if n == 0 else ("q" if n == 1 else f"q^{n}")
            if not mono:
                parts.append(cs if " " not in cs else f"({cs})")
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append((f"({cs})" if " " in cs else cs) + "*" + mono)
        body = " + ".join(parts).replace("+ -", "- ") or "0"
        return f"{body} + O(q^{self.prec})"

    def __repr__(self):
        return f"QExpansion({self})"


def _common_field(f: QExpansion, g: QExpansion) -> NumberField:
    if f.field == g.field:
        return f.field
    if g.field.is_rational():
        return f.field
    if f.field.is_rational():
        return g.field
    raise FieldMismatch(f"{f.field!r} vs {g.field!r}")


def _add_meta(fm: Optional[FormMeta], gm: Optional[FormMeta]) -> Optional[FormMeta]:
    if fm is None or gm is None:
        return None
    if fm == gm:
        return fm
    if fm.weight_num == gm.weight_num and fm.character.same_values(gm.character):
        char = fm.character if fm.character.modulus >= gm.character.modulus else gm.character
        return FormMeta(fm.weight_num, _lcm(fm.level, gm.level), char)
    return None


def qx_add(f: QExpansion, g: QExpansion) -> QExpansion:
    """Coefficientwise sum; precision is the smaller of the two."""
    K = _common_field(f, g)
    prec = min(f.prec, g.prec)
    first = min(f.first, g.first, prec)
    if f.is_zero() and f.meta is None:
        meta = g.meta
    elif g.is_zero() and g.meta is None:
        meta = f.meta
    else:
        meta = _add_meta(f.meta, g.meta)
    coeffs = tuple(K.coerce(f.coeff(n) + g.coeff(n)) for n in range(first, prec))
    return QExpansion(K, first, prec, coeffs, meta).normalize()


def qx_scale(c, f: QExpansion) -> QExpansion:
    K = f.field
    if isinstance(c, FieldElement) and not c.field.is_rational():
        if K.is_rational():
            K = c.field
        elif c.field != K:
            raise FieldMismatch(f"{c.field!r} vs {K!r}")
    c = K.coerce(c)
    if not c:
        return QExpansion.zero(f.prec, K, f.meta)
    return QExpansion(K, f.first, f.prec, tuple(K.coerce(c * x) for x in f.coeffs), f.meta)


def _mul_meta(fm, gm):
    if fm is None or gm is None:
        return None
    return FormMeta(fm.weight_num + gm.weight_num, _lcm(fm.level, gm.level),
                    chi_product(fm.character, gm.character))


def qx_mul(f: QExpansion, g: QExpansion) -> QExpansion:
    """Cauchy product c(n) = sum_{i+j=n} a(i) b(j).

    Inputs are normalised first, so ``first`` is the sum of valuations and
    the result is exact for n < min(first_f + prec_g, first_g + prec_f).
    Metadata: weights add, levels take the lcm, characters multiply.
    """
    K = _common_field(f, g)
    f, g = f.normalize(), g.normalize()
    first = f.first + g.first
    prec = min(f.first + g.prec, g.first + f.prec)
    meta = _mul_meta(f.meta, g.meta)
    if prec <= first:
        return QExpansion.zero(max(prec, 0), K, meta)
    out = [K.zero] * (prec - first)
    gt = list(g.terms())
    for i, a in f.terms():
        if i - f.first >= len(out):
            break
        for j, b in gt:
            n = i + j - first
            if n >= len(out):
                break
            out[n] = out[n] + a * b
    return QExpansion(K, first, prec, tuple(K.coerce(x) for x in out), meta).normalize()


# ---------------------------------------------------------------------------
# theta series and operators

THETA_META = FormMeta(1, 4, trivial(4))


def theta(prec: int) -> QExpansion:
    """1 + 2*sum_{n>=1} q^(n^2) to O(q^prec)."""
    if prec < 1:
        raise ValueError("prec must be >= 1")
    terms = {0: 1}
    n = 1
    while n * n < prec:
        terms[n * n] = 2
        n += 1
    return QExpansion.from_dict(terms, prec, meta=THETA_META)


def theta1(prec: int) -> QExpansion:
    """(Theta - V(4)Theta)/2 = sum over odd n > 0 of q^(n^2)."""
    if prec < 1:
        raise ValueError("prec must be >= 1")
    m = (prec - 1) // 4 + 2
    diff = qx_add(theta(4 * m), qx_scale(-1, op_V(4, theta(m))))
    return qx_scale(QQ(1) / 2, diff).truncate(prec)


def theta_twisted(psi: DirichletCharacter, prec: int) -> QExpansion:
    """sum_{n>=0} psi(n) b(n) q^(n^2), with b(0) = 1 and b(n) = 2 otherwise."""
    if prec < 1:
        raise ValueError("prec must be >= 1")
    warn_if_odd(psi, "twisted theta series")
    terms = {}
    n = 0
    while n * n < prec:
        v = psi.value(n) * (1 if n == 0 else 2)
        if v:
            terms[n * n] = v
        n += 1
    meta = FormMeta(1, 4 * psi.modulus ** 2, psi) if psi.is_even else None
    return QExpansion.from_dict(terms, prec, meta=meta)


def op_U(d: int, f: QExpansion) -> QExpansion:
    """a(n) -> a(d n); precision ceil(prec/d).  Level and character are kept."""
    if d < 1:
        raise ValueError("d must be >= 1")
    prec = -(-f.prec // d)
    coeffs = tuple(f.coeff(d * n) for n in range(prec))
    return QExpansion(f.field, 0, prec, coeffs, f.meta).normalize()


def op_V(d: int, f: QExpansion) -> QExpansion:
    """q^n -> q^(d n); precision d*(prec-1)+1 and level multiplied by d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    prec = d * (f.prec - 1) + 1 if f.prec > 0 else 0
    meta = None if f.meta is None else FormMeta(f.meta.weight_num, f.meta.level * d,
                                                f.meta.character)
    vals = [f.field.zero] * prec
    for n, c in f.terms():
        vals[d * n] = c
    return QExpansion(f.field, 0, prec, tuple(vals), meta).normalize()


def residue_slice(f: QExpansion, r: int, m: int, compose_uv: bool = False) -> QExpansion:
    """Keep the terms a(n) q^n with n = r (mod m).

    With ``compose_uv`` and (r, m) = (2, 4) the result is also computed as
    V(2)U(2)f - V(4)U(4)f and the two are compared on their common window.
    """
    if not 0 <= r < m:
        raise ValueError(f"need 0 <= r < m, got r={r}, m={m}")
    vals = tuple(c if (f.first + i) % m == r else f.field.zero for i, c in enumerate(f.coeffs))
    out = QExpansion(f.field, f.first, f.prec, vals, f.meta).normalize()
    if compose_uv and (r, m) == (2, 4):
        from .errors import ConsistencyError

        g = uv_two_mod_four(f)
        if g.truncate(g.prec) != out.truncate(g.prec).with_meta(g.meta):
            raise ConsistencyError("V(2)U(2) - V(4)U(4) disagrees with the direct residue filter")
    return out


def uv_two_mod_four(f: QExpansion) -> QExpansion:
    """V(2)U(2)f - V(4)U(4)f, the part of f supported on n = 2 (mod 4)."""
    return qx_add(op_V(2, op_U(2, f)), qx_scale(-1, op_V(4, op_U(4, f))))
