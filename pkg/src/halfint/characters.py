"""Dirichlet characters of order at most 2.

Supported kinds are the trivial character mod N, the nontrivial character
mod 4, Kronecker-symbol characters n -> (d/n) for discriminants d, and
pointwise products of these.  Spec strings: ``triv:N``, ``minus4``,
``kron:d``, ``prod(spec,spec,...)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

from .algebra import QQ, FieldElement
from .errors import CharacterSpecError


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n >= 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    # factor out 2 from n
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # now n odd: Jacobi symbol (a/n)
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class DirichletCharacter:
    """An order-<=2 Dirichlet character; build with :func:`trivial`,
    :func:`minus4`, :func:`kron` or :func:`chi_product`."""

    modulus: int
    kind: str  # "trivial" | "minus4" | "kronecker" | "product"
    disc: int = 0
    factors: tuple = field(default=(), repr=False)

    def value(self, n: int) -> int:
        N = self.modulus
        r = n % N
        if gcd(r, N) != 1:
            return 0
        if self.kind == "trivial":
            return 1
        if self.kind == "minus4":
            return 1 if r % 4 == 1 else -1
        if self.kind == "kronecker":
            return kronecker(self.disc, r)
        out = 1
        for f in self.factors:
            out *= f.value(n)
        return out

    def __call__(self, n: int) -> FieldElement:
        return QQ(self.value(n))

    @cached_property
    def order(self) -> int:
        N = self.modulus
        if all(self.value(n) == 1 for n in range(N) if gcd(n, N) == 1):
            return 1
        return 2

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def is_even(self) -> bool:
        return self.value(-1) == 1

    def spec(self) -> str:
        if self.kind == "trivial":
            return f"triv:{self.modulus}"
        if self.kind == "minus4":
            return "minus4"
        if self.kind == "kronecker":
            return f"kron:{self.disc}"
        return "prod(" + ",".join(f.spec() for f in self.factors) + ")"

    def __str__(self):
        return self.spec()

    def same_values(self, other: "DirichletCharacter") -> bool:
        """Pointwise equality on [0, lcm of moduli)."""
        L = _lcm(self.modulus, other.modulus)
        return all(self.value(n) == other.value(n) for n in range(L))


def trivial(N: int) -> DirichletCharacter:
    if N < 1:
        raise CharacterSpecError(f"modulus must be positive, got {N}")
    return DirichletCharacter(N, "trivial")


def minus4() -> DirichletCharacter:
    return DirichletCharacter(4, "minus4")


def kron(d: int) -> DirichletCharacter:
    """n -> (d/n) for a discriminant d (d = 0 or 1 mod 4), modulus |d|."""
    if d == 0 or d % 4 not in (0, 1):
        raise CharacterSpecError(f"kron:{d} needs a nonzero discriminant (d = 0 or 1 mod 4)")
    if d == 1:
        return trivial(1)
    if d == -4:
        return minus4()
    return DirichletCharacter(abs(d), "kronecker", disc=d)


def chi_eval(chi: DirichletCharacter, n: int) -> FieldElement:
    return chi(n)


def chi_order(chi: DirichletCharacter) -> int:
    return chi.order


def _atoms(chi):
    if chi.kind == "product":
        for f in chi.factors:
            yield from _atoms(f)
    else:
        yield chi


def chi_product(*chars: DirichletCharacter) -> DirichletCharacter:
    """Pointwise product; the modulus is the lcm (no conductor reduction).

    The result is canonicalised: trivial factors are absorbed into the
    modulus and pairs of equal quadratic factors cancel.
    """
    L = 1
    counts: dict[str, DirichletCharacter] = {}
    odd: dict[str, bool] = {}
    for c in chars:
        L = _lcm(L, c.modulus)
        for a in _atoms(c):
            if a.kind == "trivial":
                continue
            s = a.spec()
            counts[s] = a
            odd[s] = not odd.get(s, False)
    atoms = [counts[s] for s in sorted(counts) if odd[s]]
    if not atoms:
        return trivial(L)
    inner = 1
    for a in atoms:
        inner = _lcm(inner, a.modulus)
    if inner != L:
        atoms.append(trivial(L))
    if len(atoms) == 1:
        return atoms[0]
    return DirichletCharacter(L, "product", factors=tuple(atoms))


def chi_power(chi: DirichletCharacter, e: int) -> DirichletCharacter:
    if e % 2 == 0:
        return trivial(chi.modulus)
    return chi


def warn_if_odd(chi: DirichletCharacter, context: str) -> None:
    if not chi.is_even:
        warnings.warn(f"{context}: character {chi.spec()} is odd; an even character is expected",
                      stacklevel=3)


def parse_character(spec: str) -> DirichletCharacter:
    """Parse ``triv:N``, ``minus4``, ``kron:d`` or ``prod(a,b,...)``."""
    s = spec.strip()
    try:
        if s == "minus4":
            return minus4()
        if s.startswith("triv:"):
            return trivial(int(s[5:]))
        if s.startswith("kron:"):
            return kron(int(s[5:]))
    except ValueError as exc:
        if isinstance(exc, CharacterSpecError):
            raise
        raise CharacterSpecError(f"bad character spec {spec!r}") from None
    if s.startswith("prod(") and s.endswith(")"):
        parts, depth, cur = [], 0, ""
        for ch in s[5:-1]:
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
                continue
            depth += ch == "("
            depth -= ch == ")"
            cur += ch
        parts.append(cur)
        if len(parts) < 2 or any(not p.strip() for p in parts):
            raise CharacterSpecError(f"bad character spec {spec!r}")
        return chi_product(*(parse_character(p) for p in parts))
    raise CharacterSpecError(f"bad character spec {spec!r}")
