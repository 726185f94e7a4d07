"""Sturm-type bounds for half-integral weight forms on Gamma_0(N).

B_k(N) = k/24 * [SL2(Z) : Gamma_0(N)] bounds the number of leading
coefficients that must vanish before a form of weight k/2 is zero; the
Kohnen bound uses the index of Gamma_0(4N) instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .errors import BadLevel, BadWeight
from .qseries import QExpansion


def prime_divisors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def gamma0_index(N: int) -> int:
    """[SL2(Z) : Gamma_0(N)] = N * prod_{p | N} (1 + 1/p)."""
    if N < 1:
        raise BadLevel(f"level must be positive, got {N}")
    index = N
    for p in prime_divisors(N):
        index = index // p * (p + 1)
    return index


@dataclass(frozen=True)
class SturmBound:
    k: int
    N: int
    index: int
    bound: Fraction
    kohnen: bool = False

    @property
    def floor(self) -> int:
        return self.bound.numerator // self.bound.denominator

    def covers(self, n: int) -> bool:
        """Exact test n <= B."""
        return n <= self.bound

    def describe(self) -> str:
        level = f"4*{self.N}" if self.kohnen else str(self.N)
        return (f"B = {self.k}/24 * [SL2(Z):Gamma0({level})] = {self.k}*{self.index}/24"
                f" = {_fmt(self.bound)} (floor {self.floor})")


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _check(k: int, N: int) -> None:
    if k < 1 or k % 2 == 0:
        raise BadWeight(f"weight numerator k must be odd and positive, got {k}")
    if N < 1 or N % 4:
        raise BadLevel(f"level must be divisible by 4, got {N}")


def sturm_bound_halfint(k: int, N: int) -> SturmBound:
    _check(k, N)
    index = gamma0_index(N)
    return SturmBound(k, N, index, Fraction(k * index, 24))


def kohnen_bound(k: int, N: int) -> SturmBound:
    _check(k, N)
    index = gamma0_index(4 * N)
    return SturmBound(k, N, index, Fraction(k * index, 24), kohnen=True)


class Vanishing(Enum):
    CERTIFIED_ZERO = "CertifiedZero"
    NONZERO_AT = "NonzeroAt"
    INSUFFICIENT_PRECISION = "InsufficientPrecision"


@dataclass(frozen=True)
class VanishingResult:
    verdict: Vanishing
    bound: SturmBound
    n: Optional[int] = None  # least nonzero index, or precision needed

    def __str__(self):
        if self.verdict is Vanishing.CERTIFIED_ZERO:
            return "CertifiedZero (conditional on modularity of input)"
        if self.verdict is Vanishing.NONZERO_AT:
            return f"NonzeroAt({self.n})"
        return f"InsufficientPrecision(needed={self.n})"


def vanishing_test(f: QExpansion, k: Optional[int] = None, N: Optional[int] = None) -> VanishingResult:
    """Decide whether a(n) = 0 for all n <= B_k(N).

    Precision is checked first: a series known only below floor(B)+1 gets
    InsufficientPrecision even if a nonzero coefficient is visible.
    """
    if k is None or N is None:
        if f.meta is None:
            raise ValueError("weight and level must be given or carried by the series")
        k = f.meta.weight_num if k is None else k
        N = f.meta.level if N is None else N
    B = sturm_bound_halfint(k, N)
    if f.prec <= B.floor:
        return VanishingResult(Vanishing.INSUFFICIENT_PRECISION, B, B.floor + 1)
    for n in range(B.floor + 1):
        if f.coeff(n):
            return VanishingResult(Vanishing.NONZERO_AT, B, n)
    return VanishingResult(Vanishing.CERTIFIED_ZERO, B)
