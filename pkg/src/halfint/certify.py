"""Finite-window certification procedures.

* :func:`recover_cofactor`: divide a product series by a known factor,
  term by term, exactly.
* :func:`certify_span`: express a target as a combination of a basis from
  coefficients up to a Sturm bound, then check every supplied coefficient.
* :func:`select_pivots` / :func:`certify_rank2`: the two-dimensional fast
  path for a basis (f1, f2) with f1 in the plus space and f2 not.
* :func:`kohnen_check`: plus-space membership up to the Kohnen bound.
* :func:`eigenspace_kernel`: common kernel of T(p^2) - lambda_p on a basis.

Every procedure returns a :class:`Certificate`.  Verdicts depend only on the
supplied coefficients; modularity of the inputs is assumed, not checked.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .algebra import ExactMatrix, FieldElement, NumberField, mat_nullspace, mat_rref, mat_solve
from .bounds import SturmBound, kohnen_bound, sturm_bound_halfint
from .characters import chi_product
from .errors import (
    ConsistencyError,
    EmptyWindow,
    FieldMismatch,
    InsufficientRows,
    MetaError,
    NoPivotInWindow,
    NotDivisible,
    PivotViolation,
    PrecisionTooSmall,
    RankDeficient,
    ShapeMismatch,
    ZeroLeadingCoefficient,
)
from .qseries import FormMeta, QExpansion, qx_add, qx_mul, qx_scale, residue_slice, uv_two_mod_four


class Verdict(Enum):
    CERTIFIED = "Certified"
    NOT_IN_SPAN = "NotInSpan"
    CONSISTENT_UP_TO = "ConsistentUpTo"
    NOT_IN_PLUS_SPACE = "NotInPlusSpace"


class Kind(Enum):
    SPAN = "SpanCertificate"
    RECOVERY = "RecoveryCertificate"
    KOHNEN = "KohnenVerdict"
    KERNEL = "KernelBasis"


@dataclass(frozen=True)
class Certificate:
    kind: Kind
    verdict: Verdict
    field: NumberField
    bound: Optional[SturmBound] = None
    lambdas: tuple = ()
    pivot_rows: tuple = ()
    residual_checked_rows: int = 0
    witness: Optional[int] = None
    window_complete: bool = True
    forms: tuple = ()
    extra: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def verdict_text(self) -> str:
        v = self.verdict.value
        if self.verdict in (Verdict.NOT_IN_SPAN, Verdict.NOT_IN_PLUS_SPACE, Verdict.CONSISTENT_UP_TO):
            return f"{v}({self.witness})"
        return v


def _common_field(series: Sequence[QExpansion]) -> NumberField:
    """The single non-rational field among the inputs, else Q."""
    fields = {f.field for f in series if not f.field.is_rational()}
    if len(fields) > 1:
        raise FieldMismatch("series live in different number fields: "
                            + ", ".join(sorted(K.spec() for K in fields)))
    return fields.pop() if fields else series[0].field


def _field_note(K: NumberField) -> str:
    return f"values lie in {K.spec()}"


MODULARITY_NOTE = "conditional on modularity of the input series"


# ---------------------------------------------------------------------------
# cofactor recovery

def _quotient_meta(pm: Optional[FormMeta], fm: Optional[FormMeta]) -> Optional[FormMeta]:
    if pm is None or fm is None or pm.weight_num <= fm.weight_num:
        return None
    try:
        return FormMeta(pm.weight_num - fm.weight_num, pm.level,
                        chi_product(pm.character, fm.character))
    except MetaError:
        return None


def recover_cofactor(product: QExpansion, factor: QExpansion, meta="auto"):
    """Solve product = factor * h for h, one coefficient at a time.

    With c the product coefficients and a the factor's, a(n0) != 0 its
    leading coefficient, each new coefficient is
    ``h(j) = (c(n0 + j) - sum_{i>=1} a(n0 + i) h(j - i)) / a(n0)``,
    so h has coefficients in the field of c and a.  Returns ``(h, cert)``.

    ``meta="auto"`` derives h's metadata from the two inputs (weights
    subtract, level of the product, characters multiply); pass a
    :class:`FormMeta` or ``None`` to override.
    """
    K = _common_field([product, factor])
    fac = factor.normalize().change_field(K)
    if fac.valuation() is None:
        raise ZeroLeadingCoefficient("factor is zero to its precision; no leading coefficient")
    prod = product.normalize().change_field(K)
    n0 = fac.first
    lead_inv = fac.coeffs[0].inverse()
    h_first = prod.first - n0
    h_prec = prod.prec - n0
    if prod.valuation() is not None and h_first < 0:
        raise NotDivisible(
            f"product starts at q^{prod.first} but the factor starts at q^{n0}")
    if h_prec <= 0:
        raise PrecisionTooSmall(
            f"product is O(q^{prod.prec}); nothing is recoverable for a factor starting at q^{n0}")
    h_first = max(h_first, 0) if prod.valuation() is not None else h_prec
    depth = h_prec - h_first
    if depth > 0 and fac.prec - n0 < depth:
        raise PrecisionTooSmall(
            f"factor known to O(q^{fac.prec}); need O(q^{n0 + depth}) to recover {depth} terms")
    a = [fac.coeff(n0 + i) for i in range(depth)]
    h = []
    for j in range(depth):
        s = prod.coeff(n0 + h_first + j)
        for i in range(1, j + 1):
            if a[i]:
                s = s - a[i] * h[j - i]
        h.append(s * lead_inv)
    if meta == "auto":
        meta = _quotient_meta(product.meta, factor.meta)
    hx = QExpansion(K, h_first, h_prec, tuple(h), meta).normalize()
    check = qx_mul(fac, hx.with_meta(None))
    window = min(check.prec, prod.prec)
    if check.truncate(window) != prod.with_meta(None).truncate(window):
        raise ConsistencyError("factor * recovered cofactor does not reproduce the product")
    cert = Certificate(
        kind=Kind.RECOVERY,
        verdict=Verdict.CERTIFIED,
        field=K,
        residual_checked_rows=window,
        forms=(hx,),
        extra={"induction_steps": depth, "cofactor_first": hx.first, "cofactor_prec": h_prec,
               "factor_leading_exponent": n0},
        notes=(_field_note(K),
               f"product = factor * cofactor verified for all n < {window}"),
    )
    return hx, cert


# ---------------------------------------------------------------------------
# span certification

def first_independent_rows(rows: Sequence[Sequence[FieldElement]], K: NumberField) -> list[int]:
    """Indices of the lexicographically first maximal independent set of rows."""
    if not rows:
        return []
    transpose = ExactMatrix(K, [list(col) for col in zip(*rows)])
    return mat_rref(transpose)[1]


def _linear_combination(lambdas, basis, K):
    acc = None
    for lam, f in zip(lambdas, basis):
        term = qx_scale(lam, f.change_field(K).with_meta(None))
        acc = term if acc is None else qx_add(acc, term)
    return acc.with_meta(basis[0].meta if all(f.meta == basis[0].meta for f in basis) else None)


def certify_span(basis: Sequence[QExpansion], target: QExpansion, bound: SturmBound,
                 allow_short_window: bool = False) -> Certificate:
    """Certify target = sum lambda_i basis_i from coefficients 1..floor(B).

    The rank of the floor(B) x r coefficient matrix must be r; the first r
    independent rows form an invertible C and lambda = C^-1 (target at those
    rows).  The residual is then checked on every supplied row.  With
    ``allow_short_window`` a window shorter than floor(B) is accepted and
    the certificate records ``window_complete=False``.
    """
    r = len(basis)
    if r == 0:
        raise ValueError("basis is empty")
    K = _common_field(list(basis) + [target])
    basis = [f.change_field(K) for f in basis]
    target = target.change_field(K)
    B = bound.floor
    if B < r:
        raise InsufficientRows(f"floor(B) = {B} is smaller than the basis size {r}")
    basis_top = min(f.prec for f in basis) - 1
    supplied_top = min(basis_top, target.prec - 1)
    top = min(B, supplied_top)
    complete = top >= B
    if not complete and not allow_short_window:
        raise InsufficientRows(
            f"need coefficients a(1..{B}); basis known to n <= {basis_top}, "
            f"target to n <= {target.prec - 1}")
    rows = [[f.coeff(n) for f in basis] for n in range(1, top + 1)]
    independent = first_independent_rows(rows, K)
    if len(independent) < r:
        if complete:
            msg = (f"coefficient matrix for n <= {B} has rank {len(independent)} < {r}: these "
                   f"series cannot be a basis of forms of weight {bound.k}/2 and level {bound.N}")
        else:
            msg = (f"coefficient matrix for n <= {top} has rank {len(independent)} < {r} "
                   f"(window shorter than floor(B) = {B})")
        raise RankDeficient(msg)
    pivots = [i + 1 for i in independent]
    C = ExactMatrix(K, [rows[i] for i in independent])
    lambdas = mat_solve(C, [target.coeff(n) for n in pivots])
    witness = None
    checked = 0
    for n in range(1, supplied_top + 1):
        checked += 1
        acc = K.zero
        for lam, f in zip(lambdas, basis):
            c = f.coeff(n)
            if c and lam:
                acc = acc + lam * c
        if acc != target.coeff(n):
            witness = n
            break
    notes = [_field_note(K), bound.describe(), MODULARITY_NOTE]
    if not complete:
        notes.append(f"supplied window n <= {top} is shorter than floor(B) = {B}")
    if witness is not None:
        return Certificate(Kind.SPAN, Verdict.NOT_IN_SPAN, K, bound, tuple(lambdas),
                           tuple(pivots), checked, witness, complete, notes=tuple(notes))
    return Certificate(Kind.SPAN, Verdict.CERTIFIED, K, bound, tuple(lambdas), tuple(pivots),
                       checked, None, complete,
                       forms=(_linear_combination(lambdas, basis, K),),
                       notes=tuple(notes))


# ---------------------------------------------------------------------------
# Kohnen plus space

def forbidden_residues(k: int) -> tuple[int, ...]:
    """Residues mod 4 where plus-space coefficients vanish: 2 and (-1)^((k+1)/2)."""
    return tuple(sorted({2, (-1) ** ((k + 1) // 2) % 4}))


def _resolve_kN(f, k, N):
    if k is None:
        if f.meta is None:
            raise ValueError("weight numerator k is required")
        k = f.meta.weight_num
    if N is None and f.meta is not None:
        N = f.meta.level
    return k, N


def select_pivots(f1: QExpansion, f2: QExpansion, k: Optional[int] = None,
                  N: Optional[int] = None) -> tuple[int, int]:
    """Least (m0, n0) with m0 in a forbidden residue class, a1(m0) = 0 and
    a2(m0) != 0, and a1(n0) != 0.  Both are searched below the known
    precision and, when the level is known, up to the Kohnen bound."""
    k, N = _resolve_kN(f1, k, N)
    if N is None:
        N = f2.meta.level if f2.meta is not None else None
    top = min(f1.prec, f2.prec) - 1
    if N is not None:
        top = min(top, kohnen_bound(k, N).floor)
    allowed = forbidden_residues(k)
    bad1 = next((n for n in range(1, min(f1.prec - 1, top) + 1)
                 if n % 4 in allowed and f1.coeff(n)), None)
    if bad1 is not None:
        warnings.warn(f"f1 has a nonzero coefficient at n={bad1} in a forbidden residue class; "
                      "it does not look like a plus-space element", stacklevel=2)
    n0 = next((n for n in range(1, top + 1) if f1.coeff(n)), None)
    m0 = next((n for n in range(1, top + 1)
               if n % 4 in allowed and not f1.coeff(n) and f2.coeff(n)), None)
    if n0 is None or m0 is None:
        reasons = []
        if n0 is None:
            reasons.append(f"a1(n) = 0 for all 1 <= n <= {top}")
        if m0 is None:
            support2 = [n for n in range(1, top + 1) if n % 4 in allowed and f2.coeff(n)]
            if not support2:
                reasons.append(f"a2(m) = 0 for every m = {allowed} (mod 4) with m <= {top}"
                               " (f2 looks like a plus-space element)")
            else:
                reasons.append(f"a1(m) != 0 wherever a2(m) != 0 for m = {allowed} (mod 4), "
                               f"m <= {top}")
        raise NoPivotInWindow("no valid pivot in window: " + "; ".join(reasons))
    return m0, n0


def certify_rank2(f1: QExpansion, f2: QExpansion, k: Optional[int], target_values,
                  N: Optional[int] = None, pivots: Optional[tuple[int, int]] = None) -> Certificate:
    """Solve for (lambda1, lambda2) from the target's values at (m0, n0).

    lambda2 = a_f(m0)/a2(m0) and lambda1 = (a_f(n0) - lambda2 a2(n0))/a1(n0).
    """
    k, N = _resolve_kN(f1, k, N)
    m0, n0 = pivots if pivots is not None else select_pivots(f1, f2, k, N)
    K = _common_field([f1, f2])
    am, an = (K.coerce(v) for v in target_values)
    if f1.coeff(m0) or not f2.coeff(m0) or not f1.coeff(n0):
        raise PivotViolation(
            f"need a1(m0)=0, a2(m0)!=0, a1(n0)!=0 at (m0, n0) = ({m0}, {n0}); got "
            f"a1(m0)={f1.coeff(m0)}, a2(m0)={f2.coeff(m0)}, a1(n0)={f1.coeff(n0)}")
    lam2 = am / K.coerce(f2.coeff(m0))
    lam1 = (an - lam2 * f2.coeff(n0)) / K.coerce(f1.coeff(n0))
    bound = kohnen_bound(k, N) if N is not None else None
    notes = [_field_note(K)]
    if bound is not None:
        notes.append(bound.describe())
    notes.append(MODULARITY_NOTE)
    return Certificate(Kind.SPAN, Verdict.CERTIFIED, K, bound, (lam1, lam2), (m0, n0),
                       2, forms=(_linear_combination((lam1, lam2), [f1, f2], K),),
                       extra={"m0": m0, "n0": n0}, notes=tuple(notes))


def kohnen_check(f: QExpansion, k: Optional[int] = None, N: Optional[int] = None) -> Certificate:
    """Plus-space test: a(n) = 0 for n in the forbidden classes, 1 <= n <= B'.

    The n = 2 (mod 4) part is computed twice, by direct filtering and as
    V(2)U(2)f - V(4)U(4)f, and the two must agree.
    """
    k, N = _resolve_kN(f, k, N)
    if N is None:
        raise ValueError("level N is required")
    bound = kohnen_bound(k, N)
    forb = forbidden_residues(k)
    top = min(f.prec - 1, bound.floor)
    witness = next((n for n in range(1, top + 1) if n % 4 in forb and f.coeff(n)), None)

    # cross-check of the n = 2 (mod 4) scan through the U/V construction
    g = uv_two_mod_four(f)
    direct = residue_slice(f, 2, 4)
    if g.with_meta(None) != direct.with_meta(None).truncate(g.prec):
        raise ConsistencyError("U/V construction disagrees with the residue filter")
    uv_top = min(top, g.prec - 1)
    via_uv = next((n for n in range(1, uv_top + 1) if g.coeff(n)), None)
    via_filter = next((n for n in range(1, uv_top + 1) if n % 4 == 2 and f.coeff(n)), None)
    if via_uv != via_filter:
        raise ConsistencyError(f"n = 2 (mod 4) scan: U/V gives {via_uv}, filter gives {via_filter}")

    notes = [bound.describe(), f"forbidden residues mod 4: {list(forb)}",
             f"n = 2 (mod 4) scan cross-checked via V(2)U(2) - V(4)U(4) for n <= {uv_top}",
             MODULARITY_NOTE]
    if 1 in forb or 3 in forb:
        notes.append("odd forbidden class certified only up to the available precision")
    extra = {"forbidden_residues": list(forb), "scanned_up_to": top}
    if witness is not None:
        return Certificate(Kind.KOHNEN, Verdict.NOT_IN_PLUS_SPACE, f.field, bound,
                           residual_checked_rows=witness, witness=witness,
                           window_complete=top >= bound.floor, extra=extra, notes=tuple(notes))
    if f.prec > bound.floor:
        return Certificate(Kind.KOHNEN, Verdict.CERTIFIED, f.field, bound,
                           residual_checked_rows=top, extra=extra, notes=tuple(notes))
    return Certificate(Kind.KOHNEN, Verdict.CONSISTENT_UP_TO, f.field, bound,
                       residual_checked_rows=top, witness=top, window_complete=False,
                       extra=extra, notes=tuple(notes))


# ---------------------------------------------------------------------------
# Hecke eigenspace slicing

@dataclass(frozen=True)
class EigenSliceInput:
    basis: tuple
    operator_images: Mapping[int, Sequence[QExpansion]]
    eigenvalues: Mapping[int, object]


def eigenspace_kernel(inp: EigenSliceInput, window: Optional[range] = None) -> Certificate:
    """Exact nullspace of the rows b_{i,p}(n) - lambda_p a_i(n), n in window,
    over all supplied primes p."""
    basis = list(inp.basis)
    r = len(basis)
    if r == 0:
        raise ShapeMismatch("empty basis")
    primes = sorted(inp.operator_images)
    if not primes:
        raise ShapeMismatch("no operator images supplied")
    if set(primes) != set(inp.eigenvalues):
        raise ShapeMismatch(f"images given for primes {primes}, eigenvalues for "
                            f"{sorted(inp.eigenvalues)}")
    for p in primes:
        if len(inp.operator_images[p]) != r:
            raise ShapeMismatch(f"prime {p}: {len(inp.operator_images[p])} images for {r} basis forms")
    everything = basis + [g for p in primes for g in inp.operator_images[p]]
    K = _common_field(everything)
    common = min(f.prec for f in everything)
    if window is None:
        window = range(1, common)
    if len(window) == 0:
        raise EmptyWindow("window contains no exponents")
    if window.start < 0 or window[-1] >= common:
        raise ShapeMismatch(f"window {window.start}..{window[-1]} exceeds the common precision "
                            f"O(q^{common})")
    rows = []
    for p in primes:
        lam = K.coerce(inp.eigenvalues[p])
        images = inp.operator_images[p]
        for n in window:
            rows.append([K.coerce(images[i].coeff(n)) - lam * basis[i].coeff(n) for i in range(r)])
    kernel = mat_nullspace(ExactMatrix(K, rows))
    forms = tuple(_linear_combination(v, basis, K) for v in kernel)
    return Certificate(
        Kind.KERNEL, Verdict.CERTIFIED, K,
        residual_checked_rows=len(rows),
        forms=forms,
        extra={"kernel": [list(v) for v in kernel], "dimension": len(kernel),
               "primes": primes, "window": [window.start, window[-1]]},
        notes=(_field_note(K), f"kernel dimension {len(kernel)} of {r}"),
    )
