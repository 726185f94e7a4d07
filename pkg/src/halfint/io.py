"""Text formats: ``.qexp`` files and certificate reports.

A ``.qexp`` file is UTF-8 with LF line endings::

    # optional comment lines
    field: Q[b]/(b^2 - b - 4)
    k: 5
    halfint: true
    N: 52
    character: kron:13
    first: 1
    prec: 6
    ---
    1,0
    0,0
    ...

``k``/``halfint``/``N``/``character`` are optional but come together.  Below
``---`` there is one line per exponent first..prec-1, each holding the
``degree`` rational coordinates c0,c1,... of the coefficient.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .algebra import QQ, FieldElement, NumberField, format_rational, parse_poly
from .bounds import SturmBound
from .characters import parse_character
from .errors import CharacterSpecError, FieldSpecError, MetaError, ParseError
from .qseries import FormMeta, QExpansion

HEADER_KEYS = ("field", "k", "halfint", "N", "character", "first", "prec")
META_KEYS = ("k", "halfint", "N", "character")


def parse_field(spec: str) -> NumberField:
    """``Q`` or ``Q[g]/(poly in g)``."""
    s = spec.strip()
    if s == "Q":
        return QQ
    if not (s.startswith("Q[") and "]/(" in s and s.endswith(")")):
        raise FieldSpecError(f"bad field spec {spec!r}; expected Q or Q[g]/(m(g))")
    gen, poly = s[2:-1].split("]/(", 1)
    gen = gen.strip()
    if not gen.isidentifier():
        raise FieldSpecError(f"bad generator name {gen!r}")
    try:
        coeffs = parse_poly(poly, gen)
    except ParseError as exc:
        raise FieldSpecError(f"bad minimal polynomial in {spec!r}: {exc}") from None
    try:
        return NumberField(coeffs, gen)
    except ValueError as exc:
        raise FieldSpecError(str(exc)) from None


def format_coeff(c: FieldElement) -> str:
    return ",".join(format_rational(x) for x in c.coeffs)


def parse_coeff(text: str, K: NumberField, line: Optional[int] = None) -> FieldElement:
    parts = text.split(",")
    if len(parts) != K.degree:
        raise ParseError(f"expected {K.degree} comma-separated rationals, got {len(parts)}", line, 1)
    vals = []
    col = 1
    for p in parts:
        try:
            vals.append(Fraction(p.strip()))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {p.strip()!r}", line, col) from None
        col += len(p) + 1
    return K.from_coeffs(vals)


def parse_qexp(text: str) -> QExpansion:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    comments = []
    header: dict[str, tuple[str, int]] = {}
    i = 0
    while i < len(lines):
        raw = lines[i]
        if raw.startswith("#"):
            comments.append(raw[1:].strip())
            i += 1
            continue
        if raw.strip() == "---":
            i += 1
            break
        if ":" not in raw:
            raise ParseError(f"expected 'key: value' header line, got {raw!r}", i + 1, 1)
        key, value = raw.split(":", 1)
        key = key.strip()
        if key not in HEADER_KEYS:
            raise ParseError(f"unknown header key {key!r}", i + 1, 1)
        if key in header:
            raise ParseError(f"duplicate header key {key!r}", i + 1, 1)
        header[key] = (value.strip(), i + 1)
        i += 1
    else:
        raise ParseError("missing '---' line ending the header", len(lines) or 1)
    for key in ("field", "first", "prec"):
        if key not in header:
            raise ParseError(f"missing header key {key!r}")

    def _int(key):
        value, ln = header[key]
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"{key} must be an integer, got {value!r}", ln, len(key) + 3) from None

    K = parse_field(header["field"][0])
    first, prec = _int("first"), _int("prec")
    present = [k for k in META_KEYS if k in header]
    meta = None
    if present:
        if len(present) != len(META_KEYS):
            missing = [k for k in META_KEYS if k not in header]
            raise ParseError(f"metadata incomplete; missing {missing}")
        k, N = _int("k"), _int("N")
        flag, ln = header["halfint"]
        if flag not in ("true", "false"):
            raise ParseError(f"halfint must be true or false, got {flag!r}", ln)
        if (flag == "true") != (k % 2 == 1):
            raise ParseError(f"halfint: {flag} contradicts weight numerator k = {k}", ln)
        try:
            chi = parse_character(header["character"][0])
            meta = FormMeta(k, N, chi)
        except (CharacterSpecError, MetaError) as exc:
            raise ParseError(str(exc), header["character"][1]) from None
    if first < 0 or prec < first:
        raise ParseError(f"need 0 <= first <= prec, got first={first}, prec={prec}")
    body = lines[i:]
    if len(body) != prec - first:
        raise ParseError(f"expected {prec - first} coefficient lines, found {len(body)}", i + 1)
    coeffs = tuple(parse_coeff(raw, K, i + 1 + j) for j, raw in enumerate(body))
    return QExpansion(K, first, prec, coeffs, meta, tuple(comments))


def write_qexp(f: QExpansion, comments=None) -> str:
    out = [f"# {c}" if c else "#" for c in (f.comments if comments is None else comments)]
    out.append(f"field: {f.field.spec()}")
    if f.meta is not None:
        out.append(f"k: {f.meta.weight_num}")
        out.append(f"halfint: {'true' if f.meta.halfint else 'false'}")
        out.append(f"N: {f.meta.level}")
        out.append(f"character: {f.meta.character.spec()}")
    out.append(f"first: {f.first}")
    out.append(f"prec: {f.prec}")
    out.append("---")
    out.extend(format_coeff(c) for c in f.coeffs)
    return "\n".join(out) + "\n"


def read_qexp(path) -> QExpansion:
    with open(path, encoding="utf-8") as fh:
        return parse_qexp(fh.read())


def save_qexp(f: QExpansion, path, comments=None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_qexp(f, comments))


# ---------------------------------------------------------------------------
# certificates

def jsonable(x):
    """Convert certificate contents into plain JSON values."""
    from enum import Enum

    from .certify import Certificate

    if isinstance(x, Certificate):
        return {
            "kind": x.kind.value,
            "verdict": x.verdict.value,
            "verdict_text": x.verdict_text(),
            "field": x.field.spec(),
            "bound": jsonable(x.bound),
            "lambdas": [str(v) for v in x.lambdas],
            "lambda_coordinates": [jsonable(v.coeffs) for v in x.lambdas],
            "pivot_rows": list(x.pivot_rows),
            "residual_checked_rows": x.residual_checked_rows,
            "witness": x.witness,
            "window_complete": x.window_complete,
            "forms": [write_qexp(f, comments=()) for f in x.forms],
            "extra": {k: jsonable(v) for k, v in x.extra.items()},
            "notes": list(x.notes),
        }
    if isinstance(x, SturmBound):
        return {"k": x.k, "N": x.N, "index": x.index, "bound": format_rational(x.bound),
                "floor": x.floor, "kohnen": x.kohnen}
    if isinstance(x, FieldElement):
        return str(x)
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, QExpansion):
        return write_qexp(x, comments=())
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def certificate_to_dict(cert) -> dict:
    return jsonable(cert)


def certificate_json(cert) -> str:
    """Canonical machine form: sorted keys, fixed indentation, trailing LF."""
    return json.dumps(certificate_to_dict(cert), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _bound_lines(b: Optional[SturmBound]) -> list[str]:
    if b is None:
        return []
    which = "Kohnen bound B'" if b.kohnen else "Sturm bound B"
    return [f"{which}: {b.describe()}",
            f"  k = {b.k}, N = {b.N}, index = {b.index}"]


def certificate_report(cert) -> str:
    """Human-readable report; carries enough provenance to rerun the check."""
    lines = [f"{cert.kind.value}: {cert.verdict_text()}"]
    lines += _bound_lines(cert.bound)
    lines.append(f"field: {cert.field.spec()}")
    if cert.lambdas:
        lines.append("lambda: " + ", ".join(f"[{x}]" for x in cert.lambdas))
    if cert.pivot_rows:
        lines.append("pivot rows: " + ", ".join(str(n) for n in cert.pivot_rows))
    lines.append(f"rows checked: {cert.residual_checked_rows}")
    if not cert.window_complete:
        lines.append("window: shorter than the bound (indeterminate beyond supplied data)")
    for key in sorted(cert.extra):
        value = cert.extra[key]
        if key == "kernel":
            for v in value:
                lines.append("kernel vector: " + ", ".join(f"[{x}]" for x in v))
            continue
        lines.append(f"{key}: {jsonable(value)}")
    for note in cert.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"
