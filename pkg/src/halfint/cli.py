"""Command-line interface.

Exit codes: 0 success or Certified, 1 definitive negative verdict, 2
indeterminate (precision short of the bound), 3 usage or data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import fixtures
from .bounds import Vanishing, gamma0_index, kohnen_bound, sturm_bound_halfint, vanishing_test
from .certify import (
    Certificate,
    EigenSliceInput,
    Verdict,
    certify_rank2,
    certify_span,
    eigenspace_kernel,
    forbidden_residues,
    kohnen_check,
    recover_cofactor,
    select_pivots,
)
from .characters import parse_character
from .errors import HalfIntError
from .io import certificate_json, certificate_report, parse_qexp, read_qexp, write_qexp
from .qseries import (
    FormMeta,
    op_U,
    op_V,
    product_meta,
    qx_add,
    qx_mul,
    qx_scale,
    residue_slice,
    theta,
    theta1,
    theta_twisted,
)

OK, NEGATIVE, INDETERMINATE, ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ERROR, f"{self.prog}: error: {message}\n")


def load_series(ref: str):
    """Read a .qexp file; ``fixture:NAME`` or a bare fixture name loads packaged data."""
    if ref.startswith("fixture:"):
        return fixtures.load(ref[len("fixture:"):])
    if os.path.exists(ref):
        return read_qexp(ref)
    stem = os.path.basename(ref)
    stem = stem[:-5] if stem.endswith(".qexp") else stem
    if stem in fixtures.names():
        return fixtures.load(stem)
    raise UsageError(f"no such file or fixture: {ref}")


def _emit_series(f, out):
    text = write_qexp(f)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _code(cert: Certificate) -> int:
    if cert.verdict in (Verdict.NOT_IN_SPAN, Verdict.NOT_IN_PLUS_SPACE):
        return NEGATIVE
    if cert.verdict is Verdict.CONSISTENT_UP_TO or not cert.window_complete:
        return INDETERMINATE
    return OK


def _emit_cert(cert, args, series=None, forbidden=()):
    report = certificate_report(cert)
    machine = certificate_json(cert)
    sys.stdout.write(machine if getattr(args, "json", False) else report)
    if getattr(args, "report", None):
        from .plotting import write_report_dir

        for p in write_report_dir(args.report, cert, series or {}, report, machine, forbidden):
            print(f"wrote {p}", file=sys.stderr)
    return _code(cert)


def _split(text):
    return [t for t in (s.strip() for s in text.split(",")) if t]


# ---------------------------------------------------------------------------
# handlers

def cmd_sturm_bound(args):
    b = kohnen_bound(args.k, args.N) if args.kohnen else sturm_bound_halfint(args.k, args.N)
    level = 4 * args.N if args.kohnen else args.N
    bound = str(b.bound)
    if args.json:
        print(json.dumps({"k": b.k, "N": b.N, "index_level": level, "index": b.index,
                          "bound": bound, "floor": b.floor, "kohnen": b.kohnen}, sort_keys=True))
    else:
        print(f"index [SL2(Z):Gamma0({level})] = {b.index}")
        print(f"B = {bound}")
        print(f"floor = {b.floor}")
    return OK


def cmd_sturm_vanish(args):
    f = load_series(args.file)
    res = vanishing_test(f, args.k, args.N)
    print(res)
    print(res.bound.describe())
    return {Vanishing.CERTIFIED_ZERO: OK, Vanishing.NONZERO_AT: NEGATIVE,
            Vanishing.INSUFFICIENT_PRECISION: INDETERMINATE}[res.verdict]


def cmd_qexp_theta(args):
    if args.kind == "theta1":
        if args.twist:
            raise UsageError("--twist is only available for theta")
        f = theta1(args.prec)
    elif args.twist:
        f = theta_twisted(parse_character(args.twist), args.prec)
    else:
        f = theta(args.prec)
    if args.shift and args.shift != 1:
        f = op_V(args.shift, f).truncate(args.prec)
    _emit_series(f, args.output)
    return OK


def cmd_qexp_binary(args):
    a, b = load_series(args.a), load_series(args.b)
    if args.op == "mul":
        out = qx_mul(a, b)
        if args.theta_rule:
            if a.meta is None or not a.meta.halfint:
                raise UsageError("--theta-rule needs a half-integral weight first operand")
            m = out.meta
            out = out.with_meta(FormMeta(m.weight_num, m.level,
                                         product_meta(a.meta.weight_num, a.meta.character)))
    else:
        out = qx_add(a, qx_scale(a.field.coerce(args.scale) if a.field.degree > 1
                                 else b.field.coerce(args.scale), b))
    _emit_series(out, args.output)
    return OK


def cmd_qexp_unary(args):
    f = load_series(args.file)
    if args.op == "u":
        out = op_U(args.d, f)
    elif args.op == "v":
        out = op_V(args.d, f)
    else:
        out = residue_slice(f, args.r, args.m, compose_uv=args.compose_uv)
    _emit_series(out, args.output)
    return OK


def cmd_qexp_show(args):
    f = load_series(args.file)
    print(f)
    if f.meta is not None:
        m = f.meta
        w = f"{m.weight_num}/2" if m.halfint else str(m.weight_num // 2)
        print(f"weight {w}, level {m.level}, character {m.character.spec()}")
    print(f"field {f.field.spec()}")
    return OK


def cmd_certify_recover(args):
    h, cert = recover_cofactor(load_series(args.product), load_series(args.factor))
    if args.output:
        _emit_series(h, args.output)
    if args.json:
        sys.stdout.write(certificate_json(cert))
    else:
        sys.stdout.write(certificate_report(cert))
        if not args.output:
            sys.stdout.write(write_qexp(h))
    return OK


def _bound_for(args, basis):
    k, N = args.k, args.N
    if (k is None or N is None) and basis[0].meta is not None:
        k = basis[0].meta.weight_num if k is None else k
        N = basis[0].meta.level if N is None else N
    if k is None or N is None:
        raise UsageError("--k and --N are required when the basis carries no metadata")
    return kohnen_bound(k, N) if args.kohnen_bound else sturm_bound_halfint(k, N)


def cmd_certify_span(args):
    basis = [load_series(r) for r in _split(args.basis)]
    target = load_series(args.target)
    cert = certify_span(basis, target, _bound_for(args, basis), args.allow_short_window)
    series = {f"f{i + 1}": f for i, f in enumerate(basis)}
    series["target"] = target
    return _emit_cert(cert, args, series)


def cmd_certify_rank2(args):
    f1, f2 = load_series(args.f1), load_series(args.f2)
    K = f1.field if not f1.field.is_rational() else f2.field
    values = _split(args.values)
    if len(values) != 2:
        raise UsageError("--values takes exactly two values a_f(m0),a_f(n0)")
    k = args.k
    pivots = select_pivots(f1, f2, k, args.N)
    print(f"pivots: m0 = {pivots[0]}, n0 = {pivots[1]}", file=sys.stderr)
    cert = certify_rank2(f1, f2, k, [K.parse(v) for v in values], args.N, pivots)
    return _emit_cert(cert, args, {"f1": f1, "f2": f2}, forbidden_residues(k))


def _kohnen_one(ref, k, N, as_json):
    try:
        f = load_series(ref)
        cert = kohnen_check(f, k, N)
    except (HalfIntError, UsageError, OSError, ValueError) as exc:
        return ref, f"error: {exc}\n", ERROR, None
    text = certificate_json(cert) if as_json else certificate_report(cert)
    return ref, text, _code(cert), cert


def cmd_kohnen_check(args):
    refs = _split(args.file)
    if args.jobs > 1 and len(refs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_kohnen_one, refs, [args.k] * len(refs),
                                    [args.N] * len(refs), [args.json] * len(refs)))
    else:
        results = [_kohnen_one(r, args.k, args.N, args.json) for r in refs]
    codes = []
    for ref, text, code, cert in results:
        if len(refs) > 1:
            print(f"== {ref}")
        sys.stdout.write(text)
        codes.append(code)
    if args.report and len(refs) == 1 and results[0][3] is not None:
        from .plotting import write_report_dir

        cert = results[0][3]
        f = load_series(refs[0])
        for p in write_report_dir(args.report, cert, {"f": f}, certificate_report(cert),
                                  certificate_json(cert), cert.extra["forbidden_residues"]):
            print(f"wrote {p}", file=sys.stderr)
    for c in (ERROR, NEGATIVE, INDETERMINATE):
        if c in codes:
            return c
    return OK


def _keyed(text, what):
    out = []
    for item in _split(text):
        if ":" not in item:
            raise UsageError(f"{what} entries look like p:VALUE, got {item!r}")
        p, v = item.split(":", 1)
        try:
            out.append((int(p), v))
        except ValueError:
            raise UsageError(f"bad prime in {item!r}") from None
    return out


def cmd_subspace_kernel(args):
    basis = [load_series(r) for r in _split(args.basis)]
    K = next((f.field for f in basis if not f.field.is_rational()), basis[0].field)
    images: dict[int, list] = {}
    for p, ref in _keyed(args.images, "--images"):
        images.setdefault(p, []).append(load_series(ref))
    eigen = {p: K.parse(v) for p, v in _keyed(args.eigenvalues, "--eigenvalues")}
    window = None
    if args.window:
        lo, hi = args.window.split(":")
        window = range(int(lo), int(hi) + 1)
    cert = eigenspace_kernel(EigenSliceInput(tuple(basis), images, eigen), window)
    return _emit_cert(cert, args)


def cmd_fixtures(args):
    if args.action == "list":
        for name in fixtures.names():
            print(name)
        return OK
    os.makedirs(args.dir, exist_ok=True)
    for name in fixtures.names():
        with open(os.path.join(args.dir, name + ".qexp"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write(fixtures.text(name))
    return OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="halfint", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def out_opts(q, json_flag=True, report=False):
        if json_flag:
            q.add_argument("--json", action="store_true", help="print the machine-format document")
        if report:
            q.add_argument("--report", metavar="DIR",
                           help="also write certificate, TSV tables and support.png to DIR")

    sturm = sub.add_parser("sturm", help="Sturm bounds").add_subparsers(dest="cmd", required=True,
                                                                          parser_class=_Parser)
    q = sturm.add_parser("bound", help="index, exact bound and floor")
    q.add_argument("--k", type=int, required=True, help="odd weight numerator (weight k/2)")
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--kohnen", action="store_true", help="use the index of Gamma0(4N)")
    out_opts(q)
    q.set_defaults(func=cmd_sturm_bound)
    q = sturm.add_parser("vanish", help="vanishing test up to B_k(N)")
    q.add_argument("--file", required=True)
    q.add_argument("--k", type=int)
    q.add_argument("--N", type=int)
    q.set_defaults(func=cmd_sturm_vanish)

    qexp = sub.add_parser("qexp", help="build and transform q-expansions").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for kind in ("theta", "theta1"):
        q = qexp.add_parser(kind)
        q.add_argument("--prec", type=int, required=True)
        if kind == "theta":
            q.add_argument("--twist", metavar="SPEC", help="character spec for a twisted theta")
        else:
            q.set_defaults(twist=None)
        q.add_argument("--shift", type=int, default=1, help="apply V(D)")
        q.add_argument("-o", "--output")
        q.set_defaults(func=cmd_qexp_theta, kind=kind)
    for op in ("mul", "add"):
        q = qexp.add_parser(op)
        q.add_argument("a")
        q.add_argument("b")
        if op == "mul":
            q.add_argument("--theta-rule", action="store_true",
                           help="set the character to chi * chi_{-1}^((k+1)/2)")
        else:
            q.add_argument("--scale", default="1", help="compute a + scale*b")
        q.add_argument("-o", "--output")
        q.set_defaults(func=cmd_qexp_binary, op=op)
    for op in ("u", "v"):
        q = qexp.add_parser(op)
        q.add_argument("file")
        q.add_argument("--d", type=int, required=True)
        q.add_argument("-o", "--output")
        q.set_defaults(func=cmd_qexp_unary, op=op)
    q = qexp.add_parser("slice")
    q.add_argument("file")
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--compose-uv", action="store_true")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_qexp_unary, op="slice")
    q = qexp.add_parser("show")
    q.add_argument("file")
    q.set_defaults(func=cmd_qexp_show)

    cert = sub.add_parser("certify", help="certification procedures").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = cert.add_parser("recover", help="recover h from product = factor * h")
    q.add_argument("--product", required=True)
    q.add_argument("--factor", required=True)
    q.add_argument("-o", "--output")
    out_opts(q)
    q.set_defaults(func=cmd_certify_recover)
    q = cert.add_parser("span", help="certify target in the span of a basis")
    q.add_argument("--basis", required=True, help="comma-separated files")
    q.add_argument("--target", required=True)
    q.add_argument("--k", type=int)
    q.add_argument("--N", type=int)
    q.add_argument("--kohnen-bound", action="store_true", help="use B'_k(N) instead of B_k(N)")
    q.add_argument("--allow-short-window", action="store_true",
                   help="accept data shorter than the bound (exit 2 when it is)")
    out_opts(q, report=True)
    q.set_defaults(func=cmd_certify_span)
    q = cert.add_parser("rank2", help="two-dimensional fast path")
    q.add_argument("--f1", required=True)
    q.add_argument("--f2", required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--N", type=int)
    q.add_argument("--values", required=True, help="a_f(m0),a_f(n0)")
    out_opts(q, report=True)
    q.set_defaults(func=cmd_certify_rank2)

    kohnen = sub.add_parser("kohnen", help="plus-space membership").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = kohnen.add_parser("check")
    q.add_argument("--file", required=True, help="one file, or several comma-separated")
    q.add_argument("--k", type=int)
    q.add_argument("--N", type=int)
    q.add_argument("--jobs", type=int, default=1)
    out_opts(q, report=True)
    q.set_defaults(func=cmd_kohnen_check)

    subspace = sub.add_parser("subspace", help="Hecke eigenspace slicing").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = subspace.add_parser("kernel")
    q.add_argument("--basis", required=True)
    q.add_argument("--images", required=True, help="p:FILE,... one per basis form, in order")
    q.add_argument("--eigenvalues", required=True, help="p:VALUE,...")
    q.add_argument("--window", help="LO:HI inclusive exponent range")
    out_opts(q)
    q.set_defaults(func=cmd_subspace_kernel)

    q = sub.add_parser("fixtures", help="list or export the packaged fixtures")
    q.add_argument("action", choices=("list", "export"))
    q.add_argument("dir", nargs="?", default="fixtures")
    q.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HalfIntError, UsageError, OSError, ValueError) as exc:
        print(f"halfint: error: {exc}", file=sys.stderr)
        return ERROR


def cli_dispatch(argv) -> int:
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else ERROR


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
