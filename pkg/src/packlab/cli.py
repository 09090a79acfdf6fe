"""Command-line entry point: ``packlab <verb> ...``."""
from __future__ import annotations

import argparse
import sys
from collections import Counter

import numpy as np

from . import catalog, io
from .errors import PacklabError
from .frames import bound_report, classify_angles, coherence, gram, is_tight, poly_residual
from .graph import Graph

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"expected two comma-separated integers, got {text!r}") from None
    return a, b


def construct_packing(spec: str):
    """``catalog:D,N`` | ``thm52:CASE,Q`` | ``weil:Q,R`` | ``approx:D,N`` | ``mub:P,K``."""
    kind, _, arg = spec.partition(":")
    if not arg:
        raise UsageError(f"construct needs FAMILY:PARAMS, got {spec!r}")
    if kind == "catalog":
        return catalog.build(_pair(arg))
    if kind == "thm52":
        from .incidence import thm52
        case, _, q = arg.partition(",")
        if not q.isdigit():
            raise UsageError("thm52 needs CASE,Q")
        return thm52(case, int(q)).packing
    if kind == "weil":
        from .weil import weil_packing
        q, r = _pair(arg)
        return weil_packing(q, r).packing
    if kind == "approx":
        from .weil import approx_packing
        d, n = _pair(arg)
        return approx_packing(d, n).packing
    if kind == "mub":
        from .frames import build_packing
        from .weil import mub_family
        p, k = _pair(arg)
        fam = mub_family(p, k)
        return build_packing(np.hstack(fam.bases), "complex", {"family": "mub", "p": p, "k": k})
    raise UsageError(f"unknown family {kind!r}")


def _f(x: float) -> str:
    return io.fmt(x)


def cmd_construct(args) -> int:
    p = construct_packing(args.spec)
    io.dump_packing(p, args.output, args.format)
    print(f"wrote {p.d}x{p.n} {p.field} packing to {args.output}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    from .secure import contact_graph, is_d_secure
    p = io.load_packing(args.file, tuple(args.sloane) if args.sloane else None)
    g = gram(p)
    mu = coherence(p)
    b = bound_report(p.d, p.n)
    tight, const = is_tight(p, args.tol)
    cls = classify_angles(g, max(args.tol, 1e-6))
    print(f"d {p.d}")
    print(f"n {p.n}")
    print(f"field {p.field}")
    print(f"coherence {_f(mu)}")
    print(f"welch {_f(b.welch)}{' (trivial)' if b.welch_trivial else ''}")
    print(f"orthoplex {_f(b.orthoplex)} applicable={b.orthoplex_applicable}")
    print(f"gerzon [{_f(b.gerzon_lower)}, {_f(b.gerzon_upper)}] contains={b.in_gerzon}")
    print(f"tight {tight} (n/d = {_f(const)})")
    print(f"angles {cls.tag} count={cls.count} levels=" + ",".join(_f(v) for v in cls.values))
    if mu > 1e-9 and not p.is_complex:
        cg = contact_graph(p, args.tol)
        profile = sorted(Counter(cg.degrees()).items())
        print("contact degrees " + " ".join(f"{deg}:{cnt}" for deg, cnt in profile))
        secure, _ = is_d_secure(cg, p.d)
        print(f"{p.d}-secure {secure}")
    key = (p.d, p.n)
    if key in catalog.ENTRIES:
        e = catalog.ENTRIES[key]
        resid = poly_residual(mu, e.polynomial.coeffs)
        print(f"expected polynomial {e.polynomial} residual {resid:.3e}")
        if args.strict and resid > 1e-9:
            return EXIT_FAIL
    return EXIT_OK


def cmd_certify(args) -> int:
    from .certify import check_certificate, search_certificate
    p = io.load_packing(args.file)
    if args.certificate:
        with open(args.certificate) as fh:
            y = io.certificate_from_json(fh.read())
        rep = check_certificate(p, y, args.tol)
    else:
        rep = search_certificate(p, args.tol)
    print(f"verdict {rep.verdict}")
    print(f"nonzero {rep.nonzero}")
    print(f"normality residual {rep.normality_residual:.3e}")
    print(f"sign condition {rep.sign_condition}")
    print(f"support condition {rep.support_condition}")
    print(f"injectivity rank {rep.injectivity_rank} / tangent dimension {rep.tangent_dimension}")
    if rep.nonzero:
        print(f"dual value {_f(rep.dual_value)} objective {_f(rep.objective)}")
    if args.output and rep.nonzero:
        with open(args.output, "w") as fh:
            fh.write(io.certificate_to_json(rep.y, {"verdict": rep.verdict}))
    return EXIT_OK if rep.certified else EXIT_FAIL


def cmd_secure(args) -> int:
    from .secure import is_d_secure
    with open(args.graph) as fh:
        g = Graph.from_text(fh.read())
    ok, witness = is_d_secure(g, args.d)
    print(f"{args.d}-secure {ok}")
    if ok:
        print("residual " + " ".join(str(v + 1) for v in sorted(witness)))
    else:
        print("deletion order " + " ".join(str(v + 1) for v in witness))
    return EXIT_OK


def cmd_cad_export(args) -> int:
    from .secure import cad_query, export_cad, form2_sign_classes, form2_signs, form_slots, seidel_switching_classes
    form = {"1": "I", "I": "I", "2": "II", "II": "II"}.get(args.form)
    if form is None:
        raise UsageError("--form must be 1 or 2")
    if form == "II":
        reps = form2_sign_classes(args.d)
    else:
        reps = seidel_switching_classes(args.d + 1)
    if not 1 <= args.cls <= len(reps):
        raise UsageError(f"--class must be in 1..{len(reps)}")
    rep = reps[args.cls - 1].entries
    if form == "II":
        signs = form2_signs(rep)
    else:
        signs = [int(rep[i, j]) for i, j in form_slots("I", args.d)]
    system = cad_query(form, signs, args.d, welch=not args.no_welch)
    text = export_cad(system, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"wrote {len(system.equalities)} equalities, {len(system.inequalities)} inequalities "
              f"in {len(system.variables)} variables to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_table(args) -> int:
    rep = catalog.table1_report(args.data)
    sys.stdout.write(rep.to_text())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(rep.to_json())
    return EXIT_FAIL if rep.failures else EXIT_OK


def cmd_convert(args) -> int:
    p = io.load_packing(args.input, tuple(args.sloane) if args.sloane else None)
    io.dump_packing(p, args.output, args.to)
    return EXIT_OK


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="packlab", description="Line packings in real projective space.")
    sub = ap.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("construct", help="build a packing and write it to a file")
    c.add_argument("spec", help="catalog:D,N | thm52:CASE,Q | weil:Q,R | approx:D,N | mub:P,K")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--format", choices=("text", "json"))
    c.set_defaults(func=cmd_construct)

    a = sub.add_parser("analyze", help="coherence, bounds, angles and contact graph of a packing")
    a.add_argument("file")
    a.add_argument("--tol", type=float, default=1e-9)
    a.add_argument("--sloane", type=int, nargs=2, metavar=("D", "N"))
    a.add_argument("--strict", action="store_true", help="exit 1 if a known polynomial is not satisfied")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("certify", help="check or search for a local-optimality certificate")
    r.add_argument("file")
    r.add_argument("--certificate")
    r.add_argument("--tol", type=float, default=1e-8)
    r.add_argument("-o", "--output", help="write the certificate used as JSON")
    r.set_defaults(func=cmd_certify)

    s = sub.add_parser("secure", help="d-security of a graph file")
    s.add_argument("graph")
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(func=cmd_secure)

    x = sub.add_parser("cad-export", help="export a quantifier-elimination query")
    x.add_argument("--d", type=int, required=True)
    x.add_argument("--form", default="2")
    x.add_argument("--class", dest="cls", type=int, default=1)
    x.add_argument("--format", choices=("json", "script"), default="json")
    x.add_argument("--no-welch", action="store_true", help="omit the Welch strengthening")
    x.add_argument("-o", "--output")
    x.set_defaults(func=cmd_cad_export)

    t = sub.add_parser("table", help="rebuild and check the regression table")
    t.add_argument("--data", help=f"directory with adjacency files (else ${catalog.DATA_ENV})")
    t.add_argument("--json")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("convert", help="convert between packing formats")
    v.add_argument("input")
    v.add_argument("output")
    v.add_argument("--sloane", type=int, nargs=2, metavar=("D", "N"))
    v.add_argument("--to", choices=("text", "json"))
    v.set_defaults(func=cmd_convert)
    return ap


def run(argv=None) -> int:
    ap = parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"packlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PacklabError, OSError) as exc:
        print(f"packlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
