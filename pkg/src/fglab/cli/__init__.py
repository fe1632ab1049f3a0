"""Command-line entry point ``fglab``.

Every subcommand prints a human-readable table followed by machine lines
``CHECK <name> PASS|FAIL <detail>``.  Exit codes: 0 all checks pass,
1 some check failed, 2 usage, parse or input error.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Sequence

from ..expr import ExprSyntaxError, to_string, to_tree
from ..report import ResidualReport
from .catalog import UnknownModelError, catalog, names
from .document import DocumentError, MetricDocument, load_metric, parse_document

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# --- shared helpers ---------------------------------------------------------------------

def _document(args) -> MetricDocument:
    if getattr(args, "model", None) and getattr(args, "file", None):
        raise UsageError("give either --model or --file, not both")
    if getattr(args, "model", None):
        return catalog(args.model).document
    if getattr(args, "file", None):
        return load_metric(args.file)
    raise UsageError("a metric is required: --model NAME or --file PATH")


def _emit(reports: Sequence[ResidualReport], out) -> int:
    for r in reports:
        for line in r.lines():
            print(line, file=out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _fmt(x) -> str:
    return to_string(to_tree(x))


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FGLAB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"FGLAB_SEED must be an integer, got {env!r}") from None


def _fraction_list(text: str) -> list:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated rationals, got {text!r}") from None


# --- subcommands ------------------------------------------------------------------------

def cmd_curvature(args, out) -> int:
    from .. import geometry as geo
    doc = _document(args)
    g = doc.metric()
    if args.g_plus:
        if doc.rho is None:
            raise UsageError("--g-plus needs a defining function in the document")
        rho = doc.rho_rat()
        g = geo.MetricField(g.coords, [[x / (rho * rho) for x in row] for row in doc.compactified().g])
    c = g.coords
    print(f"# curvature of {doc.name or 'document'} on ({', '.join(c)})", file=out)
    print(f"scalar = {_fmt(geo.scalar_curvature(g))}", file=out)
    Ric = geo.ricci(g)
    for i in range(g.dim):
        for j in range(i, g.dim):
            if not Ric[i, j].is_zero():
                print(f"Ric[{c[i]},{c[j]}] = {_fmt(Ric[i, j])}", file=out)
    if args.riemann:
        R = geo.riemann(g)
        for k in sorted(R.data):
            if not R[k].is_zero():
                print(f"R[{','.join(c[i] for i in k)}] = {_fmt(R[k])}", file=out)
    reps = [geo.riemann_symmetry_residuals(g, _seed(args))]
    if g.dim >= 3:
        reps.append(geo.weyl_trace_residual(g, _seed(args)))
    reps.append(geo.contracted_bianchi_residual(g, _seed(args)))
    return _emit(reps, out)


def _boundary_h(doc: MetricDocument):
    h = doc.boundary_metric()
    if h is None:
        raise UsageError("the document has no boundary metric block h[i][j]")
    return h


def cmd_expand(args, out) -> int:
    from .. import fgx
    doc = _document(args)
    h = _boundary_h(doc)
    n = h.dim
    if args.n is not None and args.n != n:
        raise UsageError(f"--n {args.n} does not match the boundary dimension {n}")
    order = args.order if args.order is not None else n + 4
    ex = fgx.fg_expand(h, order=order + 1, max_order=max(order + 1, n + 5))
    bc = h.coords
    print(f"# expansion of g_r over {doc.name or 'document'}, n={n}, through r^{order}", file=out)
    for (p, l), m in sorted(ex.jet.coeffs.items()):
        tag = f"r^{p}" + (" log r" if l else "")
        for i in range(n):
            for j in range(i, n):
                if not m[i][j].is_zero():
                    print(f"{tag:>12}  g[{bc[i]},{bc[j]}] = {_fmt(m[i][j])}", file=out)
    ob = ex.obstruction
    print(f"trace constraint h^kl d_r^n g_kl|0 = {_fmt(ob.trace_constraint)}", file=out)
    print("free data (trace-free part of g^(n)) is not determined by h; zero used", file=out)
    for note in ob.notes:
        print(f"note: {note}", file=out)
    return _emit([fgx.einstein_series_residual(ex.jet, seed=_seed(args))], out)


def cmd_obstruction(args, out) -> int:
    from .. import fgx
    doc = _document(args)
    h = _boundary_h(doc)
    n = h.dim
    if n % 2:
        raise UsageError(f"the log coefficient exists only for even n (n={n})")
    jet = fgx.fg_expand(h, order=(args.order or n + 2)).jet
    f = jet.log_coefficient()
    bc = h.coords
    print(f"# log coefficient f (r^{n} log r) over {doc.name or 'document'}", file=out)
    for i in range(n):
        for j in range(i, n):
            print(f"f[{bc[i]},{bc[j]}] = {_fmt(f[i][j])}", file=out)
    seed = _seed(args)
    return _emit([fgx.log_coefficients(jet, seed=seed).report,
                  fgx.weyl_obstruction_equivalence(jet, seed=seed),
                  fgx.free_data_invariance(h, seed=seed)], out)


def cmd_boundary_check(args, out) -> int:
    from .. import boundary as bnd, conformal as conf, fgx
    doc = _document(args)
    seed, tol = _seed(args), args.tolerance if args.tolerance is not None else 1e-6
    reps: list[ResidualReport] = []
    h = doc.boundary_metric()
    if h is not None:
        jet = fgx.fg_expand(h, order=h.dim + 2).jet
        reps += [bnd.geodesic_slice_relations(jet, seed=seed), bnd.gauss_series_residual(jet, seed=seed)]
    elif doc.rho is not None:
        cm = conf.CompactifiedMetric(doc.compactified(), doc.rho_rat())
        pts = cm.probes(args.probes, seed, boundary=True)
        bd = bnd.boundary_data(cm)
        print(f"# boundary data of {doc.name or 'document'}: H = {_fmt(bd.H)}, S_h = {_fmt(bd.S_h)}", file=out)
        reps += [bd.check(seed), bnd.sff_geodesic_factor_residual(cm, pts, tolerance=tol),
                 bnd.boundary_ricci_residuals(cm, pts, tol), bnd.mixed_ricci(cm, pts, tol)]
    else:
        raise UsageError("boundary-check needs a defining function rho or a boundary block h")
    return _emit(reps, out)


def cmd_adn_check(args, out) -> int:
    from .. import adn
    mode = None if args.mode in (None, "auto") else args.mode
    if args.laplacian:
        xi = _fraction_list(args.xi or "1")
        row = _fraction_list(args.boundary_row or "1")
        spec = adn.scalar_laplacian(xi, row, exact=mode != "float")
    else:
        if args.n is None or args.g00 is None or args.xi is None:
            raise UsageError("the gauge system needs --n, --g00 and --xi")
        xi = _fraction_list(args.xi)
        g00 = _fraction_list(args.g00)[0] if args.g00.strip() else None
        if g00 is None or ',' in args.g00:
            raise UsageError(f"--g00 takes one rational, got {args.g00!r}")
        ginv = [[Fraction(int(i == j)) for j in range(args.n)] for i in range(args.n)]
        if args.ginv:
            vals = _fraction_list(args.ginv)
            if len(vals) != args.n:
                raise UsageError("--ginv takes the n diagonal entries of g^{ij}")
            ginv = [[vals[i] if i == j else Fraction(0) for j in range(args.n)] for i in range(args.n)]
        exact = None if mode is None else mode == "exact"
        if mode == "float":
            g00 = float(g00)
            xi = [float(x) for x in xi]
        spec = adn.build_gauge_system(args.n, g00, ginv, xi, exact=exact)
    roots = adn.proper_ellipticity_check(spec)
    print(f"# principal determinant: {adn.principal_determinant(spec)}", file=out)
    print(f"# {roots.verdict}; upper roots {roots.upper}", file=out)
    if not roots.ok:
        return _emit([ResidualReport("proper-ellipticity", False, detail=roots.verdict.replace(" ", "-"))], out)
    print(f"# L0+ = {adn.lplus(spec, roots)}", file=out)
    res = adn.complementing_check(spec, mode=mode)
    for r, row in enumerate(res.matrix):
        print(f"remainder row {r}: {row}", file=out)
    return _emit([ResidualReport("proper-ellipticity", True, detail=f"roots={len(roots.roots)}"),
                  res.report()], out)


def cmd_geodesic_gauge(args, out) -> int:
    import math
    from .. import conformal as conf
    from ..expr import evaluate_rat, to_rat
    doc = _document(args)
    if doc.rho is None:
        raise UsageError("geodesic-gauge needs a defining function rho")
    cm = conf.CompactifiedMetric(doc.compactified(), doc.rho_rat())
    u_text = args.u
    if u_text is None and args.model:
        u_text = catalog(args.model).extras.get("geodesic_factor")
    reps = [cm.check_defining(seed=_seed(args))]
    tol = args.tolerance if args.tolerance is not None else 1e-8
    try:
        sol = conf.solve_geodesic_factor_radial(cm, args.depth)
    except conf.PreconditionError as e:
        print(f"# radial solver not applicable: {e}", file=out)
        sol = None
    if sol is not None:
        print(f"# radial solve: depth reached {sol.depth_reached:.6g}, complete={sol.complete}, "
              f"u'(0)={sol.u_t0:.12g}", file=out)
        if not sol.complete:
            print(f"# {sol.message}", file=out)
        print(f"{'t':>10} {'rho':>14} {'u':>18}", file=out)
        step = max(1, len(sol.t) // 8)
        for t, r, u in list(zip(sol.t, sol.rho, sol.u))[::step]:
            print(f"{t:10.5f} {r:14.8f} {u:18.12f}", file=out)
        if u_text is not None:
            ur = to_rat(u_text)
            errs = [abs(u - evaluate_rat(ur, {cm.t: float(t)})) for t, u in zip(sol.t, sol.u)]
            from ..report import numeric_report
            reps.append(numeric_report("radial-solver-vs-closed-form", errs, tol))
    if u_text is not None:
        reps.append(conf.geodesic_gauge_residual(cm, u_text, seed=_seed(args)))
    return _emit(reps, out)


def cmd_asymptotics(args, out) -> int:
    from .. import conformal as conf
    doc = _document(args)
    if doc.rho is None:
        raise UsageError("asymptotics needs a defining function rho")
    cm = conf.CompactifiedMetric(doc.compactified(), doc.rho_rat())
    rep = conf.ah_curvature_asymptotics(cm, seed=_seed(args))
    tables = rep.components["tables"]
    first = next(iter(tables.values()))
    print("# decay along the normal ray; rho samples " + " ".join(f"{r:.4g}" for r in first.rho), file=out)
    for name, tab in tables.items():
        ex = " ".join(f"{e:.3f}" for e in tab.exponents)
        print(f"{name:>26}: last={tab.values[-1]:.3e} exponents [{ex}] rate={tab.rate:.3f}", file=out)
    return _emit([rep], out)


def cmd_verify(args, out) -> int:
    from .suites import SUITES
    wanted = list(SUITES) if args.suite == "all" else [args.suite]
    for w in wanted:
        if w not in SUITES:
            raise UsageError(f"unknown suite {w!r}; known: all, {', '.join(SUITES)}")
    seed = _seed(args)
    reps = []
    for w in wanted:
        kw = {} if args.tolerance is None else {"tolerance": args.tolerance}
        reps.append(SUITES[w](seed, **kw))
    return _emit(reps, out)


def cmd_catalog(args, out) -> int:
    if args.name is None:
        for nm in names():
            print(nm, file=out)
        return EXIT_OK
    entry = catalog(args.name)
    print(entry.document.to_text(), end="", file=out)
    if args.self_test:
        return _emit([entry.self_test()], out)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, help="expansion order (default n+4)")
    common.add_argument("--n", type=int, help="boundary dimension")
    common.add_argument("--tolerance", type=float, help="numeric tolerance")
    common.add_argument("--seed", type=int, help="seed for probes (env FGLAB_SEED)")
    common.add_argument("--mode", choices=["exact", "float", "auto"], help="arithmetic mode")
    metric = argparse.ArgumentParser(add_help=False)
    metric.add_argument("--model", help="catalog model name")
    metric.add_argument("--file", help="metric document path")

    p = argparse.ArgumentParser(prog="fglab", parents=[common],
                                description="Checks for asymptotically hyperbolic metrics.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("curvature", parents=[common, metric], help="curvature of a metric")
    s.add_argument("--riemann", action="store_true", help="also list Riemann components")
    s.add_argument("--g-plus", action="store_true", help="use rho^-2 g instead of g")
    s.set_defaults(fn=cmd_curvature)
    s = sub.add_parser("expand", parents=[common, metric], help="radial expansion of g_r")
    s.set_defaults(fn=cmd_expand)
    s = sub.add_parser("obstruction", parents=[common, metric], help="log coefficient and its relations")
    s.set_defaults(fn=cmd_obstruction)
    s = sub.add_parser("boundary-check", parents=[common, metric], help="boundary residual suite")
    s.add_argument("--probes", type=int, default=5)
    s.set_defaults(fn=cmd_boundary_check)
    s = sub.add_parser("adn-check", parents=[common], help="complementing condition")
    s.add_argument("--gauge-system", action="store_true", help="the (g^00, g_0i) system (default)")
    s.add_argument("--laplacian", action="store_true", help="scalar Laplacian with one boundary row")
    s.add_argument("--g00", help="g^00 at the point (rational)")
    s.add_argument("--xi", help="tangential covector, comma separated")
    s.add_argument("--ginv", help="diagonal of g^{ij}, comma separated (default identity)")
    s.add_argument("--boundary-row", help="Laplacian boundary row coefficients [c0, c1] meaning c0 + c1 z")
    s.set_defaults(fn=cmd_adn_check)
    s = sub.add_parser("geodesic-gauge", parents=[common, metric], help="radial geodesic factor")
    s.add_argument("--u", help="candidate factor to check")
    s.add_argument("--depth", type=float, default=0.5)
    s.set_defaults(fn=cmd_geodesic_gauge)
    s = sub.add_parser("asymptotics", parents=[common, metric], help="decay rates near the boundary")
    s.set_defaults(fn=cmd_asymptotics)
    s = sub.add_parser("verify", parents=[common], help="acceptance suites")
    s.add_argument("--suite", default="all")
    s.set_defaults(fn=cmd_verify)
    s = sub.add_parser("catalog", parents=[common], help="list or print bundled models")
    s.add_argument("name", nargs="?")
    s.add_argument("--self-test", action="store_true")
    s.set_defaults(fn=cmd_catalog)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        return args.fn(args, out)
    except (UsageError, DocumentError, UnknownModelError, ExprSyntaxError, FileNotFoundError) as e:
        msg = e.args[0] if isinstance(e, UnknownModelError) else str(e)
        print(f"ERROR {type(e).__name__}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"ERROR {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


__all__ = ["main", "build_parser", "parse_document", "load_metric", "catalog"]
