"""Acceptance suites: one named suite per acceptance criterion.

Each suite returns a :class:`ResidualReport` whose children are the
individual checks plus a ``runtime`` check against the suite's budget.
"""
from __future__ import annotations

import math
import random
import time
from fractions import Fraction
from typing import Callable

import mpmath

from .. import adn, boundary as bnd, conformal as conf, fgx, geometry as geo
from ..expr import Rat, evaluate_rat, normalize, parse_expr, to_rat, to_string
from ..numeric import FDCurvature, fd_laplacian
from ..report import ResidualReport, exact_zero_report, numeric_report
from .catalog import BALL_CHART, catalog

Suite = Callable[[int, float], ResidualReport]


def _parent(name: str, kids: list[ResidualReport], started: float, budget: float) -> ResidualReport:
    elapsed = time.perf_counter() - started
    kids = kids + [ResidualReport("runtime", elapsed <= budget, exact=False,
                                  detail=f"{elapsed:.2f}s budget={budget:g}s")]
    return ResidualReport(name, all(k.passed for k in kids), children=kids)


def _identity(n: int) -> list[list[Rat]]:
    return [[Rat.one() if i == j else Rat.zero() for j in range(n)] for i in range(n)]


# --- 1 ---------------------------------------------------------------------------------

def suite_fg_flat(seed: int = 0, tolerance: float = 1e-8) -> ResidualReport:
    t0 = time.perf_counter()
    kids = []
    for n in (3, 4):
        coords = [f"x{i + 1}" for i in range(n)]
        ex = fgx.fg_expand(_identity(n), coords=coords, order=n + 5)
        coeffs = [x for p in range(1, n + 5) for l in (0, 1)
                  for row in ex.jet.coefficient(p, l) for x in row]
        kids.append(exact_zero_report(f"flat-coefficients-n{n}", coeffs, seed=seed, detail=f"through r^{n + 4}"))
        res = fgx.einstein_series_residual(ex.jet, seed=seed)
        res.name = f"einstein-series-n{n}"
        kids.append(res)
    return _parent("fg-flat", kids, t0, 10)


# --- 2 ---------------------------------------------------------------------------------

def suite_fg_round_sphere(seed: int = 0, tolerance: float = 1e-8) -> ResidualReport:
    t0 = time.perf_counter()
    kids = []
    for n in (3, 4):
        entry = catalog(f"fg-round-sphere-n{n}")
        rep = entry.facts["fg-closed-form"](entry.document)
        rep.name = f"closed-form-n{n}"
        kids.append(rep)
    return _parent("fg-round-sphere", kids, t0, 60)


# --- 3, 4 ------------------------------------------------------------------------------

def _obstruction_jet():
    doc = catalog("perturbed-flat-boundary-n4").document
    h = doc.boundary_metric()
    return h, fgx.fg_expand(h, order=h.dim + 2).jet


def suite_obstruction(seed: int = 0, tolerance: float = 1e-8) -> ResidualReport:
    t0 = time.perf_counter()
    h, jet = _obstruction_jet()
    f = jet.log_coefficient()
    nonzero = any(not x.is_zero() for row in f for x in row)
    kids = [ResidualReport("f-nonzero", nonzero, detail="h is not conformally flat"),
            fgx.log_coefficients(jet, seed=seed).report,
            fgx.free_data_invariance(h, trials=2, seed=seed)]
    return _parent("obstruction", kids, t0, 600)


def suite_weyl_obstruction(seed: int = 0, tolerance: float = 1e-8) -> ResidualReport:
    t0 = time.perf_counter()
    _, jet = _obstruction_jet()
    kids = [fgx.weyl_obstruction_equivalence(jet, seed=seed),
            fgx.trace_free_kernel_check(4, samples=20, seed=seed)]
    return _parent("weyl-obstruction", kids, t0, 60)


# --- 5 ---------------------------------------------------------------------------------

def suite_identities(seed: int = 0, tolerance: float = 1e-8) -> ResidualReport:
    t0 = time.perf_counter()
    g = catalog("product-einstein-s2xs2").document.compactified()
    kids = [geo.weyl_trace_residual(g, seed), geo.riemann_symmetry_residuals(g, seed),
            geo.contracted_bianchi_residual(g, seed), geo.weyl_divergence_identity_residual(g, seed)]
    return _parent("identities", kids, t0, 60)


# --- 6 ---------------------------------------------------------------------------------

def _cm(name: str) -> conf.CompactifiedMetric:
    doc = catalog(name).document
    return conf.CompactifiedMetric(doc.compactified(), doc.rho_rat())


def _sphere_points(count: int, seed: int) -> list[dict[str, float]]:
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        v = [0.5 + 0.1 * (rng.random() - 0.5) for _ in range(4)]
        nrm = math.sqrt(sum(t * t for t in v))
        pts.append({f"X{i + 1}": v[i] / nrm for i in range(4)})
    return pts


def suite_boundary(seed: int = 0, tolerance: float = 1e-6) -> ResidualReport:
    t0 = time.perf_counter()
    kids: list[ResidualReport] = []
    # exact: series checks on geodesic jets
    s3 = catalog("fg-round-sphere-n3").document.boundary_metric()
    for label, h in (("s3", s3), ("n4", catalog("perturbed-flat-boundary-n4").document.boundary_metric())):
        jet = fgx.fg_expand(h, order=h.dim + 2).jet
        for rep in (bnd.geodesic_slice_relations(jet, seed=seed), bnd.gauss_series_residual(jet, seed=seed)):
            rep.name = f"{rep.name}-{label}"
            kids.append(rep)
    kids.append(bnd.dirichlet_composition_check(3, seed=seed))
    kids.append(bnd.mixed_ricci_reduction(seed=seed))
    # numeric: five boundary probes per model
    ball = _cm("hyperbolic-ball-4d")
    tilted = _cm("tilted-half-space-4d")
    for label, cm in (("ball", ball), ("tilted", tilted)):
        pts = cm.probes(5, seed, boundary=True)
        group = [bnd.sff_geodesic_factor_residual(cm, pts, tolerance=tolerance),
                 bnd.boundary_ricci_residuals(cm, pts, tolerance),
                 bnd.mixed_ricci(cm, pts, tolerance)]
        if label == "ball":
            group.append(bnd.sff_geodesic_factor_radial_check(cm, pts, tolerance))
        for rep in group:
            rep.name = f"{rep.name}-{label}"
        kids.extend(group)
    flat = geo.MetricField.diagonal(["X1", "X2", "X3", "X4"], [1] * 4)
    cmap = bnd.ChartMap(flat, [to_rat(f) for f in BALL_CHART])
    kids.append(bnd.neumann_residuals(cmap, _sphere_points(5, seed), tolerance=tolerance))
    s2h2 = catalog("s2xh2").document.compactified()
    pts = [{"p": 0, "q": Fraction(1, 3), "u": Fraction(1, 5), "v": Fraction(1 + i, 2)} for i in range(5)]
    rep = bnd.bianchi_neumann_residual(s2h2, pts, tolerance=min(tolerance, 1e-8))
    rep.name = "bianchi-neumann-s2xh2"
    kids.append(rep)
    return _parent("boundary", kids, t0, 120)


# --- 7 ---------------------------------------------------------------------------------

def suite_adn(seed: int = 0, tolerance: float = 1e-8) -> ResidualReport:
    t0 = time.perf_counter()
    kids = []
    for data, res in adn.gauge_system_scan([4, Fraction(9, 4)], [1, 4], [2, 3]):
        ok = res.passed and res.exact and res.rank == res.rows and res.roundtrip_ok
        kids.append(ResidualReport(f"gauge-system-g00={data['g00']}-xi2={data['xi2']}-n={data['n']}", ok,
                                   detail=f"rank={res.rank}/{res.rows} roundtrip={res.roundtrip_ok}"))
        spec = adn.build_gauge_system(data["n"], data["g00"], _identity_frac(data["n"]),
                                      [adn._rational_sqrt(Fraction(data["xi2"]))] + [0] * (data["n"] - 1))
        kids.append(_roots_report(spec, data))
    kids.append(adn.complementing_check(adn.scalar_laplacian([1], [1])).report("dirichlet-laplacian"))
    tang = adn.complementing_check(adn.scalar_laplacian([0, 1], [0]))
    kids.append(ResidualReport("tangential-laplacian-fails", not tang.passed and tang.kernel is not None,
                               detail=f"kernel={tang.kernel}"))
    return _parent("adn", kids, t0, 10)


def _identity_frac(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _roots_report(spec: adn.EllipticSystemSpec, data: dict) -> ResidualReport:
    rr = adn.proper_ellipticity_check(spec)
    k = adn._rational_sqrt(Fraction(data["xi2"]) / Fraction(data["g00"]))
    N = data["n"] + 1
    det = adn.principal_determinant(spec)
    expected = adn.SymbolPolynomial([Fraction(data["xi2"]), 0, Fraction(data["g00"])]) ** N
    ok = (rr.ok and rr.exact and det == expected
          and rr.upper == [adn.QI(0, k)] * N and rr.lower == [adn.QI(0, -k)] * N)
    return ResidualReport(f"roots-g00={data['g00']}-xi2={data['xi2']}-n={data['n']}", ok,
                          detail=f"+-{k}i multiplicity {N}")


# --- 8 ---------------------------------------------------------------------------------

def suite_asymptotics(seed: int = 0, tolerance: float = 0.1) -> ResidualReport:
    t0 = time.perf_counter()
    kids = []
    pert = _cm("ah-perturbed-5d")
    rates = {}
    for start in (1.0, 0.5):
        rep = conf.ah_curvature_asymptotics(pert, t0=start, seed=seed)
        rates[start] = conf.rates_of(rep)
    r = rates[1.0]["einstein-defect-g+"]
    kids.append(ResidualReport("perturbed-einstein-defect-rate", abs(r - 3) <= tolerance and r >= 2 - tolerance,
                               exact=False, rate=r, detail="constructed value 3"))
    drift = max(abs(rates[1.0][k] - rates[0.5][k]) for k in rates[1.0])
    kids.append(ResidualReport("rate-halving-invariance", drift <= tolerance, exact=False, magnitude=drift,
                               tolerance=tolerance))
    for name in ("hyperbolic-ball-4d", "hyperbolic-half-space-5d"):
        rep = conf.ah_curvature_asymptotics(_cm(name), seed=seed)
        ident = rep.children[0]
        low = {k: v for k, v in conf.rates_of(rep).items()
               if k in ("sectional-K+1", "ricci-relation-residual", "scalar-relation-residual")}
        ok = ident.passed and all(v >= 2 - tolerance for v in low.values())
        kids.append(ResidualReport(f"rates-{name}", ok, exact=False,
                                   detail=" ".join(f"{k}={v:.3f}" for k, v in low.items())))
    return _parent("asymptotics", kids, t0, 60)


# --- 9 ---------------------------------------------------------------------------------

def random_expression_text(rng: random.Random, names: list[str], depth: int = 0) -> str:
    """A grammar-valid expression string."""
    if depth > 3 or rng.random() < 0.3:
        k = rng.random()
        if k < 0.4:
            return rng.choice(names)
        if k < 0.6:
            return str(rng.randint(0, 99))
        if k < 0.8:
            return f"{rng.randint(0, 30)}/{rng.randint(1, 30)}"
        return f"{rng.randint(0, 9)}.{rng.randint(0, 99)}"
    k = rng.random()
    sub = lambda: random_expression_text(rng, names, depth + 1)
    if k < 0.35:
        return f"{sub()} {rng.choice('+-')} {sub()}"
    if k < 0.6:
        return f"{sub()}{rng.choice(['*', ' / ', '*'])}{sub()}"
    if k < 0.72:
        return f"({sub()})^{rng.choice([-2, -1, 0, 1, 2, 3])}"
    if k < 0.84:
        return f"{rng.choice(['sin', 'cos', 'tan', 'exp', 'log', 'sqrt', 'sinh', 'cosh', 'tanh'])}({sub()})"
    if k < 0.92:
        return f"-{random_expression_text(rng, names, 99)}"
    return f"({sub()})"


def _fd_models() -> list[tuple[str, geo.MetricField]]:
    out = []
    for name in ("hyperbolic-half-space-4d", "hyperbolic-ball-4d", "product-einstein-s2xs2", "s2xh2",
                 "tilted-half-space-4d", "ah-perturbed-5d", "fg-round-sphere-n3"):
        doc = catalog(name).document
        g = doc.compactified()
        if doc.rho is not None:
            # g_+ is never flat, so relative errors are meaningful
            rho = doc.rho_rat()
            g = geo.MetricField(g.coords, [[x / (rho * rho) for x in row] for row in g.g])
        out.append((name, g))
    return out


def fd_cross_check(name: str, g: geo.MetricField, probes: int = 3, seed: int = 0,
                   tolerance: float = 1e-6) -> ResidualReport:
    """Symbolic curvature against central differences of the metric, normwise relative."""
    rng = random.Random(seed)
    N = g.dim
    Gam, R, Ric, S, W = geo.christoffel(g), geo.riemann(g), geo.ricci(g), geo.scalar_curvature(g), geo.weyl(g)
    c = g.coords
    f = Rat.var(c[0]) * Rat.var(c[0]) * Rat.var(c[1]) + Rat.var(c[2])
    lap = geo.laplace_beltrami(f, g)
    errs: dict[str, float] = {k: 0.0 for k in ("christoffel", "riemann", "ricci", "scalar", "weyl", "laplacian")}
    idx4 = [(a, b, cc, d) for a in range(N) for b in range(N) for cc in range(N) for d in range(N)]
    for _ in range(probes):
        pt = {x: Fraction(round((0.15 + 0.45 * rng.random()) * 4096), 4096) for x in c}
        fd = FDCurvature(g, pt)
        ev = lambda e: evaluate_rat(to_rat(e), pt, "mpmath")

        def normwise(pairs, floor=mpmath.mpf("1e-12")):
            pairs = list(pairs)
            scale = max(max(abs(a) for a, _ in pairs), floor)
            return float(max(abs(a - b) for a, b in pairs) / scale)

        errs["christoffel"] = max(errs["christoffel"], normwise(
            (ev(Gam[t, a, b]), fd.gamma[t][a][b]) for t in range(N) for a in range(N) for b in range(N)))
        r_pairs = [(ev(R[i]), fd.riemann[i]) for i in idx4]
        errs["riemann"] = max(errs["riemann"], normwise(r_pairs))
        # Weyl relative to the Riemann scale: it vanishes exactly on conformally flat models
        r_scale = max(abs(a) for a, _ in r_pairs)
        errs["weyl"] = max(errs["weyl"], normwise(((ev(W[i]), fd.weyl(*i)) for i in idx4), r_scale))
        ric_pairs = [(ev(Ric[a, b]), fd.ricci[a][b]) for a in range(N) for b in range(N)]
        errs["ricci"] = max(errs["ricci"], normwise(ric_pairs))
        # scalar: relative to the Ricci scale so S = 0 models are meaningful
        ric_scale = max(max(abs(a) for a, _ in ric_pairs), abs(ev(S)), mpmath.mpf("1e-12"))
        errs["scalar"] = max(errs["scalar"], float(abs(ev(S) - fd.scalar) / ric_scale))
        lv = ev(lap)
        errs["laplacian"] = max(errs["laplacian"], float(abs(lv - fd_laplacian(f, g, pt)) / max(abs(lv), 1)))
    kids = [numeric_report(f"fd-{k}", [v], tolerance) for k, v in errs.items()]
    return ResidualReport(f"fd-{name}", all(k.passed for k in kids), exact=False, children=kids)


def suite_toolchain(seed: int = 0, tolerance: float = 1e-6) -> ResidualReport:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    names = ["x", "y", "r"]
    bad_rt, bad_idem, checked = [], [], 0
    for k in range(1000):
        text = random_expression_text(rng, names)
        tree = parse_expr(text)
        if parse_expr(to_string(tree)) != tree:
            bad_rt.append(text)
        try:
            once = normalize(tree)
        except (ZeroDivisionError, ValueError):
            continue  # identically zero denominators are reported, not normalized
        checked += 1
        if normalize(once) != once:
            bad_idem.append(text)
    kids = [ResidualReport("parser-round-trip", not bad_rt, detail=f"samples=1000 failures={len(bad_rt)}"),
            ResidualReport("normalize-idempotent", not bad_idem, detail=f"normalized={checked} failures={len(bad_idem)}")]
    for name, g in _fd_models():
        kids.append(fd_cross_check(name, g, probes=3, seed=seed, tolerance=tolerance))
    return _parent("toolchain", kids, t0, 120)


SUITES: dict[str, Suite] = {
    "fg-flat": suite_fg_flat,
    "fg-round-sphere": suite_fg_round_sphere,
    "obstruction": suite_obstruction,
    "weyl-obstruction": suite_weyl_obstruction,
    "identities": suite_identities,
    "boundary": suite_boundary,
    "adn": suite_adn,
    "asymptotics": suite_asymptotics,
    "toolchain": suite_toolchain,
}
