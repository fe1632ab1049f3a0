"""Bundled models with closed-form facts that are re-verified on demand."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..expr import Rat, to_rat
from ..geometry import MetricField, riemann, ricci, scalar_curvature, weyl
from ..report import ResidualReport, exact_zero_report
from .document import MetricDocument, parse_document


@dataclass
class ModelCatalogEntry:
    name: str
    document: MetricDocument
    facts: dict[str, Callable[[MetricDocument], ResidualReport]] = field(default_factory=dict)
    extras: dict[str, object] = field(default_factory=dict)

    def self_test(self) -> ResidualReport:
        kids = [fn(self.document) for fn in self.facts.values()]
        return ResidualReport(f"catalog-{self.name}", all(k.passed for k in kids), children=kids)


class UnknownModelError(KeyError):
    pass


# --- document text builders -------------------------------------------------------------

def _doc(name: str, description: str, coords: list[str], diag: list[str], *, rho: str | None = None,
         kind: str = "compactified", offdiag: dict[tuple[int, int], str] | None = None,
         bcoords: list[str] | None = None, hdiag: list[str] | None = None) -> str:
    lines = [f"name = {name}", f"description = {description}", f"dim = {len(coords)}",
             f"coords = {' '.join(coords)}", f"metric = {kind}"]
    for i, e in enumerate(diag):
        if e != "0":
            lines.append(f'g[{i}][{i}] = "{e}"')
    for (i, j), e in sorted((offdiag or {}).items()):
        lines.append(f'g[{i}][{j}] = "{e}"')
    if rho is not None:
        lines.append(f'rho = "{rho}"')
    if bcoords is not None:
        lines.append(f"boundary_coords = {' '.join(bcoords)}")
    for i, e in enumerate(hdiag or []):
        if e != "0":
            lines.append(f'h[{i}][{i}] = "{e}"')
    return "\n".join(lines) + "\n"


def _sphere_factor(names: list[str]) -> str:
    return f"4/(1+{'+'.join(v + '^2' for v in names)})^2"


# --- facts ------------------------------------------------------------------------------

def _fact_flat(doc: MetricDocument) -> ResidualReport:
    R = riemann(doc.compactified())
    return exact_zero_report("compactified-flat", [R[k] for k in R.keys()])


def _fact_plus_scalar(value: int) -> Callable[[MetricDocument], ResidualReport]:
    def fact(doc: MetricDocument) -> ResidualReport:
        rho = doc.rho_rat()
        g = doc.compactified()
        gp = MetricField(g.coords, [[x / (rho * rho) for x in row] for row in g.g])
        return exact_zero_report("g+-scalar", [scalar_curvature(gp) - value], detail=f"S(g+)={value}")
    return fact


def _fact_plus_einstein(doc: MetricDocument) -> ResidualReport:
    rho = doc.rho_rat()
    g = doc.compactified()
    gp = MetricField(g.coords, [[x / (rho * rho) for x in row] for row in g.g])
    Ric = ricci(gp)
    n = g.dim - 1
    return exact_zero_report("g+-einstein", [Ric[i, j] + n * gp.g[i][j] for i in range(g.dim) for j in range(i, g.dim)])


def _fact_geodesic_factor(u: str) -> Callable[[MetricDocument], ResidualReport]:
    def fact(doc: MetricDocument) -> ResidualReport:
        from ..conformal import CompactifiedMetric, geodesic_gauge_residual
        rep = geodesic_gauge_residual(CompactifiedMetric(doc.compactified(), doc.rho_rat()), u)
        rep.name = "geodesic-factor"
        return rep
    return fact


def _fact_mean_curvature(H: str) -> Callable[[MetricDocument], ResidualReport]:
    def fact(doc: MetricDocument) -> ResidualReport:
        from ..boundary import boundary_data
        from ..conformal import CompactifiedMetric
        bd = boundary_data(CompactifiedMetric(doc.compactified(), doc.rho_rat()))
        return exact_zero_report("mean-curvature", [bd.H - to_rat(H)], detail=f"H={H}")
    return fact


def _fact_fg_closed_form(doc: MetricDocument) -> ResidualReport:
    from ..fgx import einstein_series_residual, fg_expand, jet_from_closed_form, jets_equal
    h = doc.boundary_metric()
    bc = list(h.coords)
    r = Rat.var(doc.coords[0])
    fac = (1 - r * r / 4) ** 2
    ex = fg_expand(h, order=7, rvar=doc.coords[0])
    cf = jet_from_closed_form(bc, [[fac * e for e in row] for row in h.g], 7, rvar=doc.coords[0])
    kids = [exact_zero_report("jet-equals-closed-form", jets_equal(ex.jet, cf, 7), detail="through r^6"),
            einstein_series_residual(cf)]
    kids[1].name = "closed-form-einstein-series"
    return ResidualReport("fg-closed-form", all(k.passed for k in kids), children=kids)


def _fact_einstein_constant(c: int) -> Callable[[MetricDocument], ResidualReport]:
    def fact(doc: MetricDocument) -> ResidualReport:
        g = doc.compactified()
        Ric = ricci(g)
        return exact_zero_report("einstein", [Ric[i, j] - c * g.g[i][j] for i in range(g.dim) for j in range(i, g.dim)],
                                 detail=f"Ric={c}g")
    return fact


def _fact_weyl_nonzero(which: str) -> Callable[[MetricDocument], ResidualReport]:
    def fact(doc: MetricDocument) -> ResidualReport:
        g = doc.compactified() if which == "g" else doc.boundary_metric()
        W = weyl(g)
        nz = [k for k in W.keys() if not W[k].is_zero()]
        return ResidualReport(f"weyl-nonzero-{which}", bool(nz), detail=f"nonzero components={len(nz)}")
    return fact


def _fact_weyl_zero(doc: MetricDocument) -> ResidualReport:
    W = weyl(doc.compactified())
    return exact_zero_report("conformally-flat", [W[k] for k in W.keys()])


def _fact_scalar(value) -> Callable[[MetricDocument], ResidualReport]:
    def fact(doc: MetricDocument) -> ResidualReport:
        return exact_zero_report("scalar", [scalar_curvature(doc.compactified()) - value], detail=f"S={value}")
    return fact


def _fact_not_einstein(doc: MetricDocument) -> ResidualReport:
    g = doc.compactified()
    Ric, S = ricci(g), scalar_curvature(g)
    N = g.dim
    defect = [Ric[i, j] - S * g.g[i][j] / N for i in range(N) for j in range(i, N)]
    nz = any(not d.is_zero() for d in defect)
    return ResidualReport("not-einstein", nz, detail="trace-free Ricci nonzero" if nz else "Einstein")


def _fact_harmonic(functions: list[str]) -> Callable[[MetricDocument], ResidualReport]:
    def fact(doc: MetricDocument) -> ResidualReport:
        from ..geometry import harmonicity_residual
        return harmonicity_residual([to_rat(f) for f in functions], doc.compactified())
    return fact


# --- the catalog ------------------------------------------------------------------------

def _half_space(N: int) -> ModelCatalogEntry:
    c = [f"x{i}" for i in range(N)]
    text = _doc(f"hyperbolic-half-space-{N}d", "upper half-space model; g is g_+", c, ["1/x0^2"] * N,
                rho="x0", kind="plus")
    return ModelCatalogEntry(f"hyperbolic-half-space-{N}d", parse_document(text),
                             {"flat": _fact_flat, "scalar": _fact_plus_scalar(-N * (N - 1))})


def _ball() -> ModelCatalogEntry:
    c = ["t", "y1", "y2", "y3"]
    s = _sphere_factor(c[1:])
    text = _doc("hyperbolic-ball-4d", "Poincare ball, t = 1-|x|, y stereographic on the sphere; rho = (1-|x|^2)/2",
                c, ["1"] + [f"(1-t)^2*{s}"] * 3, rho="t*(2-t)/2")
    return ModelCatalogEntry("hyperbolic-ball-4d", parse_document(text),
                             {"flat": _fact_flat, "einstein": _fact_plus_einstein,
                              "geodesic-factor": _fact_geodesic_factor("4/(2-t)^2"),
                              "mean-curvature": _fact_mean_curvature("-3")},
                             {"geodesic_factor": "4/(2-t)^2", "u_r": 1, "H": -3})


def _fg_sphere(n: int) -> ModelCatalogEntry:
    bc = [f"x{i + 1}" for i in range(n)]
    s = _sphere_factor(bc)
    text = _doc(f"fg-round-sphere-n{n}", f"geodesic compactification over the round S^{n}", ["r"] + bc,
                ["1"] + [f"(1-r^2/4)^2*{s}"] * n, rho="r", hdiag=[s] * n)
    return ModelCatalogEntry(f"fg-round-sphere-n{n}", parse_document(text),
                             {"fg-closed-form": _fact_fg_closed_form, "einstein": _fact_plus_einstein})


def _s2xs2() -> ModelCatalogEntry:
    c = ["p", "q", "u", "v"]
    a, b = _sphere_factor(c[:2]), _sphere_factor(c[2:])
    text = _doc("product-einstein-s2xs2", "unit S^2 x S^2 in stereographic charts", c, [a, a, b, b])
    return ModelCatalogEntry("product-einstein-s2xs2", parse_document(text),
                             {"einstein": _fact_einstein_constant(1), "weyl-nonzero": _fact_weyl_nonzero("g")})


def _perturbed_flat_boundary() -> ModelCatalogEntry:
    bc = ["x1", "x2", "x3", "x4"]
    h = ["1+x2^2", "1", "1", "1"]
    text = _doc("perturbed-flat-boundary-n4", "product dr^2 + h with h = diag(1+x2^2,1,1,1), not conformally flat",
                ["r"] + bc, ["1"] + h, rho="r", hdiag=h)
    return ModelCatalogEntry("perturbed-flat-boundary-n4", parse_document(text),
                             {"weyl-nonzero": _fact_weyl_nonzero("h")})


def _ah_perturbed() -> ModelCatalogEntry:
    c = [f"x{i}" for i in range(5)]
    text = _doc("ah-perturbed-5d", "flat-boundary warped product with a rho^3 perturbation; not Einstein",
                c, ["1"] + ["1+x0^3"] * 4, rho="x0")
    return ModelCatalogEntry("ah-perturbed-5d", parse_document(text), {"not-einstein": _fact_not_einstein},
                             {"einstein_defect_rate": 3})


def _tilted() -> ModelCatalogEntry:
    c = [f"x{i}" for i in range(4)]
    # w^2 delta with w = 1 + x0 q(x1 - x0/4, x2), after x1 -> x1 - x0/4
    q = "((x1-x0/4)/3+x2^2/5)"
    w = f"(1+x0*{q})"
    text = _doc("tilted-half-space-4d", "conformally flat w^2 delta with a sheared chart; H varies along the boundary",
                c, [f"{w}^2*17/16", f"{w}^2", f"{w}^2", f"{w}^2"], offdiag={(0, 1): f"-{w}^2/4"}, rho=f"x0*{w}")
    return ModelCatalogEntry("tilted-half-space-4d", parse_document(text),
                             {"conformally-flat": _fact_weyl_zero, "mean-curvature": _fact_mean_curvature("x1+3/5*x2^2")})


BALL_CHART = ["1/(X1^2+X2^2+X3^2+X4^2)-1",
              "(X3*X1+X4*X2)/(X1^2+X2^2)",
              "(X4*X1-X3*X2)/(X1^2+X2^2)",
              "(X2*X1+X4*X3)/(X1^2+X3^2)"]


def _ball_harmonic_chart() -> ModelCatalogEntry:
    c = ["X1", "X2", "X3", "X4"]
    text = _doc("flat-ball-harmonic-chart", "flat unit ball in R^4; extras list harmonic chart functions", c, ["1"] * 4,
                rho="(1-X1^2-X2^2-X3^2-X4^2)/2")
    return ModelCatalogEntry("flat-ball-harmonic-chart", parse_document(text),
                             {"harmonic-chart": _fact_harmonic(BALL_CHART[:1])},
                             {"chart": BALL_CHART})


def _s2xh2() -> ModelCatalogEntry:
    c = ["p", "q", "u", "v"]
    a = _sphere_factor(c[:2])
    text = _doc("s2xh2", "unit S^2 x H^2: constant zero scalar curvature, not Einstein", c, [a, a, "1/v^2", "1/v^2"])
    return ModelCatalogEntry("s2xh2", parse_document(text),
                             {"scalar": _fact_scalar(0), "not-einstein": _fact_not_einstein})


_BUILDERS: dict[str, Callable[[], ModelCatalogEntry]] = {
    "hyperbolic-half-space-4d": lambda: _half_space(4),
    "hyperbolic-half-space-5d": lambda: _half_space(5),
    "hyperbolic-ball-4d": _ball,
    "fg-round-sphere-n3": lambda: _fg_sphere(3),
    "fg-round-sphere-n4": lambda: _fg_sphere(4),
    "product-einstein-s2xs2": _s2xs2,
    "perturbed-flat-boundary-n4": _perturbed_flat_boundary,
    "ah-perturbed-5d": _ah_perturbed,
    "tilted-half-space-4d": _tilted,
    "flat-ball-harmonic-chart": _ball_harmonic_chart,
    "s2xh2": _s2xh2,
}


def names() -> list[str]:
    return list(_BUILDERS)


def catalog(name: str, self_test: bool = False) -> ModelCatalogEntry:
    try:
        entry = _BUILDERS[name]()
    except KeyError:
        raise UnknownModelError(f"unknown model {name!r}; known: {', '.join(_BUILDERS)}") from None
    if self_test:
        rep = entry.self_test()
        if not rep.passed:
            raise AssertionError("\n".join(rep.lines()))
    return entry
