"""Conformal changes, defining functions and asymptotically hyperbolic diagnostics.

Dimension bookkeeping: ``N = dim`` and ``n = N - 1`` (the boundary
dimension).  For a compactification ``g = rho^2 g_+``

    Ric(g) = -(n-1) D^2 rho / rho + [n(|d rho|^2 - 1)/rho^2 - Delta rho / rho] g + E
    S(g)   = -2n Delta rho / rho + n(n+1)(|d rho|^2 - 1)/rho^2 + tr_g E

with ``E = Ric(g_+) + n g_+``: the "o(1)" terms are exactly ``E`` and its
trace, which is what the asymptotic checks measure.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .expr import ExprLike, Rat, apply_function, evaluate_rat, to_rat
from .geometry import (
    MetricField,
    _inv,
    gradient_norm2,
    hessian,
    laplace_beltrami,
    ricci,
    riemann,
    scalar_curvature,
)
from .report import ResidualReport, exact_zero_report, numeric_report


class PreconditionError(ValueError):
    pass


@dataclass
class CompactifiedMetric:
    """``g = rho^2 g_+`` with the boundary at ``boundary_coord = 0``."""

    g: MetricField
    rho: Rat
    boundary_coord: str | None = None
    box: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        self.rho = to_rat(self.rho)
        if self.boundary_coord is None:
            self.boundary_coord = self.g.coords[0]
        if self.boundary_coord not in self.g.coords:
            raise ValueError(f"unknown boundary coordinate {self.boundary_coord!r}")

    @property
    def N(self) -> int:
        return self.g.dim

    @property
    def n(self) -> int:
        return self.g.dim - 1

    @property
    def t(self) -> str:
        return self.boundary_coord

    def interval(self, name: str) -> tuple[float, float]:
        if name in self.box:
            return self.box[name]
        return (0.05, 0.5) if name == self.t else (-0.5, 0.5)

    def probes(self, count: int, seed: int = 0, boundary: bool = False) -> list[dict[str, Fraction]]:
        rng = random.Random(seed)
        pts = []
        for _ in range(count):
            p = {}
            for x in self.g.coords:
                lo, hi = self.interval(x)
                p[x] = Fraction(round((lo + (hi - lo) * rng.random()) * 4096), 4096)
            if boundary:
                p[self.t] = Fraction(0)
            pts.append(p)
        return pts

    def g_plus(self) -> MetricField:
        return conformal_rescale(self.g, self.rho.inv())

    def check_defining(self, probes: int = 5, seed: int = 0) -> ResidualReport:
        """rho > 0 inside, rho = 0 on the boundary, d rho != 0 there."""
        on_bdry = self.rho.subs({self.t: 0})
        inside = [evaluate_rat(self.rho, {k: float(v) for k, v in p.items()}) for p in self.probes(probes, seed)]
        grad = gradient_norm2(self.rho, self.g)
        at_b = [evaluate_rat(grad, {k: float(v) for k, v in p.items()})
                for p in self.probes(probes, seed, boundary=True)]
        ok = on_bdry.is_zero() and all(v > 0 for v in inside) and all(v > 0 for v in at_b)
        return ResidualReport("defining-function", ok, detail=f"rho|bdry={on_bdry} min|d rho|^2={min(at_b):.3g}")


def _float_point(p: Mapping) -> dict[str, float]:
    return {k: float(v) for k, v in p.items()}


def conformal_rescale(g: MetricField, factor: ExprLike) -> MetricField:
    """``factor^2 g``."""
    f = to_rat(factor)
    if f.is_zero():
        raise ValueError("conformal factor is identically zero")
    f2 = f * f
    return MetricField(g.chart, [[f2 * x for x in row] for row in g.g])


def linear_change(g: MetricField, J: Sequence[Sequence[ExprLike]]) -> MetricField:
    """Pull back along ``X = J x`` (constant J): ``g'_ab = J^c_a J^d_b g_cd(Jx)``."""
    n = g.dim
    J = [[to_rat(x) for x in row] for row in J]
    names = g.coords
    images = {names[c]: _sum_r(J[c][a] * Rat.var(names[a]) for a in range(n)) for c in range(n)}
    G = [[x.subs(images) for x in row] for row in g.g]
    out = [[_sum_r(J[c][a] * J[d][b] * G[c][d] for c in range(n) for d in range(n)) for b in range(n)]
           for a in range(n)]
    return MetricField(g.chart, out)


def _sum_r(it) -> Rat:
    out = Rat.zero()
    for x in it:
        out = out + x
    return out


# --- conformal-change relations --------------------------------------------------------

def conformal_ricci_relation(gbar: MetricField, u: ExprLike, sign: int = -1) -> list[list[Rat]]:
    """Right side of ``Ric(u^-2 gbar) = Ric_bar + (n-1) D^2 u/u
    + (Delta u/u + sign * n |du|^2/u^2) gbar``; ``sign=-1`` is correct."""
    u = to_rat(u)
    n = gbar.dim - 1
    ric = ricci(gbar)
    H = hessian(u, gbar)
    lap = laplace_beltrami(u, gbar)
    grad2 = gradient_norm2(u, gbar)
    uinv = u.inv()
    scal = lap * uinv + grad2 * uinv * uinv * (sign * n)
    N = gbar.dim
    return [[ric[a, b] + H[a, b] * uinv * (n - 1) + scal * gbar.g[a][b] for b in range(N)] for a in range(N)]


def conformal_ricci_relation_residual(gbar: MetricField, u: ExprLike, seed: int = 0) -> ResidualReport:
    """Ricci of ``u^-2 gbar`` against the conformal-change formula.

    Reports the formula with ``- n|du|^2/u^2`` (certainly zero) and the
    variant with ``+ n|du|^2/u^2`` for comparison.
    """
    u = to_rat(u)
    g = conformal_rescale(gbar, u.inv())
    ric = ricci(g)
    N = gbar.dim
    out = []
    for sign, name in ((-1, "conformal-ricci-relation"), (1, "conformal-ricci-relation-plus-sign")):
        rhs = conformal_ricci_relation(gbar, u, sign)
        out.append(exact_zero_report(name, [ric[a, b] - rhs[a][b] for a in range(N) for b in range(a, N)],
                                     seed=seed))
    main, alt = out
    alt.passed = True  # informational: expected nonzero unless du = 0
    alt.detail = (alt.detail + " informational").strip()
    main.children.append(alt)
    return main


def yamabe_residual(g: MetricField, u: ExprLike, lam: Fraction | int, *, dimension: int | None = None,
                    probes: Sequence[Mapping] | None = None, tolerance: float = 1e-8,
                    seed: int = 0) -> ResidualReport:
    """``Delta u - c S u + c lam u^((N+2)/(N-2))`` with ``c = (N-2)/(4(N-1))``.

    ``dimension`` overrides ``N`` for the alternative reading of the
    exponent; by default ``N = dim``.  Exact when the exponent is an
    integer, numeric at ``probes`` otherwise.
    """
    N = dimension if dimension is not None else g.dim
    if N < 3:
        raise ValueError("the Yamabe equation needs dimension at least 3")
    u = to_rat(u)
    lam = Fraction(lam)
    c = Fraction(N - 2, 4 * (N - 1))
    expo = Fraction(N + 2, N - 2)
    lap = laplace_beltrami(u, g)
    S = scalar_curvature(g)
    base = lap - S * u * c
    pts = list(probes) if probes is not None else _default_probes(g, seed)
    for p in pts:
        if evaluate_rat(u, _float_point(p)) <= 0:
            raise PreconditionError("u must be positive at every probe point")
    if expo.denominator == 1:
        res = base + u ** int(expo) * (c * lam)
        rep = exact_zero_report("yamabe", [res], seed=seed, detail=f"N={N} exponent={expo}")
        rep.components["residual"] = res
        return rep
    vals = []
    with mpmath.workdps(30):
        for p in pts:
            q = {k: mpmath.mpf(v.numerator) / v.denominator for k, v in p.items()}
            b = evaluate_rat(base, q, "mpmath")
            uv = evaluate_rat(u, q, "mpmath")
            vals.append(b + c * lam * uv ** (mpmath.mpf(expo.numerator) / expo.denominator))
    return numeric_report("yamabe", vals, tolerance, detail=f"N={N} exponent={expo} numeric")


def _default_probes(g: MetricField, seed: int, count: int = 5) -> list[dict[str, Fraction]]:
    rng = random.Random(seed)
    return [{x: Fraction(rng.randint(-400, 400), 1000) for x in g.coords} for _ in range(count)]


# --- geodesic defining function ----------------------------------------------------

def geodesic_gauge_expression(cm: CompactifiedMetric, u: ExprLike) -> Rat:
    """``2 g(d rho, d log u) + rho |d log u|^2 - (1 - |d rho|^2)/rho`` in normal form."""
    u = to_rat(u)
    g = cm.g
    gi = _inv(g)
    names = g.coords
    n = g.dim
    uinv = u.inv()
    dlog = [u.diff(x) * uinv for x in names]
    drho = [cm.rho.diff(x) for x in names]
    cross = _sum_r(gi[a][b] * drho[a] * dlog[b] for a in range(n) for b in range(n) if not gi[a][b].is_zero())
    sq = _sum_r(gi[a][b] * dlog[a] * dlog[b] for a in range(n) for b in range(n) if not gi[a][b].is_zero())
    grad2 = gradient_norm2(cm.rho, g)
    return cross * 2 + cm.rho * sq - (1 - grad2) * cm.rho.inv()


def geodesic_gauge_residual(cm: CompactifiedMetric, u: ExprLike, *, probes: int = 5, seed: int = 0,
                            tolerance: float = 1e-8) -> ResidualReport:
    u = to_rat(u)
    ub = u.subs({cm.t: 0}) - 1
    if not ub.is_zero():
        raise PreconditionError("u must equal 1 on the boundary")
    for p in cm.probes(probes, seed):
        if evaluate_rat(u, _float_point(p)) <= 0:
            raise PreconditionError("u must be positive at every probe point")
    res = geodesic_gauge_expression(cm, u)
    if not res.den.is_constant():
        den_b = Rat(res.ctx, res.den, res.ctx.constant(1)).subs({cm.t: 0})
        if den_b.is_zero():
            return ResidualReport("geodesic-gauge", False, detail="pole at rho=0 survives: not a collar solution",
                                  components={"residual": res})
    rep = exact_zero_report("geodesic-gauge", [res], seed=seed, allow_numeric=True)
    if rep.certainty is not None and rep.certainty.name == "NONZERO":
        vals = [evaluate_rat(res, _float_point(p)) for p in cm.probes(probes, seed)]
        rep = numeric_report("geodesic-gauge", vals, tolerance)
    rep.components["residual"] = res
    return rep


@dataclass
class GeodesicFactor:
    """Radial solution ``u(t)`` of the geodesic-gauge equation."""

    t: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    interpolant: Callable[[float], float]
    u_t0: float
    depth_reached: float
    complete: bool
    message: str = ""

    def __call__(self, t: float) -> float:
        return float(self.interpolant(t))


def solve_geodesic_factor_radial(cm: CompactifiedMetric, depth: float, *, rtol: float = 1e-10,
                                 atol: float = 1e-12, samples: int = 65) -> GeodesicFactor:
    """Integrate ``w' = (1 - G rho'^2) / (rho (sqrt(G) + G rho'))``, ``w = log u``.

    ``G = g^{tt}``; both ``G`` and ``rho`` must depend on ``t`` alone.  The
    quotient ``(1 - G rho'^2)/rho`` is formed exactly, which removes the
    apparent singularity at the boundary.
    """
    t = cm.t
    gi = _inv(cm.g)
    k = cm.g.coords.index(t)
    G = gi[k][k]
    rho = cm.rho
    for name, e in (("g^tt", G), ("rho", rho)):
        extra = e.used_names() - {t}
        if extra:
            raise PreconditionError(f"{name} depends on {sorted(extra)}; radial symmetry required")
    drho = rho.diff(t)
    q = (1 - G * drho * drho) / rho
    if not q.den.is_constant():
        qb = Rat(q.ctx, q.den, q.ctx.constant(1)).subs({t: 0})
        if qb.is_zero():
            raise PreconditionError("|d rho| != 1 on the boundary; the equation has a true pole")

    def rhs(s, w):
        pt = {t: s}
        Gv = evaluate_rat(G, pt)
        den = math.sqrt(Gv) + Gv * evaluate_rat(drho, pt)
        if Gv <= 0 or den <= 0:
            raise FloatingPointError("collar ends: g^tt or the denominator is not positive")
        return [evaluate_rat(q, pt) / den]

    def blowup(s, w):
        Gv = evaluate_rat(G, {t: s})
        return min(Gv, math.sqrt(max(Gv, 0)) + Gv * evaluate_rat(drho, {t: s})) - 1e-9

    blowup.terminal = True
    try:
        sol = solve_ivp(rhs, (0.0, depth), [0.0], method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True, events=blowup)
        reached = float(sol.t[-1])
        ok = sol.status == 0 and reached >= depth * (1 - 1e-12)
        msg = sol.message
    except FloatingPointError as exc:
        return GeodesicFactor(np.array([0.0]), np.array([1.0]), np.array([0.0]), lambda s: 1.0,
                              float("nan"), 0.0, False, str(exc))
    ts = np.linspace(0.0, reached, samples)
    ws = sol.sol(ts)[0]
    rhos = np.array([evaluate_rat(rho, {t: float(s)}) for s in ts])
    dense = sol.sol

    def interp(s: float) -> float:
        if s < 0 or s > reached + 1e-15:
            raise ValueError(f"t={s} outside the solved collar [0, {reached}]")
        return math.exp(float(dense(s)[0]))

    u_t0 = rhs(0.0, [0.0])[0]  # u(0) = 1 so u'(0) = w'(0)
    if not ok:
        msg = f"maximal depth reached: t={reached:.6g} ({msg})"
    return GeodesicFactor(ts, np.exp(ws), rhos, interp, u_t0, reached, ok, msg)


# --- asymptotic rates -----------------------------------------------------------------

def _plane_trace(H, g, a, b):
    det = g[a][a] * g[b][b] - g[a][b] * g[a][b]
    return (g[b][b] * H[a, a] - g[a][b] * H[a, b] * 2 + g[a][a] * H[b, b]) / det, det


def _einstein_defect(cm: CompactifiedMetric):
    g = cm.g
    N = g.dim
    n = N - 1
    gp = cm.g_plus()
    ricp = ricci(gp)
    return [[ricp[a, b] + gp.g[a][b] * n for b in range(N)] for a in range(N)], gp


@dataclass
class RateTable:
    rho: list[float]
    values: list[float]
    exponents: list[float]
    extrapolated: list[float]

    @property
    def rate(self) -> float:
        if all(v == 0 for v in self.values):
            return math.inf
        if self.extrapolated:
            return self.extrapolated[-1]
        return self.exponents[-1] if self.exponents else math.nan


def richardson_rates(rhos: Sequence[float], values: Sequence[float]) -> RateTable:
    """Local exponents ``log(q_k/q_k+1)/log(rho_k/rho_k+1)`` and one Richardson step."""
    ex = []
    for k in range(len(values) - 1):
        a, b = values[k], values[k + 1]
        if a == 0 or b == 0:
            ex.append(math.inf if a == 0 and b == 0 else math.nan)
            continue
        ex.append(math.log(abs(a) / abs(b)) / math.log(rhos[k] / rhos[k + 1]))
    rich = [2 * ex[k + 1] - ex[k] for k in range(len(ex) - 1)
            if math.isfinite(ex[k]) and math.isfinite(ex[k + 1])]
    return RateTable(list(rhos), list(values), ex, rich)


def ah_curvature_asymptotics(cm: CompactifiedMetric, at: Mapping[str, Fraction] | None = None, *,
                             k0: int = 3, samples: int = 6, t0: float = 1.0, dps: int = 50,
                             seed: int = 0) -> ResidualReport:
    """Decay exponents along the normal ray through ``at`` (tangential values).

    Quantities, each sampled at ``t = t0 2^-k``:
    ``|K_+ + 1|`` over coordinate planes, ``|E|_{g_+}``, the Ricci-relation
    residual ``|E|_g`` and the scalar-relation residual ``|tr_g E|``.  The
    Hessian-curvature identity is checked exactly.
    """
    g = cm.g
    N = g.dim
    if at is None:
        at = {x: Fraction(1, 7) * (i + 1) for i, x in enumerate(g.coords) if x != cm.t}
    E, gp = _einstein_defect(cm)
    gi = _inv(g)
    trE = _sum_r(gi[a][b] * E[a][b] for a in range(N) for b in range(N) if not gi[a][b].is_zero())
    Rp = riemann(gp)
    Rg = riemann(g)
    H = hessian(cm.rho, g)
    grad2 = gradient_norm2(cm.rho, g)
    planes = [(a, b) for a in range(N) for b in range(a + 1, N)]
    Kp = []
    ident = []
    for a, b in planes:
        detp = gp.g[a][a] * gp.g[b][b] - gp.g[a][b] * gp.g[a][b]
        kp = Rp[a, b, a, b] / detp
        Kp.append(kp + 1)
        trP, det = _plane_trace(H, g.g, a, b)
        K = Rg[a, b, a, b] / det
        ident.append(K - (kp + grad2) / (cm.rho * cm.rho) + trP / cm.rho)
    rep31 = exact_zero_report("hessian-curvature-identity", ident, seed=seed)

    ts, rhos = [], []
    qK, qEp, qEg, qtr = [], [], [], []
    with mpmath.workdps(dps):
        for k in range(k0, k0 + samples):
            tv = mpmath.mpf(t0) / mpmath.mpf(2) ** k
            pt = {x: mpmath.mpf(v.numerator) / v.denominator for x, v in at.items()}
            pt[cm.t] = tv
            rv = evaluate_rat(cm.rho, pt, "mpmath")
            if not rv > 0:
                raise PreconditionError("ray leaves the region where rho > 0")
            ts.append(float(tv))
            rhos.append(float(rv))
            qK.append(float(max(abs(evaluate_rat(x, pt, "mpmath")) for x in Kp)))
            Ev = mpmath.matrix([[evaluate_rat(E[a][b], pt, "mpmath") for b in range(N)] for a in range(N)])
            Gi = mpmath.matrix([[evaluate_rat(gi[a][b], pt, "mpmath") for b in range(N)] for a in range(N)])
            M = Gi * Ev
            ng = mpmath.sqrt(abs(sum(M[a, b] * M[b, a] for a in range(N) for b in range(N))))
            qEg.append(float(ng))
            qEp.append(float(ng * rv * rv))
            qtr.append(float(abs(sum(M[a, a] for a in range(N)))))
    tables = {
        "sectional-K+1": richardson_rates(rhos, qK),
        "einstein-defect-g+": richardson_rates(rhos, qEp),
        "ricci-relation-residual": richardson_rates(rhos, qEg),
        "scalar-relation-residual": richardson_rates(rhos, qtr),
    }
    parent = ResidualReport("ah-asymptotics", rep31.passed, children=[rep31])
    for name, tab in tables.items():
        child = ResidualReport(name, True, exact=False, rate=tab.rate,
                               magnitude=tab.values[-1], detail=f"samples={len(tab.values)}")
        child.components["table"] = tab
        parent.children.append(child)
    parent.components["tables"] = tables
    parent.components["t"] = ts
    return parent


def rates_of(rep: ResidualReport) -> dict[str, float]:
    return {c.name: c.rate for c in rep.children if c.rate is not None}


# --- Einstein Hessian relation ---------------------------------------------------------

def einstein_hessian_expression(cm: CompactifiedMetric, pair: tuple[int, int] = (0, 1)) -> Rat:
    """``Delta rho - (n+1) D^2 rho_01 / g_01 - (n+1)/(n-1) rho (Ric_01 - S g_01/(n+1)) / g_01``."""
    g = cm.g
    a, b = pair
    n = g.dim - 1
    g01 = g.g[a][b]
    if g01.is_zero():
        raise PreconditionError(f"g_{a}{b} vanishes identically")
    H = hessian(cm.rho, g)
    ric = ricci(g)
    S = scalar_curvature(g)
    lap = laplace_beltrami(cm.rho, g)
    inv = g01.inv()
    return (lap - H[a, b] * inv * (n + 1)
            - cm.rho * (ric[a, b] - S * g01 * Fraction(1, n + 1)) * inv * Fraction(n + 1, n - 1))


def einstein_hessian_residual(cm: CompactifiedMetric, at: Mapping[str, float], pair: tuple[int, int] = (0, 1)) -> float:
    a, b = pair
    g01 = evaluate_rat(cm.g.g[a][b], _float_point(at))
    if g01 == 0:
        raise PreconditionError(f"g_{a}{b} = 0 at the evaluation point")
    return float(evaluate_rat(einstein_hessian_expression(cm, pair), _float_point(at)))


def einstein_hessian_decay(cm: CompactifiedMetric, at: Mapping[str, Fraction], pair=(0, 1), *, k0: int = 3,
                           samples: int = 6, dps: int = 50) -> RateTable:
    expr = einstein_hessian_expression(cm, pair)
    rhos, vals = [], []
    with mpmath.workdps(dps):
        for k in range(k0, k0 + samples):
            pt = {x: mpmath.mpf(v.numerator) / v.denominator for x, v in at.items()}
            pt[cm.t] = mpmath.mpf(1) / mpmath.mpf(2) ** k
            rhos.append(float(evaluate_rat(cm.rho, pt, "mpmath")))
            vals.append(float(abs(evaluate_rat(expr, pt, "mpmath"))))
    return richardson_rates(rhos, vals)
