"""Fefferman-Graham expansion of an Einstein filling in geodesic gauge.

With ``gbar = dr^2 + g_r`` and ``g_+ = r^-2 gbar`` Einstein, the tangential
and radial components of ``Ric(g_+) + n g_+ = 0`` read

    r g'' - (n-1) g' - tr(g^-1 g') g - r g' g^-1 g' + (r/2) tr(g^-1 g') g'
        - 2 r Ric(g_r) = 0
    r tr(g^-1 g'') - (r/2) tr(g^-1 g' g^-1 g') - tr(g^-1 g') = 0

where ``'`` is d/dr and ``n`` is the boundary dimension.  A term
``X r^p`` enters the first equation at ``r^(p-1)`` through
``p[(p-n) X - tr_h(X) h]``; the expansion solves this order by order,
splitting trace and trace-free parts.  At ``p = n`` the trace-free part
is free and a ``Y r^n log r`` term absorbs the trace-free residual.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import flint

from .expr import ExprLike, Rat, to_rat
from .geometry import (
    MetricField,
    SingularMetricError,
    _G,
    _gamma_second,
    _riemann_component,
    mat_inverse,
    mat_mul,
    mat_trace,
    ricci,
    scalar_curvature,
)
from .report import ResidualReport, exact_zero_report
from .series import INF, LogSeries

Matrix = list[list[Rat]]


class JetOrderError(ValueError):
    pass


def _zeros(n: int) -> Matrix:
    return [[Rat.zero() for _ in range(n)] for _ in range(n)]


def _is_zero_matrix(m: Matrix) -> bool:
    return all(x.is_zero() for row in m for x in row)


def _trace_h(hinv: Matrix, m: Matrix) -> Rat:
    n = len(m)
    out = Rat.zero()
    for i in range(n):
        for j in range(n):
            if not hinv[i][j].is_zero() and not m[j][i].is_zero():
                out = out + hinv[i][j] * m[j][i]
    return out


def _combine(a: Matrix, b: Matrix, ca=1, cb=1) -> Matrix:
    n = len(a)
    return [[a[i][j] * ca + b[i][j] * cb for j in range(n)] for i in range(n)]


def _scale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def trace_free_part(h: Matrix, hinv: Matrix, m: Matrix) -> Matrix:
    n = len(m)
    t = _trace_h(hinv, m) * Fraction(1, n)
    return [[m[i][j] - t * h[i][j] for j in range(n)] for i in range(n)]


@dataclass
class RadialJet:
    """``g_r = sum_p X_p r^p + sum_p Y_p r^p log r`` known for p < order."""

    coords: tuple[str, ...]
    h: Matrix
    coeffs: dict[tuple[int, int], Matrix]
    order: int
    rvar: str = "r"

    @property
    def n(self) -> int:
        return len(self.coords)

    def coefficient(self, p: int, log: int = 0) -> Matrix:
        if p >= self.order:
            raise JetOrderError(f"order {p} is beyond the jet (known below {self.order})")
        return self.coeffs.get((p, log), _zeros(self.n))

    def taylor(self, p: int) -> Matrix:
        """``d^p/dr^p g_r`` at r=0 for the log-free part (p! X_p)."""
        return _scale(self.coefficient(p), math.factorial(p))

    def series(self, order: int | None = None) -> list[list[LogSeries]]:
        K = self.order if order is None else min(order, self.order)
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                terms = {}
                for (p, l), m in self.coeffs.items():
                    if p < K and not m[i][j].is_zero():
                        terms[(p, l)] = m[i][j]
                row.append(LogSeries(terms, K, self.rvar))
            out.append(row)
        return out

    def bulk_metric(self) -> MetricField:
        """``gbar = dr^2 + g_r`` on the chart (r, x...) with series entries."""
        gs = self.series()
        n = self.n
        one = LogSeries.constant(1, INF, self.rvar)
        zero = LogSeries({}, INF, self.rvar)
        rows = [[one] + [zero] * n]
        for i in range(n):
            rows.append([zero] + gs[i])
        return MetricField((self.rvar,) + self.coords, rows)

    def log_coefficient(self) -> Matrix | None:
        n = self.n
        if n % 2 or n >= self.order:
            return None
        return self.coefficient(n, 1)


@dataclass
class ObstructionReport:
    n: int
    trace_constraint: Rat            # h^{kl} d_r^n g_kl at r=0
    f: Matrix | None                 # log coefficient, n even
    free_data: Matrix                # trace-free part of g^(n) used
    free_data_determined: bool = False
    rr_consistency: Rat | None = None  # rr equation at p=n minus ij trace result
    log_capped_at: float = INF
    notes: list[str] = field(default_factory=list)

    def f_trace(self, h_inv: Matrix) -> Rat | None:
        return None if self.f is None else _trace_h(h_inv, self.f)


@dataclass
class Expansion:
    jet: RadialJet
    obstruction: ObstructionReport


# --- the Einstein operator on series ----------------------------------------------

def _series_matrix_ops(gs: list[list[LogSeries]], coords: Sequence[str], rvar: str):
    n = len(gs)
    gi = mat_inverse(gs)
    d1 = [[x.diff(rvar) for x in row] for row in gs]
    d2 = [[x.diff(rvar) for x in row] for row in d1]
    A = mat_mul(gi, d1)  # g^-1 g'
    trA = mat_trace(A)
    return gi, d1, d2, A, trA


def einstein_residuals(gs: list[list[LogSeries]], coords: Sequence[str], rvar: str = "r",
                       constraints: bool = False):
    """Series residuals of the ij and rr equations above.

    With ``constraints`` also returns the mixed (ir) components
    ``D_i = div(g')_i - d_i tr(g^-1 g')``, which must vanish as well.
    """
    n = len(gs)
    r = LogSeries.monomial(1, 1, var=rvar)
    gi, d1, d2, A, trA = _series_matrix_ops(gs, coords, rvar)
    gm = MetricField(coords, gs)
    ric = ricci(gm)
    d1gid1 = mat_mul(d1, A)  # g' g^-1 g'
    half = Fraction(1, 2)
    E = []
    for i in range(n):
        row = []
        for j in range(n):
            v = (r * d2[i][j] - d1[i][j] * (n - 1) - trA * gs[i][j] - r * d1gid1[i][j]
                 + r * trA * d1[i][j] * half - r * ric[i, j] * 2)
            row.append(v)
        E.append(row)
    B = mat_mul(gi, d2)
    AA = mat_mul(A, A)
    Err = r * mat_trace(B) - r * mat_trace(AA) * half - trA
    if not constraints:
        return E, Err
    g2 = _gamma_second(gm)
    D = []
    for i in range(n):
        terms = [-trA.diff(coords[i])]
        for j in range(n):
            for k in range(n):
                if gi[j][k].is_zero():
                    continue
                cov = d1[i][j].diff(coords[k])
                for l in range(n):
                    cov = cov - _G(g2, l, k, i) * d1[l][j] - _G(g2, l, k, j) * d1[i][l]
                terms.append(gi[j][k] * cov)
        acc = terms[0]
        for t in terms[1:]:
            acc = acc + t
        D.append(acc)
    return E, Err, D


def _coeff_matrix(E, k: int, log: int) -> Matrix:
    return [[x.coeff(k, log) for x in row] for row in E]


def _solve_operator(h: Matrix, hinv: Matrix, p: int, n: int, rhs: Matrix) -> Matrix:
    """Solve ``(p-n) X - tr_h(X) h = rhs`` (p != n, p != 2n)."""
    t = _trace_h(hinv, rhs) * Fraction(1, p - 2 * n)
    tf = trace_free_part(h, hinv, rhs)
    return [[tf[i][j] * Fraction(1, p - n) + t * h[i][j] * Fraction(1, n) for j in range(n)] for i in range(n)]


def _symmetrize(m: Matrix) -> Matrix:
    n = len(m)
    for i in range(n):
        for j in range(i):
            m[j][i] = m[i][j]
    return m


def fg_expand(
    h: MetricField | Sequence[Sequence[ExprLike]],
    order: int | None = None,
    free_data: Sequence[Sequence[ExprLike]] | None = None,
    coords: Sequence[str] | None = None,
    rvar: str = "r",
    max_order: int | None = None,
) -> Expansion:
    """Expand ``g_r`` to ``r^(order-1)`` from the boundary metric ``h``."""
    if not isinstance(h, MetricField):
        if coords is None:
            raise ValueError("coords are required when h is given as a matrix")
        h = MetricField(coords, h)
    coords = h.coords
    n = len(coords)
    if rvar in coords:
        raise ValueError(f"radial variable {rvar!r} clashes with a boundary coordinate")
    if n < 3:
        raise ValueError("boundary dimension must be at least 3")
    K = n + 4 if order is None else order
    limit = max_order if max_order is not None else max(n + 4, K)
    if K < 2:
        raise ValueError("order must be at least 2")
    if K > limit:
        raise ValueError(f"order {K} exceeds the configured maximum {limit}")
    H = [row[:] for row in h.g]
    try:
        Hinv = mat_inverse(H)
    except SingularMetricError:
        raise SingularMetricError("boundary metric is singular") from None

    fd = _zeros(n)
    if free_data is not None:
        fd = _symmetrize([[to_rat(x) for x in row] for row in free_data])
        if not _trace_h(Hinv, fd).is_zero():
            raise ValueError("free data must be trace-free with respect to h")

    coeffs: dict[tuple[int, int], Matrix] = {(0, 0): H}
    notes: list[str] = []
    rr_consistency = None
    trace_constraint = Rat.zero()
    capped = INF
    known = K
    for p in range(1, K):
        jet = RadialJet(coords, H, coeffs, p + 1, rvar)
        E, Err = einstein_residuals(jet.series(), coords, rvar)
        e_order = min(x.order for row in E for x in row)
        if e_order < p:
            capped = min(capped, p)
            notes.append(f"(log r)^2 terms first enter at order {p}; expansion stopped there")
            known = p
            break
        R = _coeff_matrix(E, p - 1, 0)
        RL = _coeff_matrix(E, p - 1, 1)
        if p == n:
            # log-free trace, free trace-free part, log term absorbs the rest
            Y = _scale(trace_free_part(H, Hinv, R), Fraction(-1, n))
            trY = _trace_h(Hinv, RL)
            if not trY.is_zero():
                notes.append("log residual at order n has a trace; not expected for Einstein data")
            trX = _trace_h(Hinv, R) * Fraction(1, n * n)
            X = _combine(fd, _scale(H, trX * Fraction(1, n)))
            trace_constraint = trX * math.factorial(n)
            if n % 2 == 0 or not _is_zero_matrix(Y):
                coeffs[(p, 1)] = _symmetrize(Y)
            if n > 2:
                rr = Err.coeff(p - 1, 0)
                # rr equation at order n: n(n-2) trX + (2n-2) trY + rr = 0
                rr_consistency = trX * (n * (n - 2)) + _trace_h(Hinv, Y) * (2 * n - 2) + rr
        elif p == 2 * n:
            rrL = Err.coeff(p - 1, 1)
            rr = Err.coeff(p - 1, 0)
            trY = -rrL * Fraction(1, p * (p - 2))
            Ytf = _scale(trace_free_part(H, Hinv, RL), Fraction(-1, p * (p - n)))
            Y = _combine(Ytf, _scale(H, trY * Fraction(1, n)))
            trX = -(rr + trY * (2 * p - 2)) * Fraction(1, p * (p - 2))
            src = _combine(R, _combine(_scale(Y, 2 * p - n), _scale(H, -trY)))
            Xtf = _scale(trace_free_part(H, Hinv, src), Fraction(-1, p * (p - n)))
            X = _combine(Xtf, _scale(H, trX * Fraction(1, n)))
            if not _is_zero_matrix(Y):
                coeffs[(p, 1)] = _symmetrize(Y)
        else:
            Y = _solve_operator(H, Hinv, p, n, _scale(RL, Fraction(-1, p)))
            src = _combine(R, _combine(_scale(Y, 2 * p - n), _scale(H, -_trace_h(Hinv, Y))))
            X = _solve_operator(H, Hinv, p, n, _scale(src, Fraction(-1, p)))
            if not _is_zero_matrix(Y):
                coeffs[(p, 1)] = _symmetrize(Y)
        X = _symmetrize(X)
        if not _is_zero_matrix(X):
            coeffs[(p, 0)] = X
    jet = RadialJet(coords, H, coeffs, known, rvar)
    f = jet.coefficient(n, 1) if n % 2 == 0 and n < known else None
    if n % 2 == 1 and n < known:
        odd_log = coeffs.get((n, 1))
        if odd_log is not None:
            notes.append("odd n produced a log coefficient")
    odd = [p for p in range(1, min(n, known), 2) if not _is_zero_matrix(jet.coefficient(p))]
    if odd:
        notes.append(f"nonzero odd coefficients below n at orders {odd}")
    rep = ObstructionReport(n, trace_constraint, f, fd, False, rr_consistency, capped, notes)
    return Expansion(jet, rep)


def _first_nonzero_order(series_list) -> int | None:
    orders = [k for x in series_list for (k, _l) in x.terms]
    return min(orders) if orders else None


def einstein_series_residual(jet: RadialJet, seed: int = 0) -> ResidualReport:
    """Substitute the jet into the Einstein equations.

    The tangential equation must vanish through ``r^(order-2)``.  The
    radial and mixed constraint equations must vanish through ``r^(n-2)``;
    past that they hold only when the trace-free free data at order n has
    the divergence the constraints dictate, so their first failing order is
    reported rather than asserted.
    """
    n = jet.n
    E, Err, D = einstein_residuals(jet.series(), jet.coords, jet.rvar, constraints=True)
    top = jet.order - 1
    ij_vals = [c for row in E for x in row for (k, _l), c in x.terms.items() if k < top]
    ij = exact_zero_report("ij-equation", ij_vals, seed=seed, detail=f"through r^{top - 1}")
    lim = min(n - 1, top)
    con_vals = [c for x in [Err] + D for (k, _l), c in x.terms.items() if k < lim]
    con = exact_zero_report("rr-ir-constraints", con_vals, seed=seed, detail=f"through r^{lim - 1}")
    first = _first_nonzero_order([Err] + D)
    info = ResidualReport(
        "constraints-beyond-n", True,
        detail=("hold through computed order" if first is None or first >= top
                else f"first nonzero at r^{first}: free data at order n is not divergence-compatible"))
    info.components["first_nonzero"] = first
    rep = ResidualReport("fg-einstein-series-residual", ij.passed and con.passed, children=[ij, con, info],
                         detail=f"order={jet.order}")
    return rep


def jet_from_closed_form(coords: Sequence[str], gr: Sequence[Sequence[ExprLike]], order: int,
                         rvar: str = "r") -> RadialJet:
    """Taylor-expand a closed-form (log-free) ``g_r`` in ``rvar`` to ``order``."""
    n = len(coords)
    coeffs: dict[tuple[int, int], Matrix] = {}
    cur = [[to_rat(x) for x in row] for row in gr]
    fact = 1
    for p in range(order):
        if p:
            cur = [[x.diff(rvar) for x in row] for row in cur]
            fact *= p
        at0 = [[x.subs({rvar: 0}) * Fraction(1, fact) for x in row] for row in cur]
        if not _is_zero_matrix(at0):
            coeffs[(p, 0)] = at0
    h = coeffs.get((0, 0), _zeros(n))
    return RadialJet(tuple(coords), h, coeffs, order, rvar)


# --- curvature of the compactified jet --------------------------------------------

@dataclass
class JetCurvature:
    R_irjr: list[list[LogSeries]]
    R_ij: list[list[LogSeries]]
    R_ir: list[LogSeries]
    R_rr: LogSeries
    S: LogSeries
    order: float


def curvature_of_jet(jet: RadialJet) -> JetCurvature:
    """Curvature of ``gbar = dr^2 + g_r`` as log-series (r is index 0)."""
    if jet.order < 4:
        raise JetOrderError("curvature of a jet needs order at least 4")
    g = jet.bulk_metric()
    n = jet.n
    ric = ricci(g)
    S = scalar_curvature(g)
    R_irjr = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            R_irjr[i][j] = R_irjr[j][i] = _riemann_component(g, i + 1, 0, j + 1, 0)
    R_ij = [[ric[i + 1, j + 1] for j in range(n)] for i in range(n)]
    R_ir = [ric[i + 1, 0] for i in range(n)]
    order = min([S.order, ric[0, 0].order] + [x.order for row in R_ij for x in row])
    return JetCurvature(R_irjr, R_ij, R_ir, ric[0, 0], S, order)


@dataclass
class LogCoefficients:
    n: int
    f: Matrix
    R_irjr: Matrix
    R_ij: Matrix
    R_rr: Rat
    S: Rat
    report: ResidualReport


def log_coefficients(jet: RadialJet, curvature: JetCurvature | None = None, seed: int = 0) -> LogCoefficients:
    """``r^(n-2) log r`` coefficients of the curvature and the four relations."""
    n = jet.n
    if n % 2:
        raise ValueError("log coefficients exist only for even boundary dimension")
    if jet.order <= n:
        raise JetOrderError(f"jet order must exceed n={n}")
    cur = curvature or curvature_of_jet(jet)
    k = n - 2
    f = jet.coefficient(n, 1)
    Hinv = mat_inverse(jet.h)
    trf = _trace_h(Hinv, f)
    c = Fraction(-n * (n - 1), 2)
    irjr = [[x.coeff(k, 1) for x in row] for row in cur.R_irjr]
    rij = [[x.coeff(k, 1) for x in row] for row in cur.R_ij]
    rrr = cur.R_rr.coeff(k, 1)
    s = cur.S.coeff(k, 1)
    children = [
        exact_zero_report("coeff-R_irjr", [irjr[i][j] - f[i][j] * c for i in range(n) for j in range(i, n)], seed=seed),
        exact_zero_report("coeff-R_ij", [rij[i][j] - f[i][j] * c for i in range(n) for j in range(i, n)], seed=seed),
        exact_zero_report("coeff-R_rr", [rrr - trf * c], seed=seed),
        exact_zero_report("coeff-S", [s - trf * (2 * c)], seed=seed),
        exact_zero_report("f-trace-free", [trf], seed=seed),
    ]
    if trf.is_zero():
        children[2].detail = "both sides vanish since f is trace-free"
        children[3].detail = "both sides vanish since f is trace-free"
    rep = ResidualReport("log-coefficients", all(ch.passed for ch in children), children=children)
    return LogCoefficients(n, f, irjr, rij, rrr, s, rep)


def weyl_irjr_series(jet: RadialJet, cur: JetCurvature | None = None) -> list[list[LogSeries]]:
    """``W_irjr = R_irjr - (R_ij + R_rr g_ij)/(n-1) + S g_ij/(n(n-1))`` with g_rr = 1."""
    cur = cur or curvature_of_jet(jet)
    n = jet.n
    gs = jet.series()
    a = Fraction(1, n - 1)
    b = Fraction(1, n * (n - 1))
    return [[cur.R_irjr[i][j] - (cur.R_ij[i][j] + cur.R_rr * gs[i][j]) * a + cur.S * gs[i][j] * b
             for j in range(n)] for i in range(n)]


def weyl_obstruction_equivalence(jet: RadialJet, cur: JetCurvature | None = None, seed: int = 0) -> ResidualReport:
    """coeff(W_irjr) = -(n(n-2)/2)(f - tr_h f h/n), then f trace-free gives
    coeff(W_irjr) = 0 exactly when f = 0."""
    n = jet.n
    if n % 2:
        raise ValueError("the Weyl/obstruction equivalence needs even n")
    cur = cur or curvature_of_jet(jet)
    W = weyl_irjr_series(jet, cur)
    k = n - 2
    cw = [[x.coeff(k, 1) for x in row] for row in W]
    f = jet.coefficient(n, 1)
    H = jet.h
    Hinv = mat_inverse(H)
    trf = _trace_h(Hinv, f)
    c = Fraction(n * (n - 2), 2)
    tf = [[f[i][j] - trf * H[i][j] * Fraction(1, n) for j in range(n)] for i in range(n)]
    formula = exact_zero_report(
        "coeff-W_irjr-formula", [cw[i][j] + tf[i][j] * c for i in range(n) for j in range(i, n)], seed=seed,
        detail="coeff(W_irjr) = -(n(n-2)/2)(f - tr f h/n)")
    trace_free = exact_zero_report("f-trace-free", [trf], seed=seed)
    w_zero = all(x.is_zero() for row in cw for x in row)
    f_zero = _is_zero_matrix(f)
    chain = ResidualReport("W-zero-iff-f-zero", w_zero == f_zero,
                           detail=f"coeffW_zero={w_zero} f_zero={f_zero}")
    kernel = ResidualReport("kernel-argument", trace_free.passed,
                            detail="f trace-free and f = tr f h/n force f = 0")
    children = [formula, trace_free, chain, kernel]
    rep = ResidualReport("weyl-obstruction-equivalence", all(ch.passed for ch in children), children=children)
    rep.components["coeff_W"] = cw
    return rep


def trace_free_kernel_check(n: int, samples: int = 20, seed: int = 0) -> ResidualReport:
    """For random rational SPD h: the map f -> f - (tr_h f/n) h on trace-free
    symmetric f has trivial kernel, checked by exact rank."""
    rng = random.Random(seed)
    ok = 0
    for _ in range(samples):
        while True:
            A = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
            h = [[sum(A[k][i] * A[k][j] for k in range(n)) + (1 if i == j else 0) for j in range(n)]
                 for i in range(n)]
            M = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in row] for row in h])
            if M.det() != 0:
                break
        hinv = M.inv()
        pairs = [(i, j) for i in range(n) for j in range(i, n)]

        def tr(f):
            return sum(Fraction(int(hinv[i, j].p), int(hinv[i, j].q)) * f[j][i] for i in range(n) for j in range(n))

        # basis of symmetric matrices, then trace-free projection; the image
        # of the trace-free subspace under the map must have full rank
        basis = []
        for (i, j) in pairs:
            e = [[Fraction(0)] * n for _ in range(n)]
            e[i][j] = e[j][i] = Fraction(1)
            t = tr(e) / n
            basis.append([[e[a][b] - t * h[a][b] for b in range(n)] for a in range(n)])
        images = []
        for f in basis:
            t = tr(f) / n
            images.append([f[a][b] - t * h[a][b] for (a, b) in pairs])
        mat = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in row] for row in images])
        if mat.rank() == len(pairs) - 1:
            ok += 1
    return ResidualReport("trace-free-kernel-linear-algebra", ok == samples,
                          detail=f"full-rank={ok}/{samples} n={n}")


def odd_case_trace_constraint(jet: RadialJet) -> Rat:
    """``h^{kl} d_r^n g_kl`` at r=0; zero for expansions with odd n."""
    n = jet.n
    if n % 2 == 0:
        raise ValueError("the trace constraint is the odd-n statement")
    if jet.order <= n:
        raise JetOrderError(f"jet order must exceed n={n}")
    Hinv = mat_inverse(jet.h)
    return _trace_h(Hinv, jet.taylor(n))


def jets_equal(a: RadialJet, b: RadialJet, upto: int) -> list[Rat]:
    """Differences of all coefficients below ``upto``."""
    out = []
    for p in range(upto):
        for l in (0, 1):
            ma, mb = a.coefficient(p, l), b.coefficient(p, l)
            out.extend(ma[i][j] - mb[i][j] for i in range(a.n) for j in range(i, a.n))
    return out


def random_trace_free(h: Matrix, seed: int = 0) -> Matrix:
    """A random constant symmetric matrix with its h-trace removed."""
    rng = random.Random(seed)
    n = len(h)
    m = [[Rat.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = Rat.const(Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
    return trace_free_part(h, mat_inverse(h), m)


def free_data_invariance(h: MetricField | Sequence[Sequence[ExprLike]], coords: Sequence[str] | None = None,
                         trials: int = 2, seed: int = 0) -> ResidualReport:
    """The log coefficient does not depend on the trace-free part of g^(n)."""
    if not isinstance(h, MetricField):
        h = MetricField(coords, h)
    n = h.dim
    if n % 2:
        raise ValueError("the log coefficient exists only for even n")
    base = fg_expand(h, order=n + 1).jet.log_coefficient()
    diffs = []
    for k in range(trials):
        fd = random_trace_free(h.g, seed + k)
        f = fg_expand(h, order=n + 1, free_data=fd).jet.log_coefficient()
        diffs.extend(f[i][j] - base[i][j] for i in range(n) for j in range(i, n))
    return exact_zero_report("f-free-data-invariance", diffs, seed=seed, detail=f"trials={trials}")
