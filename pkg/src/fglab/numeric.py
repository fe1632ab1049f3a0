"""Finite-difference curvature at a point, as an independent oracle for the symbolic code.

Metric components are evaluated in mpmath (30 digits by default) and
differentiated with central differences of step ``1e-4``; the resulting
truncation error is ``O(step^2)``.
"""
from __future__ import annotations

from typing import Mapping

import mpmath

from .expr import Rat, evaluate_rat, to_rat
from .geometry import MetricField

STEP = mpmath.mpf("1e-4")


class FDCurvature:
    """Christoffel symbols, Riemann, Ricci, scalar and Weyl at one point."""

    def __init__(self, g: MetricField, point: Mapping[str, object], step=STEP, dps: int = 30):
        self.g = g
        self.names = g.coords
        self.N = g.dim
        self.dps = dps
        self.h = mpmath.mpf(step)
        with mpmath.workdps(dps):
            self.p = {k: mpmath.mpf(v) if not hasattr(v, "numerator") else mpmath.mpf(v.numerator) / v.denominator
                      for k, v in point.items()}
            self._compute()

    def _metric_at(self, shift: dict[int, int]):
        q = dict(self.p)
        for a, s in shift.items():
            q[self.names[a]] = q[self.names[a]] + s * self.h
        N = self.N
        return [[evaluate_rat(self.g.g[a][b], q, "mpmath") for b in range(N)] for a in range(N)]

    def _compute(self):
        N, h = self.N, self.h
        g0 = self._metric_at({})
        plus = [self._metric_at({a: 1}) for a in range(N)]
        minus = [self._metric_at({a: -1}) for a in range(N)]
        dg = [[[(plus[c][a][b] - minus[c][a][b]) / (2 * h) for c in range(N)] for b in range(N)] for a in range(N)]
        ddg = {}
        for c in range(N):
            for d in range(c, N):
                if c == d:
                    val = [[(plus[c][a][b] - 2 * g0[a][b] + minus[c][a][b]) / h ** 2 for b in range(N)] for a in range(N)]
                else:
                    pp, pm = self._metric_at({c: 1, d: 1}), self._metric_at({c: 1, d: -1})
                    mp, mm = self._metric_at({c: -1, d: 1}), self._metric_at({c: -1, d: -1})
                    val = [[(pp[a][b] - pm[a][b] - mp[a][b] + mm[a][b]) / (4 * h ** 2) for b in range(N)] for a in range(N)]
                ddg[c, d] = ddg[d, c] = val
        G = mpmath.matrix(g0)
        Gi = G ** -1
        self.gmat, self.ginv = g0, [[Gi[a, b] for b in range(N)] for a in range(N)]
        first = [[[(dg[s][b][c] + dg[s][c][b] - dg[b][c][s]) / 2 for c in range(N)] for b in range(N)] for s in range(N)]
        # first[s][b][c] = Gamma_{s b c} with d_b g_{s c} etc.
        self.gamma = [[[sum(self.ginv[t][s] * first[s][b][c] for s in range(N)) for c in range(N)] for b in range(N)]
                      for t in range(N)]
        R = {}
        for a in range(N):
            for b in range(N):
                for c in range(N):
                    for d in range(N):
                        lin = (ddg[b, c][a][d] + ddg[a, d][b][c] - ddg[a, c][b][d] - ddg[b, d][a][c]) / 2
                        quad = sum(g0[e][f] * (self.gamma[e][b][c] * self.gamma[f][a][d]
                                               - self.gamma[e][b][d] * self.gamma[f][a][c])
                                   for e in range(N) for f in range(N))
                        # sign chosen so that R_abab is the sectional curvature
                        R[a, b, c, d] = lin + quad
        self.riemann = R
        self.ricci = [[sum(self.ginv[a][c] * R[a, b, c, d] for a in range(N) for c in range(N)) for d in range(N)]
                      for b in range(N)]
        self.scalar = sum(self.ginv[b][d] * self.ricci[b][d] for b in range(N) for d in range(N))
        self.dg = dg
        self.ddg = ddg

    def weyl(self, a, b, c, d):
        N = self.N
        if N < 3:
            raise ValueError("Weyl tensor needs dimension at least 3")
        n = N - 1
        g, Ric, S = self.gmat, self.ricci, self.scalar
        return (self.riemann[a, b, c, d]
                - (Ric[a][c] * g[b][d] + Ric[b][d] * g[a][c] - Ric[b][c] * g[a][d] - Ric[a][d] * g[b][c]) / (n - 1)
                + S * (g[a][c] * g[b][d] - g[a][d] * g[b][c]) / (n * (n - 1)))


def fd_scalar_derivatives(f, names, point, step=STEP, dps: int = 30):
    """Gradient and Hessian of a scalar ``Rat`` by central differences."""
    f = to_rat(f)
    with mpmath.workdps(dps):
        p = {k: mpmath.mpf(v) if not hasattr(v, "numerator") else mpmath.mpf(v.numerator) / v.denominator
             for k, v in point.items()}
        h = mpmath.mpf(step)

        def ev(shift):
            q = dict(p)
            for a, s in shift.items():
                q[names[a]] = q[names[a]] + s * h
            return evaluate_rat(f, q, "mpmath")

        N = len(names)
        f0 = ev({})
        grad = [(ev({a: 1}) - ev({a: -1})) / (2 * h) for a in range(N)]
        hess = [[None] * N for _ in range(N)]
        for a in range(N):
            for b in range(a, N):
                if a == b:
                    v = (ev({a: 1}) - 2 * f0 + ev({a: -1})) / h ** 2
                else:
                    v = (ev({a: 1, b: 1}) - ev({a: 1, b: -1}) - ev({a: -1, b: 1}) + ev({a: -1, b: -1})) / (4 * h ** 2)
                hess[a][b] = hess[b][a] = v
        return grad, hess


def fd_laplacian(f, g: MetricField, point) -> mpmath.mpf:
    fd = FDCurvature(g, point)
    grad, hess = fd_scalar_derivatives(f, g.coords, point)
    N = g.dim
    return sum(fd.ginv[a][b] * (hess[a][b] - sum(fd.gamma[t][a][b] * grad[t] for t in range(N)))
               for a in range(N) for b in range(N))


def relative_error(a, b, floor: float = 1e-12) -> float:
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    return float(abs(a - b) / max(abs(a), abs(b), mpmath.mpf(floor)))
