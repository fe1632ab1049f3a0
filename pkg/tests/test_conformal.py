from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fglab import conformal as conf, geometry as geo
from fglab.cli.catalog import catalog
from fglab.expr import Rat

t, y1, y2, y3 = (Rat.var(v) for v in ("t", "y1", "y2", "y3"))


def _ball() -> conf.CompactifiedMetric:
    doc = catalog("hyperbolic-ball-4d").document
    return conf.CompactifiedMetric(doc.compactified(), doc.rho_rat())


def test_yamabe_round_sphere_factor():
    # oracle: u = 2/(1+|x|^2) is the stereographic factor, S = N(N-1) = 12
    a, b, c, d = (Rat.var(v) for v in "abcd")
    g = geo.MetricField.diagonal(["a", "b", "c", "d"], [1] * 4)
    u = 2 / (1 + a * a + b * b + c * c + d * d)
    assert conf.yamabe_residual(g, u, 12).passed
    assert not conf.yamabe_residual(g, u, 11).passed


a_ = st.fractions(min_value=Fraction(-1, 2), max_value=Fraction(1, 2), max_denominator=6)


@given(a_, a_)
def test_conformal_ricci_formula(p, q):
    a, b, c = (Rat.var(v) for v in "abc")
    gbar = geo.MetricField.diagonal(["a", "b", "c"], [1 + a * a * p, Rat.one(), 1 + b * q])
    u = 2 + a * q + b * b
    assert conf.conformal_ricci_relation_residual(gbar, u).passed


def test_geodesic_factor_closed_form_on_ball():
    cm = _ball()
    assert cm.check_defining().passed
    assert conf.geodesic_gauge_residual(cm, 4 / ((2 - t) * (2 - t))).passed
    sol = conf.solve_geodesic_factor_radial(cm, 0.5)
    assert sol.complete
    assert max(abs(sol.u - 4 / (2 - sol.t) ** 2)) < 1e-8
    assert abs(sol.u_t0 - 1.0) < 1e-8


def test_geodesic_factor_preconditions():
    cm = _ball()
    with pytest.raises(conf.PreconditionError):
        conf.geodesic_gauge_residual(cm, 2 + t)
    assert not conf.geodesic_gauge_residual(cm, 1 + t * t).passed


def test_half_space_is_already_geodesic():
    x = [Rat.var(f"x{i}") for i in range(4)]
    cm = conf.CompactifiedMetric(geo.MetricField.diagonal([f"x{i}" for i in range(4)], [1] * 4), x[0])
    assert conf.geodesic_gauge_residual(cm, Rat.one()).passed


def test_asymptotic_rates_on_perturbed_model():
    doc = catalog("ah-perturbed-5d").document
    cm = conf.CompactifiedMetric(doc.compactified(), doc.rho_rat())
    rates = conf.rates_of(conf.ah_curvature_asymptotics(cm))
    assert abs(rates["einstein-defect-g+"] - 3) < 0.1
    assert abs(rates["sectional-K+1"] - 3) < 0.1


def test_richardson_on_pure_power():
    rhos = [2.0 ** -k for k in range(3, 9)]
    tab = conf.richardson_rates(rhos, [r ** 2 * (1 + r) for r in rhos])
    assert abs(tab.rate - 2) < 1e-2
