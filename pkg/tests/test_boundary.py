from __future__ import annotations

from fractions import Fraction

from fglab import boundary as bnd, conformal as conf, fgx, geometry as geo
from fglab.cli.catalog import BALL_CHART, catalog
from fglab.cli.suites import _sphere_points
from fglab.expr import Rat, to_rat


def _cm(name):
    doc = catalog(name).document
    return conf.CompactifiedMetric(doc.compactified(), doc.rho_rat())


def test_ball_boundary_data():
    # oracle: the unit sphere in the flat ball, with rho = (1-|x|^2)/2, has A = -h, H = -3
    bd = bnd.boundary_data(_cm("hyperbolic-ball-4d"))
    assert bd.H == Rat.const(-3)
    assert all(bd.A[i][j] == -bd.h[i][j] for i in range(3) for j in range(3))
    assert bd.S_h == Rat.const(6)
    assert bd.check().passed


def test_ball_numeric_suite():
    cm = _cm("hyperbolic-ball-4d")
    pts = cm.probes(5, 0, boundary=True)
    assert bnd.sff_geodesic_factor_residual(cm, pts).passed
    assert bnd.sff_geodesic_factor_radial_check(cm, pts).passed
    assert bnd.boundary_ricci_residuals(cm, pts).passed
    assert bnd.mixed_ricci(cm, pts).passed


def test_tilted_model_uses_cross_terms():
    cm = _cm("tilted-half-space-4d")
    pts = cm.probes(5, 1, boundary=True)
    rep = bnd.mixed_ricci(cm, pts)
    assert rep.passed
    assert bnd.boundary_data(cm).H == to_rat("x1 + 3/5*x2^2")


def test_jet_relations():
    h = catalog("perturbed-flat-boundary-n4").document.boundary_metric()
    jet = fgx.fg_expand(h, order=6).jet
    assert bnd.geodesic_slice_relations(jet).passed
    assert bnd.gauss_series_residual(jet).passed


def test_dirichlet_composition_and_reduction():
    assert bnd.dirichlet_composition_check(3).passed
    assert bnd.dirichlet_composition_check(4).passed
    assert bnd.mixed_ricci_reduction().passed


def test_neumann_in_harmonic_ball_chart():
    flat = geo.MetricField.diagonal(["X1", "X2", "X3", "X4"], [1] * 4)
    cmap = bnd.ChartMap(flat, [to_rat(f) for f in BALL_CHART])
    assert geo.harmonicity_residual(BALL_CHART, flat).passed
    rep = bnd.neumann_residuals(cmap, _sphere_points(5, 0))
    assert rep.passed, rep.lines()


def test_bianchi_neumann_on_s2xh2():
    g = catalog("s2xh2").document.compactified()
    pts = [{"p": 0, "q": Fraction(1, 3), "u": Fraction(1, 5), "v": Fraction(1 + i, 2)} for i in range(3)]
    assert bnd.bianchi_neumann_residual(g, pts).passed
