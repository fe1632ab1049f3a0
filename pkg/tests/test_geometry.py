from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fglab import geometry as geo
from fglab.cli.suites import fd_cross_check
from fglab.expr import Rat, normalize, to_rat

x, y, z = (Rat.var(v) for v in "xyz")


def test_round_sphere_sectional_and_scalar():
    # oracle: unit S^2 has K = 1, S = 2
    g = geo.MetricField(["th", "ph"], [["1", "0"], ["0", "sin(th)^2"]])
    R = geo.riemann(g)
    assert normalize(R[0, 1, 0, 1]) == normalize("sin(th)^2")
    assert geo.scalar_curvature(g) == Rat.const(2)


def test_hyperbolic_half_plane():
    # oracle: y^-2 (dx^2 + dy^2) has K = -1, Ric = -g
    g = geo.MetricField.diagonal(["x", "y"], [1 / (y * y), 1 / (y * y)])
    R = geo.riemann(g)
    assert R[0, 1, 0, 1] == -1 / (y * y * y * y)
    assert geo.ricci(g)[0, 0] == -1 / (y * y)
    assert geo.scalar_curvature(g) == Rat.const(-2)


def test_riemann_symmetries_under_index_swaps():
    g = geo.MetricField.diagonal(["x", "y", "z"], [1 + x * x, 1 + y * z, Rat.const(2) + x])
    R = geo.riemann(g)
    for a, b, c, d in [(0, 1, 0, 2), (1, 2, 0, 2), (0, 1, 1, 2)]:
        assert R[a, b, c, d] == -R[b, a, c, d] == -R[a, b, d, c] == R[c, d, a, b]


def test_christoffel_flat_polar():
    r = Rat.var("r")
    g = geo.MetricField.diagonal(["r", "t"], [Rat.one(), r * r])
    G = geo.christoffel(g)
    assert G[0, 1, 1] == -r and G[1, 0, 1] == 1 / r
    assert geo.scalar_curvature(g).is_zero()


def test_conformally_flat_weyl_vanishes():
    s = 1 + x * x + y * y + z * z + Rat.var("w") ** 2
    g = geo.MetricField.diagonal(["x", "y", "z", "w"], [4 / (s * s)] * 4)
    W = geo.weyl(g)
    assert all(W[k].is_zero() for k in W.data)
    assert geo.scalar_curvature(g) == Rat.const(12)


def test_singular_metric_rejected():
    g = geo.MetricField(["x", "y"], [[x, x], [x, x]])
    with pytest.raises(geo.SingularMetricError):
        geo.christoffel(g)


def test_asymmetric_metric_rejected():
    with pytest.raises(ValueError):
        geo.MetricField(["x", "y"], [[1, x], [y, 1]])


def test_laplacian_flat_and_hessian():
    g = geo.MetricField.diagonal(["x", "y"], [1, 1])
    assert geo.laplace_beltrami("x^3*y", g) == to_rat("6*x*y")
    H = geo.hessian("x^2*y", g)
    assert H[0, 1] == to_rat("2*x")


coeff = st.fractions(min_value=Fraction(-1, 2), max_value=Fraction(1, 2), max_denominator=8)


@given(coeff, coeff, coeff)
def test_identities_on_random_metrics(a, b, c):
    g = geo.MetricField.diagonal(["x", "y", "z"], [1 + x * a + y * y * b, 1 + z * c * x, 2 + y * b])
    assert geo.riemann_symmetry_residuals(g).all_passed()
    bianchi = geo.contracted_bianchi_residual(g)
    assert bianchi.passed and bianchi.children[0].passed
    assert geo.weyl_trace_residual(g).all_passed()


@given(coeff, coeff)
def test_fd_cross_check_random(a, b):
    g = geo.MetricField.diagonal(["x", "y", "z"], [1 + x * a * y, 1 + z * b, 1 + x * y * Fraction(1, 3)])
    rep = fd_cross_check("random", g, probes=1)
    assert rep.all_passed(), rep.lines()
