from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fglab import fgx, geometry as geo
from fglab.expr import Rat

X = [Rat.var(f"x{i + 1}") for i in range(4)]


def _h(n, entries):
    return geo.MetricField.diagonal([f"x{i + 1}" for i in range(n)], entries)


@pytest.mark.parametrize("n", [3, 4])
def test_flat_boundary_gives_product_metric(n):
    ex = fgx.fg_expand(_h(n, [1] * n), order=n + 3)
    for (p, l), m in ex.jet.coeffs.items():
        if p > 0 or l:
            assert all(x.is_zero() for row in m for x in row)
    assert fgx.einstein_series_residual(ex.jet).all_passed()


def test_second_order_term_is_minus_schouten():
    # oracle: g^(2) = -P with P = (Ric - S h/(2(n-1)))/(n-2)
    n = 4
    h = _h(n, [1 + X[1] * X[1], Rat.one(), 1 + X[0] * X[2] * Fraction(1, 3), Rat.one()])
    jet = fgx.fg_expand(h, order=3).jet
    Ric, S = geo.ricci(h), geo.scalar_curvature(h)
    for i in range(n):
        for j in range(n):
            P = (Ric[i, j] - S * h[i, j] * Fraction(1, 2 * (n - 1))) * Fraction(1, n - 2)
            assert jet.coefficient(2)[i][j] == -P


def test_round_sphere_closed_form_n3():
    s = 1 + X[0] * X[0] + X[1] * X[1] + X[2] * X[2]
    hs = 4 / (s * s)
    jet = fgx.fg_expand(_h(3, [hs] * 3), order=7).jet
    # (1 - r^2/4)^2 = 1 - r^2/2 + r^4/16
    assert jet.coefficient(2)[0][0] == -hs / 2
    assert jet.coefficient(4)[1][1] == hs / 16
    assert jet.coefficient(6)[2][2].is_zero()


def test_odd_n_trace_constraint_vanishes():
    jet = fgx.fg_expand(_h(3, [1 + X[1] * X[1], Rat.one(), Rat.one()]), order=4).jet
    assert fgx.odd_case_trace_constraint(jet).is_zero()
    assert jet.log_coefficient() is None


def test_even_n_log_term_trace_free_and_nonzero():
    h = _h(4, [1 + X[1] * X[1], 1, 1, 1])
    jet = fgx.fg_expand(h, order=5).jet
    f = jet.log_coefficient()
    assert any(not x.is_zero() for row in f for x in row)
    assert fgx.log_coefficients(jet).report.all_passed()
    assert fgx.free_data_invariance(h, trials=1).passed


def test_conformally_flat_boundary_has_no_log_term():
    s = 1 + sum(x * x for x in X)
    jet = fgx.fg_expand(_h(4, [4 / (s * s)] * 4), order=5).jet
    assert all(x.is_zero() for row in jet.log_coefficient() for x in row)


def test_jet_order_error():
    jet = fgx.fg_expand(_h(3, [1] * 3), order=3).jet
    with pytest.raises(fgx.JetOrderError):
        jet.coefficient(5)


def test_trace_free_kernel_linear_algebra():
    assert fgx.trace_free_kernel_check(4, samples=5).passed


sym_entry = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@given(st.lists(sym_entry, min_size=6, max_size=6))
def test_trace_free_part_has_zero_trace(vals):
    h = [[Rat.const(2), Rat.const(1), Rat.zero()], [Rat.const(1), Rat.const(3), Rat.zero()],
         [Rat.zero(), Rat.zero(), Rat.one()]]
    m = [[Rat.zero()] * 3 for _ in range(3)]
    it = iter(vals)
    for i in range(3):
        for j in range(i, 3):
            m[i][j] = m[j][i] = Rat.const(next(it))
    hinv = geo.mat_inverse(h)
    tf = fgx.trace_free_part(h, hinv, m)
    assert fgx._trace_h(hinv, tf).is_zero()
