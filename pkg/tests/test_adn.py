from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from fglab import adn
from fglab.adn import QI, SymbolPolynomial

fr = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def _ident(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


@given(fr, fr, fr, fr)
def test_gaussian_rationals_form_a_field(a, b, c, d):
    x, y = QI(a, b), QI(c, d)
    assert x * y == y * x
    assert (x + y) - y == x
    if y != QI(0, 0):
        assert (x / y) * y == x


def test_polynomial_from_roots():
    p = adn.poly_from_roots([QI(0, 1), QI(0, -1)])
    assert p == SymbolPolynomial([1, 0, 1])


def test_gauge_system_principal_determinant():
    # oracle: det = (g00 z^2 + |xi|^2)^(n+1)
    spec = adn.build_gauge_system(3, 4, _ident(3), [1, 0, 0])
    assert adn.principal_determinant(spec) == SymbolPolynomial([1, 0, 4]) ** 4
    assert adn.adjugate_identity_residual(spec.L)
    rr = adn.proper_ellipticity_check(spec)
    assert rr.ok and rr.upper == [QI(0, Fraction(1, 2))] * 4


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 3), st.integers(1, 3), st.integers(0, 3))
def test_complementing_fails_only_at_unit_g00(p, q, k, n, j):
    g00 = Fraction(p, q) ** 2
    xi = [Fraction(k)] + [Fraction(0)] * (n - 1)
    if n > 1 and j:
        xi[-1] = Fraction(j, 2)
    res = adn.complementing_check(adn.build_gauge_system(n, g00, _ident(n), xi))
    assert res.roundtrip_ok
    # exact arithmetic needs |xi|^2 / g00 to be a rational square
    xi2 = sum(x * x for x in xi)
    assert res.exact == (adn._rational_sqrt(xi2 / g00) is not None)
    assert res.passed == (g00 != 1)
    if not res.passed:
        assert res.kernel is not None


def test_unit_g00_kernel_vector():
    res = adn.complementing_check(adn.build_gauge_system(2, 1, _ident(2), [1, 0]))
    assert not res.passed
    assert list(res.kernel) == [QI(0, Fraction(1, 2)), QI(1), QI(0)]


def test_float_mode_agrees():
    a = adn.complementing_check(adn.build_gauge_system(3, 2.0, [[1, 0, 0], [0, 2, 0], [0, 0, 1]], [1.0, 1.0, 0.0]))
    assert a.passed and not a.exact


def test_laplacian_cases():
    assert adn.complementing_check(adn.scalar_laplacian([1], [1])).passed
    tang = adn.complementing_check(adn.scalar_laplacian([0, 1], [0]))
    assert not tang.passed and tang.kernel is not None


def test_not_properly_elliptic_detected():
    w = adn.EllipticSystemSpec([[SymbolPolynomial([-1, 0, 1])]], [[SymbolPolynomial([1])]])
    assert not adn.proper_ellipticity_check(w).ok


def test_bad_g00_rejected():
    with pytest.raises(ValueError):
        adn.build_gauge_system(2, -1, _ident(2), [1, 0])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_float_grid_scan(n):
    for g00 in (0.5, 2.0, 3.0, 4.0):
        for xi2 in (1.0, 2.0, 5.0):
            xi = [xi2 ** 0.5] + [0.0] * (n - 1)
            res = adn.complementing_check(adn.build_gauge_system(n, g00, _ident(n), xi))
            assert res.passed and res.roundtrip_ok, (n, g00, xi2)


@given(st.integers(1, 5), st.sampled_from([Fraction(1), Fraction(4), Fraction(9, 4)]))
def test_verdict_invariant_under_xi_scaling(s, g00):
    base = adn.complementing_check(adn.build_gauge_system(2, g00, _ident(2), [1, 0]))
    scaled = adn.complementing_check(adn.build_gauge_system(2, g00, _ident(2), [s, 0]))
    assert base.passed == scaled.passed
