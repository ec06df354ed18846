import math

import mpmath
import numpy as np
import pytest

from friedrichs.quadrature import (byparts_segment, byparts_tail,
                                   euler_accelerate, geometric_ladder,
                                   oscillatory_finite, oscillatory_tail,
                                   panel_integrals, principal_value,
                                   pv_dispersion, quad_segments)


def test_principal_value_odd_symmetric_is_zero():
    # PV int_0^2 dx/(x-1) = 0
    assert principal_value(lambda x: 1.0, 1.0, 2.0) == pytest.approx(0.0, abs=1e-10)


def test_principal_value_polynomial():
    # PV int_0^2 x^2/(x-1) dx = int (x+1) dx = 4
    assert principal_value(lambda x: x * x, 1.0, 2.0) == pytest.approx(4.0, rel=1e-9)


def test_principal_value_exponential():
    # PV int_0^5 exp(-x)/(x-1) dx = e^-1 (Ei(-4) - Ei(1)), from the
    # antiderivative Ei(-u) of exp(-u)/u
    want = float(mpmath.e ** -1 * (mpmath.ei(-4) - mpmath.ei(1)))
    got = principal_value(lambda x: math.exp(-x), 1.0, 5.0)
    assert got == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("y", [0.3, 1.0, 2.5])
def test_pv_dispersion_vs_closed_form(y):
    # PV int sqrt(x)/((1+x)(x-y)) dx = pi/(1+y), read off the boundary
    # value of the closed-form first-sheet function
    phi1 = lambda x: np.sqrt(np.asarray(x, float)) / (1 + np.asarray(x, float))
    assert pv_dispersion(phi1, y) == pytest.approx(math.pi / (1 + y), rel=1e-8)


def test_euler_accelerate_log2():
    terms = np.array([(-1.0) ** j / (j + 1) for j in range(40)], dtype=complex)
    val, err = euler_accelerate(terms)
    assert abs(val - math.log(2)) < 1e-12
    assert err < 1e-10


def test_geometric_ladder_brackets_feature():
    pts = geometric_ladder(1.0, 1e-6, 0.0, 100.0)
    assert all(0.0 < p < 100.0 for p in pts)
    assert min(abs(p - 1.0) for p in pts) <= 1e-6 * 4.001
    assert pts == sorted(pts)


def _exp_osc_exact(rate, a, b, s):
    """int_a^b exp(rate*x) exp(isx) dx in closed form."""
    w = rate + 1j * s
    return (cmath_exp(w * b) - cmath_exp(w * a)) / w


def cmath_exp(z):
    import cmath
    return cmath.exp(z)


def _inv_square_tail_exact(X, s):
    """int_X^inf exp(isx)/x^2 dx = s * (exp(i a)/a + i E1(-i a)), a = sX."""
    mpmath.mp.dps = 40
    a = mpmath.mpf(s) * X
    val = mpmath.mpf(s) * (mpmath.exp(1j * a) / a + 1j * mpmath.e1(-1j * a))
    return complex(val)


def test_oscillatory_finite_panels_vs_mpmath():
    mpmath.mp.dps = 30
    f = lambda x: 1.0 / (1.0 + np.asarray(x, float) ** 2)
    s = 40.0
    want = complex(mpmath.quad(
        lambda x: mpmath.exp(1j * s * x) / (1 + x ** 2),
        mpmath.linspace(0, 12, 60)))
    got, err = oscillatory_finite(f, 0.0, 12.0, s, scale_a=1.0, scale_b=1.0)
    assert abs(got - want) < 1e-11


def test_oscillatory_finite_byparts_exact():
    f = lambda x: np.exp(-np.asarray(x, float) / 3.0)
    s = 5000.0
    want = _exp_osc_exact(-1.0 / 3.0, 1.0, 9.0, s)
    got, err = oscillatory_finite(f, 1.0, 9.0, s, scale_a=3.0, scale_b=3.0)
    assert abs(got - want) < 1e-12


def test_oscillatory_tail_exact():
    f = lambda x: np.asarray(x, float) ** -2
    s = 30.0
    want = _inv_square_tail_exact(2.0, s)
    got, err = oscillatory_tail(f, 2.0, s, scale_b=2.0)
    assert abs(got - want) < 1e-10


def test_byparts_tail_exact():
    f = lambda x: np.asarray(x, float) ** -2
    s = 200.0
    want = _inv_square_tail_exact(3.0, s)
    got, err = byparts_tail(f, 3.0, s, scale=3.0)
    assert abs(got - want) < 1e-11


def test_panel_integrals_sum_exact():
    f = lambda x: np.exp(-np.asarray(x, float))
    s = 17.0
    h = math.pi / s
    n = 40
    total = panel_integrals(f, 0.5, n, h, s).sum()
    want = _exp_osc_exact(-1.0, 0.5, 0.5 + n * h, s)
    assert abs(total - want) < 1e-13


def test_quad_segments_additivity():
    f = lambda x: np.asarray(x, float) ** 2 + 0j
    val, _ = quad_segments(f, [0.0, 0.5, 1.0, 2.0])
    assert val.real == pytest.approx(8.0 / 3.0, rel=1e-12)


def test_byparts_segment_exact():
    f = lambda x: np.asarray(x, float) ** -2
    s = 1e4
    got, est = byparts_segment(f, 2.0, 8.0, s, 2.0, 8.0)
    want = _inv_square_tail_exact(2.0, s) - _inv_square_tail_exact(8.0, s)
    assert abs(got - want) < max(3 * est, 1e-13)
