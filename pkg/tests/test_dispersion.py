import cmath
import math

import numpy as np
import pytest

from friedrichs import (Formfactor, ModelParams, RootKind, Side, builtin,
                        decaying_resonance, eta_boundary, eta_first_sheet,
                        eta_second_sheet, resonance_roots, spectral_density,
                        spectral_peak)
from friedrichs.dispersion import _newton_polish
from friedrichs.errors import ContinuationUnsupportedError
from friedrichs.presets import preset

GRID = [-1.0 + 0j, -0.3 + 0.7j, 0.5 + 0.5j, 2.0 - 3.0j, 1e-4 + 1e-4j,
        0.2 - 0.9j, -5.0 + 0.01j]


def _custom_clone(name):
    """Same weight through the generic quadrature path."""
    ref = builtin(name)
    return Formfactor.from_callable(ref.evaluator, ref.tail_exponent,
                                    ref.head_exponent, verify=False)


@pytest.mark.parametrize("name", ["phi1", "phi2", "phi3"])
def test_closed_form_eta_vs_quadrature(name):
    params = ModelParams(1e10, 2e4, 3.18e-7)
    ff = builtin(name)
    clone = _custom_clone(name)
    for z in GRID:
        a = eta_first_sheet(params, ff, z)
        b = eta_first_sheet(params, clone, z)
        assert abs(a - b) < 1e-10


def test_eta_zero_coupling():
    params = ModelParams(1e10, 2e4, 0.0)
    for z in GRID:
        assert eta_first_sheet(params, builtin("phi2"), z) == \
            pytest.approx(params.omega_ratio - z, abs=1e-15)
        assert eta_second_sheet(params, builtin("phi2"), z) == \
            pytest.approx(params.omega_ratio - z, abs=1e-15)


def test_phi1_eta_at_minus_one():
    params, ff = preset("photodetachment")
    # sqrt(-1) = i on the first sheet: 1/(1 - i*i) = 1/2
    want = params.omega_ratio + 1.0 - math.pi * params.coupling_sq / 2.0
    assert eta_first_sheet(params, ff, -1.0 + 0j) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("name", ["phi1", "phi2", "phi3"])
def test_schwarz_reflection(name):
    params = ModelParams(1e10, 2e4, 3.18e-7)
    ff = builtin(name)
    for z in GRID:
        a = eta_first_sheet(params, ff, z)
        b = eta_first_sheet(params, ff, z.conjugate())
        assert abs(b - a.conjugate()) < 1e-12 * (1 + abs(a))


def test_eta_on_cut_rejected():
    params, ff = preset("quantum-dot")
    with pytest.raises(ValueError):
        eta_first_sheet(params, ff, 0.5 + 0j)


@pytest.mark.parametrize("name", ["phi1", "phi2", "phi3"])
def test_boundary_values(name):
    params = ModelParams(1e10, 2e4, 3.18e-7)
    ff = builtin(name)
    g2 = params.coupling_sq
    for y in (0.02, 0.7, 3.0):
        minus = eta_boundary(params, ff, y, Side.MINUS)
        plus = eta_boundary(params, ff, y, Side.PLUS)
        assert plus == pytest.approx(minus.conjugate(), rel=1e-14)
        assert minus.imag == pytest.approx(math.pi * g2 * float(ff(y)), rel=1e-12)
        # cut discontinuity
        assert (plus - minus) == pytest.approx(-2j * math.pi * g2 * float(ff(y)),
                                               rel=1e-12)


def test_boundary_is_limit_from_below():
    params, ff = preset("quantum-dot")
    y = params.omega_ratio
    target = eta_boundary(params, ff, y, Side.MINUS)
    # Richardson extrapolation of eta(y - i*eps) as eps -> 0
    e1 = eta_first_sheet(params, ff, y - 1e-6j)
    e2 = eta_first_sheet(params, ff, y - 5e-7j)
    extrap = 2 * e2 - e1
    assert abs(extrap - target) < 1e-10


def test_second_sheet_jump_is_continued_weight():
    params, ff = preset("quantum-dot")
    g2 = params.coupling_sq
    for z in (0.3 + 0.2j, 1.5 + 0.5j, 0.1 + 0.9j):
        jump = eta_second_sheet(params, ff, z) - eta_first_sheet(params, ff, z)
        want = 2j * math.pi * g2 * z / (1 + z * z) ** 2
        assert abs(jump - want) < 1e-14


def test_phi1_cut_discontinuity_between_sheets():
    # on the cut, eta_II equals the boundary value from below continued up:
    # crossing difference is 2*pi*i*g2*sqrt(y)/(1+y)
    params, ff = preset("photodetachment")
    g2 = params.coupling_sq
    for y in (0.04, 0.5, 2.0):
        up = eta_first_sheet(params, ff, y + 1e-14j)
        down = eta_second_sheet(params, ff, y + 1e-14j)
        want = 2j * math.pi * g2 * math.sqrt(y) / (1 + y)
        assert abs((down - up) - want) < 1e-10


def test_custom_has_no_continuation():
    params = ModelParams(1e10, 2e4, 3.18e-7)
    with pytest.raises(ContinuationUnsupportedError):
        eta_second_sheet(params, _custom_clone("phi2"), 0.5 + 0.5j)
    with pytest.raises(ContinuationUnsupportedError):
        resonance_roots(params, _custom_clone("phi2"))


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def test_phi2_roots_near_analytic_seeds():
    params, ff = preset("quantum-dot")
    roots = resonance_roots(params, ff)
    assert len(roots) == 3
    w, g2 = params.omega_ratio, params.coupling_sq
    lam = params.coupling
    seed1 = w * (1 + 1j * math.pi * g2)
    seed2 = math.sqrt(math.pi) / 2 * lam + 1j
    z1 = min(roots, key=lambda r: abs(r.z - seed1)).z
    z2 = min(roots, key=lambda r: abs(r.z - seed2)).z
    assert abs(z1 - seed1) < 0.1 * abs(seed1)
    assert abs(z2 - (1.68e-3 + 1j)) < 0.1 * abs(1.68e-3 + 1j)


def test_phi2_root_residuals_and_flags():
    params, ff = preset("quantum-dot")
    roots = resonance_roots(params, ff)
    for r in roots:
        assert abs(eta_second_sheet(params, ff, r.z)) < 1e-12
    contributing = [r for r in roots if r.contributing]
    assert len(contributing) == 2
    skipped = [r for r in roots if not r.contributing][0]
    assert skipped.z.real < 0  # second-quadrant twin never enclosed


def test_phi3_roots_from_seeds():
    params, ff = preset("hydrogen")
    roots = resonance_roots(params, ff)
    assert len(roots) == 3
    for r in roots:
        assert abs(eta_second_sheet(params, ff, r.z)) < 1e-12
    res = decaying_resonance(params, ff)
    assert res.z.real == pytest.approx(params.omega_ratio, rel=1e-2)
    assert res.z.imag == pytest.approx(
        math.pi * params.coupling_sq * params.omega_ratio, rel=1e-2)


def test_phi1_cubic_vieta():
    params, ff = preset("photodetachment")
    roots = resonance_roots(params, ff)
    us = []
    for r in roots:
        u = cmath.sqrt(r.z)
        if u.imag > 0:
            u = -u
        us.append(u)
    w, g2 = params.omega_ratio, params.coupling_sq
    # u^3 + i u^2 - w u - i(w - pi g2) has coefficient identities
    s1 = sum(us)
    s2 = us[0] * us[1] + us[0] * us[2] + us[1] * us[2]
    s3 = us[0] * us[1] * us[2]
    assert abs(s1 - (-1j)) < 1e-10
    assert abs(s2 - (-w)) < 1e-10
    assert abs(s3 - 1j * (w - math.pi * g2)) < 1e-10
    for r in roots:
        if r.kind is RootKind.RESONANCE:
            assert abs(eta_second_sheet(params, ff, r.z)) < 1e-12
        else:
            # near z = -1 the evaluation itself cancels at the 1e-6 level,
            # so the achievable residual is bounded by conditioning
            assert abs(eta_second_sheet(params, ff, r.z)) < 1e-10


def test_phi1_resonance_matches_table_shift():
    params, ff = preset("photodetachment")
    res = decaying_resonance(params, ff)
    # the shifted frequency is about half the bare one at these parameters
    assert res.z.real * params.cutoff == pytest.approx(1.0e4, rel=2e-2)
    assert res.z.imag > 0


def test_root_stability_under_seed_perturbation():
    params, ff = preset("quantum-dot")
    ref = sorted(resonance_roots(params, ff), key=lambda r: r.z.real)
    for shift in (0.9, 1.1):
        for r in ref:
            z = _newton_polish(params, ff, r.z * shift)
            match = min(abs(z - q.z) for q in ref)
            assert match < 1e-10 * (1 + abs(z))


def test_no_first_sheet_zeros():
    params, ff = preset("quantum-dot")
    rng = np.random.default_rng(7)
    pts = rng.uniform(-10, 10, size=(200, 2))
    for re, im in pts:
        if abs(im) < 1e-3:
            continue
        val = eta_first_sheet(params, ff, complex(re, im))
        assert abs(val) > 1e-8
        assert np.isfinite(1.0 / abs(val))


# ---------------------------------------------------------------------------
# spectral density
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["photodetachment", "quantum-dot", "hydrogen"])
def test_spectral_density_nonnegative_and_peaked(name):
    params, ff = preset(name)
    x0, width = spectral_peak(params, ff)
    res = decaying_resonance(params, ff)
    assert abs(x0 - res.z.real) < 5 * width + 1e-12
    xs = np.geomspace(x0 * 1e-2, x0 * 1e2, 301)
    rho = spectral_density(params, ff, xs)
    assert np.all(rho >= 0)
    assert rho.max() == pytest.approx(
        float(spectral_density(params, ff, x0)), rel=1e-3)


def test_spectral_density_rejects_nonpositive():
    params, ff = preset("quantum-dot")
    with pytest.raises(ValueError):
        spectral_density(params, ff, 0.0)


@pytest.mark.parametrize("g2", [1e-6, 1e-8])
def test_small_coupling_mass_concentrates(g2):
    params = ModelParams(1.0, 1e-2, g2)
    ff = builtin("phi2")
    x0, _ = spectral_peak(params, ff)
    half = 10 * math.pi * g2 * float(ff(params.omega_ratio))
    from scipy.integrate import quad
    mass, _ = quad(lambda x: float(spectral_density(params, ff, x)),
                   x0 - half, x0 + half, points=[x0], limit=200)
    assert mass > 0.9
