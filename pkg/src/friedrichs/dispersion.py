"""Resolvent denominator on both Riemann sheets and its resonance roots.

For coupling weight phi and dimensionless detuning w = omega1/cutoff the
first-sheet function is

    eta_I(z) = w - z - g2 * int_0^inf phi(x)/(x - z) dx,   z off [0, inf),

with g2 the squared coupling.  Boundary values from below the cut are
eta_minus(y) = Re + i*pi*g2*phi(y); continued upward through the cut they
define the second sheet,

    eta_II(z) = eta_I(z) + 2*pi*i*g2*phi(z),

whose zeros in the first quadrant are the resonance poles that drive the
exponential decay era.  Conventions are anchored by two requirements:
the survival amplitude equals 1 at t = 0 and decays afterwards, which
puts the decaying poles in the upper half plane with time dependence
exp(i z s), s = cutoff * t.

Closed forms of the dispersion integral are used for the built-in
weights (rational up to a single log or sqrt); custom weights fall back
to principal-value quadrature on the real axis and do not support
continuation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import BoundStateError, ContinuationUnsupportedError, ConvergenceError
from .formfactors import (PHI1, PHI2, PHI3, Formfactor, ModelParams,
                          bound_state_margin, builtin)
from .quadrature import pv_dispersion


class Sheet(Enum):
    I = "I"
    II = "II"


class Side(Enum):
    PLUS = "plus"    # boundary value from above the cut
    MINUS = "minus"  # boundary value from below (the one continued upward)


class RootKind(Enum):
    RESONANCE = "resonance"  # near the real axis
    CUTOFF = "cutoff"        # near the cutoff scale, |z| ~ 1


@dataclass(frozen=True)
class SheetPoint:
    z: complex
    sheet: Sheet


@dataclass(frozen=True)
class ResonanceRoot:
    z: complex
    residue_weight: complex
    kind: RootKind
    contributing: bool


def _sqrt_upper(z: complex) -> complex:
    """Branch of sqrt(z) with nonnegative imaginary part (first sheet of
    the sqrt(z) plane; positive real axis maps to itself)."""
    w = cmath.sqrt(z)
    if w.imag < 0:
        w = -w
    return w


# ---------------------------------------------------------------------------
# closed-form dispersion integrals  F(z) = int phi(x)/(x-z) dx
# ---------------------------------------------------------------------------

def _disp_phi1(z: complex) -> complex:
    return math.pi / (1.0 - 1j * _sqrt_upper(z))


def _disp_phi2(z: complex) -> complex:
    zz = z * z
    L = cmath.log(-z)  # principal log, analytic off the cut [0, inf)
    return (-z * L / (1 + zz) ** 2
            - math.pi * (zz - 1) / (4 * (1 + zz) ** 2)
            - z / (2 * (1 + zz)))


def _disp_phi3(z: complex) -> complex:
    pi = math.pi
    L = cmath.log(-z)
    num = (-16 * z ** 7 - 3 * pi * z ** 6 - 72 * z ** 5 - 15 * pi * z ** 4
           - 144 * z ** 3 - 45 * pi * z ** 2 - 96 * z * L - 88 * z + 15 * pi)
    return num / (96 * (1 + z * z) ** 4)


_DISP_CLOSED = {PHI1: _disp_phi1, PHI2: _disp_phi2, PHI3: _disp_phi3}


def _phi_continued(ff: Formfactor, z: complex) -> complex:
    """phi continued off the positive axis (principal branches)."""
    if ff.id == PHI1:
        return cmath.sqrt(z) / (1 + z)
    if ff.id == PHI2:
        return z / (1 + z * z) ** 2
    if ff.id == PHI3:
        return z / (1 + z * z) ** 4
    raise ContinuationUnsupportedError(
        f"no analytic continuation for formfactor {ff.id!r}")


def eta_first_sheet(params: ModelParams, ff: Formfactor, z: complex) -> complex:
    """eta on the first sheet, z off the cut [0, inf)."""
    z = complex(z)
    if z.imag == 0.0 and z.real >= 0.0:
        raise ValueError("z lies on the continuum cut; use eta_boundary")
    w, g2 = params.omega_ratio, params.coupling_sq
    if g2 == 0.0:
        return w - z
    f = _DISP_CLOSED.get(ff.id)
    if f is not None:
        return w - z - g2 * f(z)
    # generic quadrature path; the contour never touches the cut
    from .quadrature import quad_complex_vec

    def g(u):
        x = u / (1.0 - u)
        return ff(x) / (x - z) / (1.0 - u) ** 2

    val, err = quad_complex_vec(g, 0.0, 1.0, epsabs=1e-12)
    if err > 1e-8:
        raise ConvergenceError("dispersion integral did not converge",
                               achieved=err)
    return w - z - g2 * val


def dispersion_real_part(params: ModelParams, ff: Formfactor, y) -> np.ndarray:
    """Re eta on the cut: omega_ratio - y - g2 * PV int phi/(x-y) dx.

    Vectorized over y; closed forms for built-ins, excision quadrature
    otherwise.
    """
    y = np.asarray(y, dtype=float)
    w, g2 = params.omega_ratio, params.coupling_sq
    if g2 == 0.0:
        return w - y
    if ff.id == PHI1:
        return w - y - math.pi * g2 / (1.0 + y)
    if ff.id == PHI2:
        yy = y * y
        return w - y + g2 * (y * np.log(y) / (1 + yy) ** 2
                             + math.pi * (yy - 1) / (4 * (1 + yy) ** 2)
                             + y / (2 * (1 + yy)))
    if ff.id == PHI3:
        pi = math.pi
        num = (-16 * y ** 7 - 3 * pi * y ** 6 - 72 * y ** 5 - 15 * pi * y ** 4
               - 144 * y ** 3 - 45 * pi * y ** 2 - 96 * y * np.log(y)
               - 88 * y + 15 * pi)
        return w - y - g2 * num / (96 * (1 + y * y) ** 4)
    scalar = np.isscalar(y) or y.ndim == 0
    ys = np.atleast_1d(y)
    out = np.array([w - yi - g2 * pv_dispersion(ff, yi) for yi in ys])
    return out[0] if scalar else out


def eta_boundary(params: ModelParams, ff: Formfactor, y: float,
                 side: Side = Side.MINUS) -> complex:
    """Boundary value of eta on the cut, from below (MINUS) or above."""
    if not y > 0:
        raise ValueError("boundary frequency must be positive")
    re = float(dispersion_real_part(params, ff, y))
    im = math.pi * params.coupling_sq * float(ff(y))
    return complex(re, im if side is Side.MINUS else -im)


def eta_second_sheet(params: ModelParams, ff: Formfactor, z: complex) -> complex:
    """eta continued through the cut: eta_I + 2*pi*i*g2*phi(z)."""
    z = complex(z)
    g2 = params.coupling_sq
    if g2 == 0.0:
        return params.omega_ratio - z
    if ff.id == PHI1:
        # equivalently: sqrt(z) taken on the lower half branch
        u = -_sqrt_upper(z)
        return params.omega_ratio - z - math.pi * g2 / (1.0 - 1j * u)
    return eta_first_sheet(params, ff, z) + 2j * math.pi * g2 * _phi_continued(ff, z)


def eta_on_sheet(params: ModelParams, ff: Formfactor, pt: SheetPoint) -> complex:
    if pt.sheet is Sheet.I:
        return eta_first_sheet(params, ff, pt.z)
    return eta_second_sheet(params, ff, pt.z)


def _eta_second_sheet_prime(params, ff, z, h=None):
    """d(eta_II)/dz via central differences (eta_II is holomorphic)."""
    z = complex(z)
    if h is None:
        h = 1e-7 * (1.0 + abs(z))
    f = lambda x: eta_second_sheet(params, ff, x)
    return (8 * (f(z + h) - f(z - h)) - (f(z + 2 * h) - f(z - 2 * h))) / (12 * h)


def _newton_polish(params, ff, seed, tol_step=1e-15, max_iter=100):
    z = complex(seed)
    for _ in range(max_iter):
        fz = eta_second_sheet(params, ff, z)
        dz = fz / _eta_second_sheet_prime(params, ff, z)
        z -= dz
        if abs(dz) < tol_step * (1.0 + abs(z)):
            return z
    resid = abs(eta_second_sheet(params, ff, z))
    if resid < 1e-12 * max(1.0, params.omega_ratio):
        return z
    raise ConvergenceError("root polishing did not converge",
                           last_iterate=z, residual=resid)


def _classify(z: complex) -> RootKind:
    if abs(z.imag) < 0.1 * (1.0 + abs(z.real)) and z.real > 0:
        return RootKind.RESONANCE
    return RootKind.CUTOFF


def _phi1_cubic_roots(params) -> np.ndarray:
    """Roots (in u = sqrt z on the second-sheet branch) of
    (w - u^2)(1 - iu) - pi*g2 = 0 via the companion matrix, then polished."""
    w, g2 = params.omega_ratio, params.coupling_sq
    coeffs = np.array([1.0, 1j, -w, -1j * (w - math.pi * g2)])
    roots = np.roots(coeffs)

    def C(u):
        return (w - u * u) * (1 - 1j * u) - math.pi * g2

    def dC(u):
        return -2 * u * (1 - 1j * u) - 1j * (w - u * u)

    for i, u in enumerate(roots):
        best, best_res = u, abs(C(u))
        for _ in range(100):
            du = C(u) / dC(u)
            u -= du
            res = abs(C(u))
            if res < best_res:
                best, best_res = u, res
            elif abs(du) < 1e-15 * (1.0 + abs(u)):
                break  # residual at its floating-point floor
        roots[i] = best
    return roots


@lru_cache(maxsize=64)
def _roots_cached(cutoff, omega1, coupling_sq, ff_id):
    params = ModelParams(cutoff, omega1, coupling_sq)
    ff = builtin(ff_id)
    margin = bound_state_margin(params, ff)
    if margin <= 0:
        raise BoundStateError(margin)
    w, g2 = params.omega_ratio, params.coupling_sq
    out = []
    if ff_id == PHI1:
        us = _phi1_cubic_roots(params)
        zs = us * us
        for k, u in enumerate(us):
            # coefficient of exp(izs) when this pole's Faddeeva term
            # crosses into its exponential regime
            prod = np.prod([zs[k] - zs[m] for m in range(3) if m != k])
            weight = -2j * math.pi * g2 * u / prod
            out.append(ResonanceRoot(complex(zs[k]), complex(weight),
                                     _classify(zs[k]), True))
        return tuple(out)

    lam = math.sqrt(g2)
    if ff_id == PHI2:
        seeds = [w * (1 + 1j * math.pi * g2),
                 math.sqrt(math.pi) / 2 * lam + 1j,
                 -math.sqrt(math.pi) / 2 * lam + 1j]
    elif ff_id == PHI3:
        c = math.sqrt(lam) * (math.pi / 8) ** 0.25
        seeds = [w * (1 + 1j * math.pi * g2),
                 1j * (1 - c * cmath.exp(1j * math.pi / 8)),
                 1j * (1 - c * cmath.exp(5j * math.pi / 8))]
    else:
        raise ContinuationUnsupportedError(
            f"resonance roots undefined for formfactor {ff_id!r}")
    for seed in seeds:
        z = _newton_polish(params, ff, seed)
        weight = -1.0 / _eta_second_sheet_prime(params, ff, z)
        # poles in the first quadrant are enclosed by the deformed contour
        out.append(ResonanceRoot(complex(z), complex(weight),
                                 _classify(z), z.real > 0))
    return tuple(out)


def resonance_roots(params: ModelParams, ff: Formfactor):
    """Second-sheet zeros of eta, polished to |eta_II| < 1e-12.

    For the sqrt-head weight these are the squares of the three cubic
    roots; for the rational weights, Newton iterates from analytic seeds.
    """
    if not ff.is_builtin:
        raise ContinuationUnsupportedError(
            "resonance roots require an analytically continuable formfactor")
    return list(_roots_cached(params.cutoff, params.omega1,
                              params.coupling_sq, ff.id))


def decaying_resonance(params: ModelParams, ff: Formfactor) -> ResonanceRoot:
    """The near-axis root with Im z > 0 (decaying pole in the exp(izs)
    convention); its real part is the shifted frequency."""
    cands = [r for r in resonance_roots(params, ff)
             if r.kind is RootKind.RESONANCE and r.z.imag > 0]
    if not cands:
        raise ConvergenceError("no decaying resonance root found")
    return max(cands, key=lambda r: r.z.real)


def spectral_density(params: ModelParams, ff: Formfactor, x) -> np.ndarray:
    """rho(x) = g2*phi / (Re_eta^2 + (pi*g2*phi)^2); integrates to 1 when
    no bound state is present."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("spectral density is defined for x > 0")
    g2 = params.coupling_sq
    ph = ff(x)
    re = dispersion_real_part(params, ff, x)
    return g2 * ph / (re * re + (math.pi * g2 * ph) ** 2)


def spectral_peak(params: ModelParams, ff: Formfactor):
    """Location and half-width of the resonance spike of the density:
    the zero of Re eta on the cut and pi*g2*phi there over |d Re eta/dx|."""
    from scipy import optimize

    w = params.omega_ratio
    g2 = params.coupling_sq
    if g2 == 0.0:
        return w, 0.0

    def R(x):
        return float(dispersion_real_part(params, ff, x))

    x_hi = w
    if R(x_hi) > 0:
        while R(x_hi) > 0:
            x_hi *= 2
            if x_hi > 1e12:
                raise ConvergenceError("no spectral peak below 1e12")
        x_lo = x_hi / 2
    else:
        x_lo = w
        while R(x_lo) <= 0:
            x_lo /= 2
            if x_lo < 1e-300:
                raise BoundStateError(bound_state_margin(params, ff))
        x_hi = 2 * x_lo
    x0 = optimize.brentq(R, x_lo, x_hi, rtol=1e-15)
    eps = x0 * 1e-6
    slope = (R(x0 + eps) - R(x0 - eps)) / (2 * eps)
    width = math.pi * g2 * float(ff(x0)) / abs(slope)
    return x0, width
