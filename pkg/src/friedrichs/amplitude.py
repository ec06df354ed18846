"""Survival amplitude and probability via independently validated engines.

All engines share one convention, fixed by two anchors: A(0) = 1 and
p(t) = |A(t)|^2 decays through the exponential era.  In dimensionless
time s = cutoff * t the engines are:

QUADRATURE    A(s) = int_0^inf rho(x) exp(isx) dx over the spectral
              density.  Works for every formfactor and is the reference
              the closed-form engines are tested against.

PHI1_EXACT    For the sqrt-head weight the density is rational in
              u = sqrt(x), and the transform reduces to three Faddeeva
              functions, one per second-sheet root:

                  A(s) = (1/2) sum_k W_k wofz(exp(3i pi/4) u_k sqrt(s)),

              with W_k the stored residue weights and u_k the cubic
              roots.  wofz is the scaled complementary error function,
              so no intermediate overflows for any s.

PHI2_POLES    Two contour poles plus a background integral along the
              positive imaginary axis, written in a form that is stable
              near x = 1 where the raw factors almost cancel.

ASYMPTOTIC_LONG  Exponential + power tail + oscillatory cross term,
              evaluated as |pole + tail|^2 with exact root-based
              coefficients.

SERIES_SHORT  The short-time expansion evaluated literally.

Small deficits 1 - p are computed by a dedicated cancellation-free path
that integrates rho(x) (1 - exp(is(x - x0))) against the spike center
x0, exact for p because a global phase cannot change |A|.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import wofz

from .errors import ConvergenceError, EngineMismatchError, ExpansionUnavailableError
from .formfactors import (DIVERGENT, PHI1, PHI2, Formfactor, ModelParams,
                          moment, squared_norm)
from .dispersion import (decaying_resonance, resonance_roots,
                         spectral_density, spectral_peak)
from . import quadrature as quadlib


class Engine(Enum):
    AUTO = "auto"
    QUADRATURE = "quadrature"
    PHI1_EXACT = "phi1-exact"
    PHI2_POLES = "phi2-poles"
    ASYMPTOTIC_LONG = "asymptotic-long"
    SERIES_SHORT = "series-short"


def resolve_engine(ff: Formfactor, engine: Engine = Engine.AUTO) -> Engine:
    if engine is Engine.AUTO:
        if ff.id == PHI1:
            return Engine.PHI1_EXACT
        if ff.id == PHI2:
            return Engine.PHI2_POLES
        return Engine.QUADRATURE
    if engine is Engine.PHI1_EXACT and ff.id != PHI1:
        raise EngineMismatchError("phi1-exact engine requires the phi1 formfactor")
    if engine is Engine.PHI2_POLES and ff.id != PHI2:
        raise EngineMismatchError("phi2-poles engine requires the phi2 formfactor")
    return engine


# ---------------------------------------------------------------------------
# quadrature engine
# ---------------------------------------------------------------------------

_SPIKE_HALFWIDTHS = 80.0   # spike window extent in units of the half width
_X_FAR = 60.0              # beyond this every built-in density is tiny


def _amp_quadrature(params: ModelParams, ff: Formfactor, s: float,
                    tol: float = 1e-10):
    """A(s) with an error estimate; dimensionless time s >= 0."""
    w_ratio, g2 = params.omega_ratio, params.coupling_sq
    if g2 == 0.0:
        return cmath.exp(1j * w_ratio * s), 0.0

    rho = lambda x: spectral_density(params, ff, x)
    x0, width = spectral_peak(params, ff)

    if s == 0.0:
        X1 = x0 + 1e7 * width
        segs = sorted(set([0.0, x0, X1] + quadlib.geometric_ladder(x0, width, 0.0, X1)))
        v, e = quadlib.quad_segments(lambda x: rho(x) + 0j, segs, epsabs=tol / 8)
        vt, et = quadlib.quad_complex_vec(
            lambda u: rho(X1 + u / (1 - u)) / (1 - u) ** 2 + 0j, 0.0, 1.0,
            epsabs=tol / 8)
        return v + vt, e + et

    D = max(_SPIKE_HALFWIDTHS * width, 40.0 * math.pi / s)
    a, b = max(x0 - D, 0.0), x0 + D
    sw = s * width
    err = 0.0

    # spike window
    if sw < 25.0:
        segs = sorted(set([a, x0, b] + quadlib.geometric_ladder(x0, width, a, b)))
        v_spike, e = quadlib.quad_segments(
            lambda x: rho(x) * np.exp(1j * s * x), segs, epsabs=tol / 16, limit=900)
    else:
        ncap, h = 24, math.pi / s
        cap_a = quadlib.panel_integrals(rho, a, ncap, h, s).sum()
        cap_b = quadlib.panel_integrals(rho, b - ncap * h, ncap, h, s).sum()
        v_spike, e = quadlib.byparts_segment(rho, a + ncap * h, b - ncap * h,
                                             s, width, width)
        v_spike += cap_a + cap_b
    err += e

    # left of the window
    if a > 0.0:
        v_left, e = quadlib.oscillatory_finite(rho, 0.0, a, s,
                                               scale_a=None, scale_b=D,
                                               epsabs=tol / 8)
        err += e
    else:
        v_left = 0j

    # right tail
    if s * (_X_FAR - b) <= 24.0:
        X1 = max(_X_FAR, 2 * b)
        segs = [b] + quadlib.geometric_ladder(x0, width, b, X1) + [X1]
        v_tail, e1 = quadlib.quad_segments(
            lambda x: rho(x) * np.exp(1j * s * x), segs, epsabs=tol / 8)
        vt, e2 = quadlib.quad_complex_vec(
            lambda u: rho(X1 + u / (1 - u)) * np.exp(1j * s * (X1 + u / (1 - u)))
            / (1 - u) ** 2, 0.0, 1.0, epsabs=tol / 8)
        v_tail += vt
        err += e1 + e2
    else:
        v_tail, e = quadlib.oscillatory_tail(rho, b, s, scale_b=D)
        err += e

    return v_left + v_spike + v_tail, err


def survival_amplitude_quadrature(params: ModelParams, ff: Formfactor,
                                  t: float, with_error: bool = False):
    """Spectral-density Fourier engine; raises ConvergenceError when the
    achieved error estimate is worse than 1e-7."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    val, est = _amp_quadrature(params, ff, params.cutoff * t)
    if est > 1e-7:
        raise ConvergenceError("oscillatory quadrature accuracy not reached",
                               achieved=est)
    return (val, est) if with_error else val


# ---------------------------------------------------------------------------
# phi1 exact engine
# ---------------------------------------------------------------------------

def _sqrt_lower(z: complex) -> complex:
    u = cmath.sqrt(z)
    return -u if u.imag > 0 or (u.imag == 0 and u.real >= 0) else u


def _phi1_machine(params: ModelParams):
    roots = resonance_roots(params, Formfactor.phi1())
    us = np.array([_sqrt_lower(r.z) for r in roots])
    ws = np.array([r.residue_weight for r in roots])
    return us, ws


def _amp_phi1(params: ModelParams, s: float) -> complex:
    if params.coupling_sq == 0.0:
        return cmath.exp(1j * params.omega_ratio * s)
    us, ws = _phi1_machine(params)
    beta = cmath.exp(3j * math.pi / 4) * us * math.sqrt(s)
    return complex(0.5 * np.sum(ws * wofz(beta)))


def survival_amplitude_phi1_exact(params: ModelParams, t: float) -> complex:
    if t < 0:
        raise ValueError("time must be nonnegative")
    return _amp_phi1(params, params.cutoff * t)


# ---------------------------------------------------------------------------
# phi2 pole engine
# ---------------------------------------------------------------------------

def _phi2_Q(x, w_ratio, g2):
    """Stable denominator kernel of the background integral; the two
    factors Q + pi*g2*x/2 and Q - 3*pi*g2*x/2 are (1-x^2)^2 eta(ix) on
    the two sheets, assembled without the (1-x^2)^4 blow-up near x = 1."""
    xx = x * x
    return ((w_ratio - 1j * x) * (1 - xx) ** 2
            - g2 / 4 * (math.pi - 2j * x) * (1 - xx)
            - g2 / 2 * (math.pi * xx - 2j * x * np.log(x)))


def _phi2_background_kernel(x, s, w_ratio, g2):
    q = _phi2_Q(x, w_ratio, g2)
    return (x * (1 - x * x) ** 2 * np.exp(-x * s)
            / ((q + 0.5 * g2 * math.pi * x) * (q - 1.5 * g2 * math.pi * x)))


def _phi2_background(params: ModelParams, s: float):
    """-g2 * int_0^inf of the damped kernel; exp(-xs) truncates the range
    once it underflows."""
    w_ratio, g2 = params.omega_ratio, params.coupling_sq
    d = math.sqrt(math.pi) / 2 * params.coupling
    segs = [0.0, 0.5, 1 - 10 * d, 1 - d, 1.0, 1 + d, 1 + 10 * d, 2.0, 10.0]
    X = 42.0 / s if s > 0 else math.inf
    f = lambda x: _phi2_background_kernel(x, s, w_ratio, g2)
    if X < 10.0:
        segs = [t for t in segs if t < X] + [X]
        val, err = quadlib.quad_segments(f, segs, epsabs=1e-14)
    else:
        val, err = quadlib.quad_segments(f, segs, epsabs=1e-14)
        vt, et = quadlib.quad_complex_vec(
            lambda u: f(10.0 + u / (1 - u)) / (1 - u) ** 2, 0.0, 1.0,
            epsabs=1e-14)
        val += vt
        err += et
    return -g2 * val, err


def _phi2_poles(params: ModelParams):
    roots = [r for r in resonance_roots(params, Formfactor.phi2())
             if r.contributing]
    return roots


def _amp_phi2(params: ModelParams, s: float) -> complex:
    if params.coupling_sq == 0.0:
        return cmath.exp(1j * params.omega_ratio * s)
    total = 0j
    for r in _phi2_poles(params):
        total += r.residue_weight * cmath.exp(1j * r.z * s)
    bg, _ = _phi2_background(params, s)
    return total + bg


def survival_amplitude_phi2(params: ModelParams, t: float) -> complex:
    if t < 0:
        raise ValueError("time must be nonnegative")
    return _amp_phi2(params, params.cutoff * t)


# ---------------------------------------------------------------------------
# probability, engine dispatch, deficits
# ---------------------------------------------------------------------------

def survival_amplitude(params: ModelParams, ff: Formfactor, t: float,
                       engine: Engine = Engine.AUTO) -> complex:
    eng = resolve_engine(ff, engine)
    if eng is Engine.PHI1_EXACT:
        return survival_amplitude_phi1_exact(params, t)
    if eng is Engine.PHI2_POLES:
        return survival_amplitude_phi2(params, t)
    if eng is Engine.QUADRATURE:
        return survival_amplitude_quadrature(params, ff, t)
    raise EngineMismatchError(f"{eng.value} does not produce an amplitude")


def survival_probability(params: ModelParams, ff: Formfactor, t: float,
                         engine: Engine = Engine.AUTO) -> float:
    eng = resolve_engine(ff, engine)
    if eng is Engine.ASYMPTOTIC_LONG:
        return long_time_asymptote(params, ff, t)
    if eng is Engine.SERIES_SHORT:
        return short_time_expansion(params, ff).evaluate(t)
    return abs(survival_amplitude(params, ff, t, eng)) ** 2


def survival_deficit(params: ModelParams, ff: Formfactor, t: float) -> float:
    """1 - p(t), accurate in relative terms even when it underflows the
    absolute tolerance of the amplitude engines (short-time regime)."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if params.coupling_sq == 0.0:
        return 0.0
    s = params.cutoff * t
    if s == 0.0:
        return 0.0
    if s > 1.0:
        return 1.0 - survival_probability(params, ff, t)
    return _deficit_kernel(params, ff, s)


def _deficit_kernel(params: ModelParams, ff: Formfactor, s: float) -> float:
    """2 Re D - |D|^2 with D = int rho (1 - exp(is(x - x0))) dx.

    Anchoring the phase at the spike center removes the mean-frequency
    phase from D, so no catastrophic cancellation occurs between the two
    terms; every integrand below is benign for adaptive quadrature.
    """
    rho = lambda x: spectral_density(params, ff, x)
    x0, width = spectral_peak(params, ff)
    X1 = max(_X_FAR, 30.0 / s, 2 * x0)
    segs = sorted(set([0.0, x0, X1] + quadlib.geometric_ladder(x0, width, 0.0, X1)))

    re_part, _ = quadlib.quad_segments(
        lambda x: 2.0 * rho(x) * np.sin(0.5 * s * (x - x0)) ** 2 + 0j,
        segs, epsabs=1e-16, limit=800)
    im_part, _ = quadlib.quad_segments(
        lambda x: rho(x) * np.sin(s * (x - x0)) + 0j,
        segs, epsabs=1e-16, limit=800)
    tail_mass, _ = quadlib.quad_complex_vec(
        lambda u: rho(X1 + u / (1 - u)) / (1 - u) ** 2 + 0j, 0.0, 1.0,
        epsabs=1e-16)
    # oscillatory remainder of the tail: int_X1^inf rho exp(is(x-x0)) dx
    osc_tail, _ = quadlib.byparts_tail(rho, X1, s, scale=X1 / 2)
    osc_tail *= cmath.exp(-1j * s * x0)

    re_d = float(re_part.real) + float(tail_mass.real) - osc_tail.real
    im_d = -float(im_part.real) - osc_tail.imag
    return 2.0 * re_d - re_d * re_d - im_d * im_d


def log_survival(params: ModelParams, ff: Formfactor, t: float) -> float:
    """ln p(t) without underflow for small deficits."""
    s = params.cutoff * t
    if s <= 1.0:
        d = survival_deficit(params, ff, t)
        if d >= 1.0:
            return -math.inf
        return math.log1p(-d)
    p = survival_probability(params, ff, t)
    if p <= 0.0:
        return -math.inf
    return math.log(p)


# ---------------------------------------------------------------------------
# short-time expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShortTimeExpansion:
    """Leading terms of p(t) near t = 0.

    p = 1 - (t/t_a)^s + (t/t_b)^q + [log-corrected quartic], with the
    pairing (s, q) = (1.5, 2) for the sqrt-head weight and (2, 4)
    otherwise; the Lorentzian-squared weight replaces the (t/t_b)^q term
    by -log_coefficient * ln(log_frequency * t) * t^4.
    """

    leading_exponent: float
    t_a: float
    t_b: Optional[float]
    log_coefficient: Optional[float]
    log_frequency: Optional[float]
    validity_time: float

    @property
    def has_log_correction(self) -> bool:
        return self.log_coefficient is not None

    def deficit(self, t: float) -> float:
        out = (t / self.t_a) ** self.leading_exponent
        if self.has_log_correction:
            out += self.log_coefficient * math.log(self.log_frequency * t) * t ** 4
        elif self.t_b is not None:
            q = 2.0 if self.leading_exponent == 1.5 else 4.0
            out -= (t / self.t_b) ** q
        return out

    def evaluate(self, t: float) -> float:
        return 1.0 - self.deficit(t)


def short_time_expansion(params: ModelParams, ff: Formfactor) -> ShortTimeExpansion:
    lam = params.coupling
    cut = params.cutoff
    if ff.id == PHI1:
        t_a = (3.0 / (4.0 * math.sqrt(2 * math.pi))) ** (2.0 / 3.0) \
            / (lam ** (4.0 / 3.0) * cut)
        t_b = 1.0 / (math.sqrt(math.pi) * lam * cut)
        t_z = t_b ** 4 / t_a ** 3
        return ShortTimeExpansion(1.5, t_a, t_b, None, None, t_z)
    if ff.id == PHI2:
        t_a = math.sqrt(2.0) / (lam * cut)
        coeff = params.coupling_sq * cut ** 4 / 12.0
        arg = 2.0 * math.sqrt(6) * params.omega_ratio
        t_z = math.sqrt(6) / (cut * math.sqrt(abs(math.log(arg))))
        return ShortTimeExpansion(2.0, t_a, None, coeff, 2.0 * params.omega1, t_z)

    i0 = moment(ff, 0)
    if i0 is DIVERGENT:
        raise ExpansionUnavailableError("I0 = int phi dx")
    i2 = moment(ff, 2)
    if i2 is DIVERGENT:
        raise ExpansionUnavailableError("I2 = int x^2 phi dx")
    g2 = params.coupling_sq
    t_a = 1.0 / (lam * cut * math.sqrt(i0))
    i1 = moment(ff, 1)
    phi_sq = squared_norm(ff)
    if i1 is not DIVERGENT and phi_sq is not DIVERGENT:
        inv_tb4 = (g2 * (params.omega1 ** 2 * cut ** 2 * i0 / 12.0
                         - params.omega1 * cut ** 3 * i1 / 6.0
                         + cut ** 4 * i2 / 12.0)
                   + g2 * g2 * cut ** 4 * (i0 * i0 / 4.0 + phi_sq / 12.0))
    elif params.weak_coupling:
        inv_tb4 = g2 * cut ** 4 * i2 / 12.0
    else:
        name = "I1" if i1 is DIVERGENT else "int phi^2 dx"
        raise ExpansionUnavailableError(name)
    t_b = inv_tb4 ** -0.25
    # balance point of the quadratic and quartic terms
    t_z = t_b * t_b / t_a
    return ShortTimeExpansion(2.0, t_a, t_b, None, None, t_z)


# ---------------------------------------------------------------------------
# long-time asymptote
# ---------------------------------------------------------------------------

def _phi1_tail_coefficient(params: ModelParams) -> complex:
    roots = resonance_roots(params, Formfactor.phi1())
    zprod = np.prod([r.z for r in roots])
    return (math.sqrt(math.pi) * params.coupling_sq / 2.0
            * cmath.exp(-1j * math.pi / 4) / zprod)


def background_zero_frequency(params: ModelParams) -> complex:
    """Q(0) = omega_ratio - pi*g2/4, the x -> 0 limit of the background
    kernel denominator for the Lorentzian-squared weight."""
    return params.omega_ratio - math.pi * params.coupling_sq / 4.0


def long_time_asymptote(params: ModelParams, ff: Formfactor, t: float) -> float:
    """Three-term form |pole * exp(izs) + tail * s^-q|^2: exponential,
    power law, and the oscillatory cross term, with exact root-based
    coefficients."""
    s = params.cutoff * t
    if ff.id == PHI1:
        threshold = 24.0 / params.omega1
        res = decaying_resonance(params, ff)
        pole = res.residue_weight * cmath.exp(1j * res.z * s)
        tail = _phi1_tail_coefficient(params) * s ** -1.5
    elif ff.id == PHI2:
        threshold = 4.0 / params.omega1
        res = decaying_resonance(params, ff)
        pole = res.residue_weight * cmath.exp(1j * res.z * s)
        q0 = background_zero_frequency(params)
        tail = -params.coupling_sq / (q0 * q0) * s ** -2.0
    else:
        raise EngineMismatchError(
            f"long-time asymptote supports phi1 and phi2, not {ff.id!r}")
    if t < threshold:
        warnings.warn(
            f"long-time asymptote evaluated at t={t:.3g}s below its "
            f"validity threshold {threshold:.3g}s", stacklevel=2)
    return abs(pole + tail) ** 2


def asymptote_terms(params: ModelParams, ff: Formfactor, t: float):
    """(exponential term, power term) of the asymptote, for crossover
    bracketing."""
    s = params.cutoff * t
    res = decaying_resonance(params, ff)
    expo = abs(res.residue_weight) ** 2 * math.exp(-2.0 * res.z.imag * s)
    if ff.id == PHI1:
        power = abs(_phi1_tail_coefficient(params)) ** 2 * s ** -3.0
    elif ff.id == PHI2:
        q0 = background_zero_frequency(params)
        power = (params.coupling_sq / abs(q0) ** 2) ** 2 * s ** -4.0
    else:
        raise EngineMismatchError(
            f"long-time asymptote supports phi1 and phi2, not {ff.id!r}")
    return expo, power


# ---------------------------------------------------------------------------
# curve sampling
# ---------------------------------------------------------------------------

@dataclass
class SurvivalCurve:
    params: ModelParams
    formfactor_id: str
    engine: Engine
    times: np.ndarray          # seconds, strictly increasing
    probabilities: np.ndarray
    error_estimates: np.ndarray
    decay_time: Optional[float] = None
    clamped: bool = False

    EPS = 1e-8

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("curve times must be strictly increasing")
        low, high = -self.EPS, 1.0 + self.EPS
        if np.any(self.probabilities < low) or np.any(self.probabilities > high):
            raise ValueError("probability outside [0,1] beyond tolerance")
        out = np.clip(self.probabilities, 0.0, 1.0)
        self.clamped = bool(np.any(out != self.probabilities))
        self.probabilities = out


def sample_curve(params: ModelParams, ff: Formfactor, times,
                 engine: Engine = Engine.AUTO,
                 decay_time: Optional[float] = None) -> SurvivalCurve:
    eng = resolve_engine(ff, engine)
    times = np.asarray(sorted(set(float(t) for t in times)))
    ps, errs = [], []
    for t in times:
        if eng is Engine.QUADRATURE:
            a, est = survival_amplitude_quadrature(params, ff, t, with_error=True)
            ps.append(abs(a) ** 2)
            errs.append(2.0 * est)
        else:
            ps.append(survival_probability(params, ff, t, eng))
            errs.append(1e-12)
    return SurvivalCurve(params, ff.id, eng, times, np.array(ps),
                         np.array(errs), decay_time=decay_time)
