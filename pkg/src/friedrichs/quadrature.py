"""Quadrature helpers: principal values and oscillatory Fourier integrals.

The survival amplitude is a Fourier transform of a spectral density that
combines a very narrow resonance spike with slowly decaying power tails,
at phases s = cutoff * t reaching 1e10 and beyond.  No single quadrature
strategy covers that range, so the oscillatory driver dispatches per
region:

  * few oscillations           -> adaptive quad with geometric breakpoint
                                  ladders around the spike;
  * moderate panel counts      -> phase-aligned half-period panels summed
                                  with fixed Gauss-Legendre rules;
  * infinite oscillatory tails -> half-period panels accelerated by
                                  repeated averaging of partial sums
                                  (alternating-series / Euler transform);
  * huge panel counts          -> integration by parts in exp(i s x),
                                  keeping five endpoint terms with finite-
                                  difference derivatives, plus short panel
                                  caps at the region ends.

Principal values use symmetric excision of the pole with three-level
Richardson extrapolation of the excision radius.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def quad_complex(f, a, b, points=None, epsabs=1e-12, limit=600):
    """Adaptive quad of a complex scalar integrand; returns (value, err).

    full_output suppresses convergence warnings; callers act on the
    returned error estimate instead.
    """
    re = integrate.quad(lambda x: f(x).real, a, b, points=points,
                        epsabs=epsabs, epsrel=1e-12, limit=limit,
                        full_output=1)
    im = integrate.quad(lambda x: f(x).imag, a, b, points=points,
                        epsabs=epsabs, epsrel=1e-12, limit=limit,
                        full_output=1)
    return re[0] + 1j * im[0], re[1] + im[1]


def quad_complex_vec(fvec, a, b, points=None, epsabs=1e-12, limit=600):
    return quad_complex(lambda x: fvec(np.array([x]))[0], a, b,
                        points=points, epsabs=epsabs, limit=limit)


def geometric_ladder(center, width, lo, hi, ratio=4.0):
    """Breakpoints stepping geometrically away from a feature of the given
    width at `center`, clipped to the open interval (lo, hi).  Adaptive
    quadrature subdivides each rung cheaply, so narrow features are never
    missed by coarse initial sampling."""
    pts = []
    d = width
    span = max(abs(hi - center), abs(center - lo), 1.0)
    for _ in range(240):
        if lo < center - d < hi:
            pts.append(center - d)
        if lo < center + d < hi:
            pts.append(center + d)
        if d > ratio * span:
            break
        d *= ratio
    return sorted(set(pts))


def quad_segments(fvec, breakpoints, epsabs=1e-12, limit=600):
    """Sum of adaptive quads over consecutive breakpoint pairs."""
    total, err = 0j, 0.0
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi <= lo:
            continue
        v, e = quad_complex_vec(fvec, lo, hi, epsabs=epsabs, limit=limit)
        total += v
        err += e
    return total, err


def panel_integrals(fvec, start, n_panels, h, s):
    """Per-panel integrals of f(x) exp(isx) over n consecutive panels of
    width h, one 16-point Gauss-Legendre rule per panel (vectorized)."""
    edges = start + h * np.arange(n_panels)
    x = (edges[:, None] + (h / 2.0) * (1.0 + _GL_NODES[None, :])).ravel()
    vals = fvec(x) * np.exp(1j * s * x)
    vals = vals.reshape(n_panels, _GL_NODES.size)
    return (h / 2.0) * (vals @ _GL_WEIGHTS)


def euler_accelerate(terms):
    """Sum an (eventually) alternating series of complex panel terms by
    repeated averaging of its partial sums; returns (sum, error_estimate)."""
    partial = np.cumsum(terms)
    best = partial[-1]
    err = abs(terms[-1])
    row = partial
    for _ in range(len(terms) - 1):
        row = 0.5 * (row[:-1] + row[1:])
        if row.size == 0:
            break
        delta = abs(row[-1] - best)
        best = row[-1]
        err = min(err, delta) if delta > 0 else err
        if row.size < 3:
            break
    return best, err


def endpoint_derivatives(fvec, x, h):
    """f, f', ..., f'''' at x from a 9-point central stencil of spacing h."""
    vals = fvec(x + h * np.arange(-4.0, 5.0))
    d0 = vals[4]
    d1 = (-vals[6] + 8 * vals[5] - 8 * vals[3] + vals[2]) / (12 * h)
    d2 = (-vals[6] + 16 * vals[5] - 30 * vals[4] + 16 * vals[3] - vals[2]) / (12 * h * h)
    d3 = (vals[6] - 2 * vals[5] + 2 * vals[3] - vals[2]) / (2 * h ** 3)
    d4 = (vals[6] - 4 * vals[5] + 6 * vals[4] - 4 * vals[3] + vals[2]) / h ** 4
    return (d0, d1, d2, d3, d4)


def _fd_step(scale, s):
    """Step for endpoint derivative stencils: small enough to beat the
    truncation error, large enough that roundoff / (h s)^m stays tame."""
    return min(max(scale / 40.0, 4.0 / s), scale / 8.0)


def byparts_segment(fvec, a, b, s, scale_a, scale_b):
    """int_a^b f exp(isx) dx by five integrations by parts.

    Valid when s * min(scale) >> 1, where scale_a/scale_b bound the
    smoothness scale of f at each endpoint; the error estimate is a few
    times the last retained term.
    """
    da = endpoint_derivatives(fvec, a, _fd_step(scale_a, s))
    db = endpoint_derivatives(fvec, b, _fd_step(scale_b, s))
    ea, eb = np.exp(1j * s * a), np.exp(1j * s * b)
    total = 0j
    last = 0.0
    for m in range(5):
        term = ((-1) ** m) * (db[m] * eb - da[m] * ea) / (1j * s) ** (m + 1)
        total += term
        last = abs(term)
    return total, 3.0 * last


def oscillatory_finite(fvec, a, b, s, scale_a, scale_b, epsabs=1e-12):
    """int_a^b f exp(isx) dx for smooth f; dispatch on oscillation count."""
    if b <= a:
        return 0j, 0.0
    n_half = s * (b - a) / np.pi
    if n_half <= 24:
        return quad_complex_vec(lambda x: fvec(x) * np.exp(1j * s * x),
                                a, b, epsabs=epsabs)
    h = np.pi / s
    n = int(n_half)
    if n <= 3000:
        head = panel_integrals(fvec, a, n, h, s).sum()
        rest, err = quad_complex_vec(lambda x: fvec(x) * np.exp(1j * s * x),
                                     a + n * h, b, epsabs=epsabs)
        return head + rest, err
    ncap = 24
    cap_a = panel_integrals(fvec, a, ncap, h, s).sum()
    cap_b = panel_integrals(fvec, b - ncap * h, ncap, h, s).sum()
    c, d = a + ncap * h, b - ncap * h
    sc = min(scale_a, c) if scale_a is not None else c
    sd = scale_b if scale_b is not None else (b - a)
    mid, err = byparts_segment(fvec, c, d, s, sc, sd)
    return cap_a + mid + cap_b, err


def byparts_tail(fvec, X, s, scale):
    """int_X^inf f exp(isx) dx for f decaying to zero, via endpoint terms
    at X only (the boundary terms at infinity vanish)."""
    d = endpoint_derivatives(fvec, X, _fd_step(scale, s))
    e = np.exp(1j * s * X)
    total = 0j
    last = 0.0
    for m in range(5):
        term = -((-1) ** m) * d[m] * e / (1j * s) ** (m + 1)
        total += term
        last = abs(term)
    return total, 3.0 * last


def oscillatory_tail(fvec, b, s, scale_b, max_direct=6000):
    """int_b^inf f exp(isx) dx for smooth decaying f, many oscillations.

    Sums enough half-period panels to clear the local structure of scale
    scale_b, then accelerates the remaining alternating series.
    """
    h = np.pi / s
    n_direct = int(min(max(np.ceil(6 * scale_b / h), 96), max_direct))
    terms = panel_integrals(fvec, b, n_direct, h, s)
    head = terms[:-64].sum()
    tail, err = euler_accelerate(terms[-64:])
    return head + tail, err


def principal_value(f, pole, upper, epsabs=1e-11):
    """PV int_0^upper f(x)/(x - pole) dx with 0 < pole < upper.

    Symmetric excision of radius h around the pole converges linearly in
    h; three radii h, h/2, h/4 are combined by Richardson extrapolation.
    """
    if not 0 < pole < upper:
        raise ValueError("pole must lie inside (0, upper)")
    h0 = min(pole, upper - pole) * 0.05

    def excised(h):
        left, _ = integrate.quad(lambda x: f(x) / (x - pole), 0.0, pole - h,
                                 epsabs=epsabs, epsrel=1e-12, limit=400,
                                 points=[max(pole - 4 * h, 0.0)])
        right, _ = integrate.quad(lambda x: f(x) / (x - pole), pole + h, upper,
                                  epsabs=epsabs, epsrel=1e-12, limit=400,
                                  points=[min(pole + 4 * h, upper)])
        return left + right

    i0, i1, i2 = excised(h0), excised(h0 / 2), excised(h0 / 4)
    r1 = 2 * i1 - i0          # kills the O(h) excision error
    r2 = 2 * i2 - i1          # remaining error is O(h^3)
    return (8 * r2 - r1) / 7


def pv_dispersion(phi_vec, y, tail_cut=None):
    """PV int_0^inf phi(x)/(x - y) dx for y > 0.

    The finite part [0, 4*max(1,y)] is handled by excision + Richardson;
    the tail is pole-free and compactified through x = X/(1-u).
    """
    X = 4.0 * max(1.0, y)
    if tail_cut is not None:
        X = max(X, tail_cut)
    main = principal_value(lambda x: float(phi_vec(np.array([x]))[0]), y, X)

    def tail(u):
        x = X / (1.0 - u)
        jac = X / (1.0 - u) ** 2
        return float(phi_vec(np.array([x]))[0]) / (x - y) * jac

    t, _ = integrate.quad(tail, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=400)
    return main + t
