"""NumPy implementation of the numerical hot paths.

The compiled extension (``polarpga._core``) mirrors this module's public
surface; ``polarpga._backend`` picks one of the two at import time.
Everything here is array-oriented so that the construction recursion and
the Monte-Carlo harness stay vectorized when no compiler is around.

The exact GA function is evaluated through the identity obtained by
completing the square in the exponent,

    phi(x) = exp(-x/4) / sqrt(4*pi*x) * I(x),
    I(x)   = integral of sech(u/2) * exp(-u^2/(4x)) du over the real line,

which is algebraically equal to 1 - E[tanh(U/2)], U ~ N(x, 2x), but has a
bounded positive integrand and therefore stays accurate in the log domain
for arbitrarily large x.
"""

from __future__ import annotations

import numpy as np

from polarpga._params import (
    AGA_A,
    AGA_BOUND,
    AGA_C,
    AGA_P,
    APGA_SEGMENTS,
    PGA_A,
    PGA_BOUND,
    PGA_BREAK,
    PGA_C,
    PGA_D,
    PGA_P,
    PGA_Q1,
    PGA_Q2,
    PGA_T,
    POLY_BOUNDS,
    SPGA_SEGMENTS,
)
from polarpga.errors import ConvergenceError

NAME = "python"

# Below this point log phi(x) = -x/2 + x^2/8 + O(x^3); the cubic term is
# under 1e-10 relative, while the quadrature window would keep shrinking.
SERIES_CUTOFF = 1e-5

# sech(u/2) < 2e-15 past |u| = 70; the Gaussian factor only helps, so the
# truncated tail stays below 1e-15 of the integral for every x.
SECH_TAIL = 70.0

BISECT_MAX_ITER = 200
BISECT_WIDTH_TOL = 1e-12

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _sech_gauss_integral(x, w, panels, order):
    """Composite Gauss-Legendre estimate of 2 * int_0^w sech(u/2) e^(-u^2/4x) du."""
    nodes, weights = _leggauss(order)
    inv4x = (1.0 / (4.0 * x))[:, None]
    width = w / panels
    halfw = (0.5 * width)[:, None]
    total = np.zeros_like(x)
    for p in range(panels):
        u = (p * width)[:, None] + halfw * (nodes + 1.0)
        f = np.exp(-(u * u) * inv4x) / np.cosh(0.5 * u)
        total += f @ weights
    return (2.0 * 0.5) * width * total


def _log_phi_quad(x, rel_tol, max_panels, halfwidth):
    """log phi on x > SERIES_CUTOFF via an adaptive Gauss pair rule.

    Per refinement level the 7-point and 15-point rules on the same panels
    give the error estimate; lanes that meet rel_tol drop out, the rest get
    twice the panels.
    """
    w = np.minimum(halfwidth * np.sqrt(2.0 * x), SECH_TAIL)
    integral = np.empty_like(x)
    active = np.arange(x.size)
    panels = 16
    while active.size:
        if panels > max_panels:
            raise ConvergenceError(
                f"phi quadrature needed more than {max_panels} panels "
                f"for rel_tol={rel_tol}"
            )
        xa, wa = x[active], w[active]
        fine = _sech_gauss_integral(xa, wa, panels, 15)
        coarse = _sech_gauss_integral(xa, wa, panels, 7)
        ok = np.abs(fine - coarse) <= rel_tol * np.abs(fine)
        integral[active[ok]] = fine[ok]
        active = active[~ok]
        panels *= 2
    return np.log(integral) - 0.25 * x - 0.5 * np.log(4.0 * np.pi * x)


def log_phi_arr(x, rel_tol=1e-10, max_panels=512, halfwidth=12.0):
    """log of the exact GA phi for an array of mean LLRs x >= 0."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x < SERIES_CUTOFF
    xs = x[small]
    out[small] = -0.5 * xs + 0.125 * xs * xs
    big = ~small
    if big.any():
        out[big] = _log_phi_quad(x[big], rel_tol, max_panels, halfwidth)
    return out


def log_phi_aga_arr(x):
    """log of the two-segment closed-form GA approximant."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    low = x <= AGA_BOUND
    xl = x[low]
    out[low] = AGA_A * xl**AGA_P + AGA_C
    xh = x[~low]
    out[~low] = 0.5 * np.log(np.pi / xh) + np.log1p(-10.0 / (7.0 * xh)) - 0.25 * xh
    return out


def log_phi_pga_arr(x):
    """log of the three-segment closed-form piecewise-GA phi."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    b1 = x < PGA_BREAK
    b3 = x >= PGA_BOUND
    b2 = ~(b1 | b3)
    x1 = x[b1]
    out[b1] = (PGA_Q2 * x1 + PGA_Q1) * x1
    x2 = x[b2]
    out[b2] = PGA_A * x2**PGA_P + PGA_C
    x3 = x[b3]
    out[b3] = 0.5 * np.log(np.pi / x3) + np.log1p(-PGA_T / x3) - x3 / PGA_D
    return out


_LOG_PHI_BY_KIND = {
    "ega": log_phi_arr,
    "aga": lambda x, **_: log_phi_aga_arr(x),
    "pga": lambda x, **_: log_phi_pga_arr(x),
}


def invert_log_phi_arr(target, kind="ega", rel_tol=1e-10, max_panels=512,
                       halfwidth=12.0):
    """Solve log phi(x) = target elementwise by monotone bisection.

    The bracket is grown geometrically from [0, 1]; the interval is halved
    until its width drops below BISECT_WIDTH_TOL * max(1, x).
    """
    fn = _LOG_PHI_BY_KIND[kind]

    def logphi(v):
        return fn(v, rel_tol=rel_tol, max_panels=max_panels, halfwidth=halfwidth)

    t = np.ascontiguousarray(target, dtype=np.float64)
    lo = np.zeros_like(t)
    hi = np.ones_like(t)
    grow = logphi(hi) > t
    for _ in range(BISECT_MAX_ITER):
        if not grow.any():
            break
        idx = np.flatnonzero(grow)
        lo[idx] = hi[idx]
        hi[idx] *= 2.0
        still = logphi(hi[idx]) > t[idx]
        grow[idx] = still
    else:
        raise ConvergenceError("no bisection bracket within the iteration cap")

    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        act = (hi - lo) > BISECT_WIDTH_TOL * np.maximum(1.0, mid)
        if not act.any():
            break
        idx = np.flatnonzero(act)
        m = mid[idx]
        right = logphi(m) > t[idx]  # phi(m) above target: root is right of m
        lo[idx[right]] = m[right]
        hi[idx[~right]] = m[~right]
    return 0.5 * (lo + hi)


def _degrade_target(logphi_vals):
    # log(phi * (2 - phi)) = L + log(2 - e^L), stable for every L <= log 2.
    L = logphi_vals
    return L + np.log1p(-np.expm1(L))


def _step_via_inverse(x, kind, rel_tol, max_panels, halfwidth):
    fn = _LOG_PHI_BY_KIND[kind]
    L = fn(x, rel_tol=rel_tol, max_panels=max_panels, halfwidth=halfwidth)
    target = _degrade_target(L)
    return invert_log_phi_arr(target, kind, rel_tol, max_panels, halfwidth)


def ega_step_arr(x, rel_tol=1e-10, max_panels=512, halfwidth=12.0):
    """Odd-branch degradation map phi^-1(1 - (1 - phi(x))^2) of the exact GA."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0.0
    if pos.any():
        out[pos] = _step_via_inverse(x[pos], "ega", rel_tol, max_panels, halfwidth)
    return out


def aga_step_arr(x, rel_tol=1e-10, max_panels=512, halfwidth=12.0):
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _step_via_inverse(x, "aga", rel_tol, max_panels, halfwidth)


def pga_step_arr(x, rel_tol=1e-10, max_panels=512, halfwidth=12.0):
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0.0
    if pos.any():
        out[pos] = _step_via_inverse(x[pos], "pga", rel_tol, max_panels, halfwidth)
    return out


def _poly_step_arr(x, segments):
    x = np.ascontiguousarray(x, dtype=np.float64)
    seg = np.searchsorted(np.asarray(POLY_BOUNDS), x, side="left")
    out = np.empty_like(x)
    for s, (a3, a2, a1, a0) in enumerate(segments):
        m = seg == s
        xs = x[m]
        out[m] = ((a3 * xs + a2) * xs + a1) * xs + a0
    return np.maximum(out, 0.0)


def apga_step_arr(x):
    """Five-segment polynomial step map tuned for medium block lengths."""
    return _poly_step_arr(x, APGA_SEGMENTS)


def spga_step_arr(x):
    """Five-segment polynomial step map tuned for long block lengths."""
    return _poly_step_arr(x, SPGA_SEGMENTS)


# ---------------------------------------------------------------------------
# Codec

def polar_transform_arr(bits):
    """In-place butterfly x = u * F2^(kron n) on uint8 rows of shape (B, N)."""
    B, N = bits.shape
    span = 1
    while span < N:
        view = bits.reshape(B, -1, 2, span)
        view[:, :, 0, :] ^= view[:, :, 1, :]
        span *= 2
    return bits


def _f_llr(a, b):
    s = np.sign(a) * np.sign(b)
    m = np.minimum(np.abs(a), np.abs(b))
    return s * m + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def sc_decode_arr(llr, frozen_mask):
    """Batch successive-cancellation decode.

    Parameters
    ----------
    llr : (B, N) float64 channel LLRs, positive favouring bit 0.
    frozen_mask : (N,) uint8, 1 on frozen positions.

    Returns
    -------
    (B, N) uint8 array of decided input bits.
    """
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    B, N = llr.shape
    uhat = np.empty((B, N), dtype=np.uint8)

    def rec(l, off):
        m = l.shape[1]
        if m == 1:
            if frozen_mask[off]:
                bits = np.zeros(B, dtype=np.uint8)
            else:
                bits = (l[:, 0] < 0.0).astype(np.uint8)
            uhat[:, off] = bits
            return bits[:, None]
        h = m // 2
        a, b = l[:, :h], l[:, h:]
        x_left = rec(_f_llr(a, b), off)
        g = b + (1.0 - 2.0 * x_left) * a
        x_right = rec(g, off + h)
        return np.concatenate([x_left ^ x_right, x_right], axis=1)

    rec(llr, 0)
    return uhat
