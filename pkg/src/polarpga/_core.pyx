# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementation of the numerical hot paths.

Mirrors polarpga._pybackend: the same phi quadrature (sech form obtained
by completing the square), monotone bisection inverses, step maps, the
encoder butterfly and the successive-cancellation decoder, all as tight C
loops. Scalar adaptive panel splitting replaces the vectorized
panel-doubling of the NumPy backend; both use a 7/15-point Gauss pair as
the error estimate.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cosh, exp, expm1, fabs, log, log1p, pow, sqrt
from libc.stdlib cimport free, malloc

from polarpga._params import (
    AGA_A, AGA_BOUND, AGA_C, AGA_P,
    APGA_SEGMENTS, SPGA_SEGMENTS, POLY_BOUNDS,
    PGA_A, PGA_BOUND, PGA_BREAK, PGA_C, PGA_D, PGA_P, PGA_Q1, PGA_Q2, PGA_T,
)
from polarpga.errors import ConvergenceError

cnp.import_array()

NAME = "compiled"

cdef double SERIES_CUTOFF = 1e-5
cdef double SECH_TAIL = 70.0
cdef double BISECT_WIDTH_TOL = 1e-12

cdef enum:
    BISECT_MAX_ITER = 200
    COARSE_PANELS = 8
    MAX_STACK = 4096

# Gauss-Legendre nodes/weights, filled from numpy at import time.
cdef double G7X[7]
cdef double G7W[7]
cdef double G15X[15]
cdef double G15W[15]

_x7, _w7 = np.polynomial.legendre.leggauss(7)
_x15, _w15 = np.polynomial.legendre.leggauss(15)
for _i in range(7):
    G7X[_i] = _x7[_i]
    G7W[_i] = _w7[_i]
for _i in range(15):
    G15X[_i] = _x15[_i]
    G15W[_i] = _w15[_i]

# Closed-form kernel constants and polynomial segments, copied to C scope.
cdef double C_AGA_A = AGA_A
cdef double C_AGA_P = AGA_P
cdef double C_AGA_C = AGA_C
cdef double C_AGA_BOUND = AGA_BOUND
cdef double C_PGA_BREAK = PGA_BREAK
cdef double C_PGA_Q2 = PGA_Q2
cdef double C_PGA_Q1 = PGA_Q1
cdef double C_PGA_A = PGA_A
cdef double C_PGA_P = PGA_P
cdef double C_PGA_C = PGA_C
cdef double C_PGA_T = PGA_T
cdef double C_PGA_D = PGA_D
cdef double C_PGA_BOUND = PGA_BOUND

cdef double POLY_B[4]
cdef double APGA_C4[20]
cdef double SPGA_C4[20]
for _i in range(4):
    POLY_B[_i] = POLY_BOUNDS[_i]
for _i in range(5):
    for _j in range(4):
        APGA_C4[4 * _i + _j] = APGA_SEGMENTS[_i][_j]
        SPGA_C4[4 * _i + _j] = SPGA_SEGMENTS[_i][_j]

KIND_EGA = 0
KIND_AGA = 1
KIND_PGA = 2


cdef inline double _integrand(double u, double inv4x) noexcept nogil:
    return exp(-(u * u) * inv4x) / cosh(0.5 * u)


cdef inline double _panel(double a, double b, double inv4x, double* err) noexcept nogil:
    cdef double mid = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double s15 = 0.0, s7 = 0.0
    cdef int i
    for i in range(15):
        s15 += G15W[i] * _integrand(mid + half * G15X[i], inv4x)
    for i in range(7):
        s7 += G7W[i] * _integrand(mid + half * G7X[i], inv4x)
    err[0] = fabs(s15 - s7) * half
    return s15 * half


cdef double _sech_gauss_integral(double w, double inv4x, double rel_tol,
                                 int max_panels, int* fail) noexcept nogil:
    """Adaptive estimate of 2 * int_0^w sech(u/2) e^(-u^2 inv4x) du."""
    cdef double stack_a[MAX_STACK]
    cdef double stack_b[MAX_STACK]
    cdef int sp = 0
    cdef int used = COARSE_PANELS
    cdef double total = 0.0
    cdef double coarse = 0.0
    cdef double width = w / COARSE_PANELS
    cdef double v, e, a, b, m
    cdef int i

    # Coarse pass fixes the absolute error budget.
    for i in range(COARSE_PANELS):
        v = _panel(i * width, (i + 1) * width, inv4x, &e)
        coarse += v
    cdef double tol_per_width = rel_tol * coarse / w

    for i in range(COARSE_PANELS):
        stack_a[sp] = i * width
        stack_b[sp] = (i + 1) * width
        sp += 1

    while sp > 0:
        sp -= 1
        a = stack_a[sp]
        b = stack_b[sp]
        v = _panel(a, b, inv4x, &e)
        if e <= tol_per_width * (b - a) or (b - a) <= 1e-13 * w:
            total += v
        elif used + 1 > max_panels or sp + 2 > MAX_STACK:
            fail[0] = 1
            total += v
        else:
            used += 1
            m = 0.5 * (a + b)
            stack_a[sp] = a
            stack_b[sp] = m
            sp += 1
            stack_a[sp] = m
            stack_b[sp] = b
            sp += 1
    return 2.0 * total


cdef double _log_phi(double x, double rel_tol, int max_panels,
                     double halfwidth, int* fail) noexcept nogil:
    cdef double w, integral
    if x < SERIES_CUTOFF:
        return -0.5 * x + 0.125 * x * x
    w = halfwidth * sqrt(2.0 * x)
    if w > SECH_TAIL:
        w = SECH_TAIL
    integral = _sech_gauss_integral(w, 1.0 / (4.0 * x), rel_tol, max_panels, fail)
    return log(integral) - 0.25 * x - 0.5 * log(4.0 * M_PI * x)


cdef double _log_phi_kind(int kind, double x, double rel_tol, int max_panels,
                          double halfwidth, int* fail) noexcept nogil:
    if kind == 0:
        return _log_phi(x, rel_tol, max_panels, halfwidth, fail)
    if kind == 1:
        if x <= C_AGA_BOUND:
            return C_AGA_A * pow(x, C_AGA_P) + C_AGA_C
        return 0.5 * log(M_PI / x) + log1p(-10.0 / (7.0 * x)) - 0.25 * x
    if x < C_PGA_BREAK:
        return (C_PGA_Q2 * x + C_PGA_Q1) * x
    if x < C_PGA_BOUND:
        return C_PGA_A * pow(x, C_PGA_P) + C_PGA_C
    return 0.5 * log(M_PI / x) + log1p(-C_PGA_T / x) - x / C_PGA_D


cdef double _invert_log_phi(int kind, double target, double rel_tol,
                            int max_panels, double halfwidth, int* fail) noexcept nogil:
    cdef double lo = 0.0
    cdef double hi = 1.0
    cdef double mid, width_tol
    cdef int it = 0

    while _log_phi_kind(kind, hi, rel_tol, max_panels, halfwidth, fail) > target:
        lo = hi
        hi *= 2.0
        it += 1
        if it > BISECT_MAX_ITER:
            fail[0] = 2
            return hi

    for it in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        width_tol = BISECT_WIDTH_TOL * (1.0 if mid < 1.0 else mid)
        if hi - lo <= width_tol:
            break
        if _log_phi_kind(kind, mid, rel_tol, max_panels, halfwidth, fail) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


cdef inline double _degrade_target(double L) noexcept nogil:
    # log(phi * (2 - phi)) = L + log(2 - e^L)
    return L + log1p(-expm1(L))


cdef double _step_kind(int kind, double x, double rel_tol, int max_panels,
                       double halfwidth, int* fail) noexcept nogil:
    cdef double L, target
    if x == 0.0 and kind != 1:
        return 0.0
    L = _log_phi_kind(kind, x, rel_tol, max_panels, halfwidth, fail)
    target = _degrade_target(L)
    return _invert_log_phi(kind, target, rel_tol, max_panels, halfwidth, fail)


cdef _raise_if_failed(int fail):
    if fail == 0:
        return
    if fail == 2:
        raise ConvergenceError("no bisection bracket within the iteration cap")
    raise ConvergenceError("phi quadrature exceeded its panel budget")


def log_phi_arr(x, double rel_tol=1e-10, int max_panels=512, double halfwidth=12.0):
    """log of the exact GA phi for an array of mean LLRs x >= 0."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    cdef int fail = 0
    with nogil:
        for i in range(n):
            out[i] = _log_phi(xa[i], rel_tol, max_panels, halfwidth, &fail)
    _raise_if_failed(fail)
    return out


def log_phi_aga_arr(x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    cdef int fail = 0
    with nogil:
        for i in range(n):
            out[i] = _log_phi_kind(1, xa[i], 0.0, 0, 0.0, &fail)
    return out


def log_phi_pga_arr(x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    cdef int fail = 0
    with nogil:
        for i in range(n):
            out[i] = _log_phi_kind(2, xa[i], 0.0, 0, 0.0, &fail)
    return out


_KIND_OF = {"ega": 0, "aga": 1, "pga": 2}


def invert_log_phi_arr(target, kind="ega", double rel_tol=1e-10,
                       int max_panels=512, double halfwidth=12.0):
    """Solve log phi(x) = target elementwise by monotone bisection."""
    cdef int k = _KIND_OF[kind]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ta = np.ascontiguousarray(target, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(ta)
    cdef Py_ssize_t i, n = ta.shape[0]
    cdef int fail = 0
    with nogil:
        for i in range(n):
            out[i] = _invert_log_phi(k, ta[i], rel_tol, max_panels, halfwidth, &fail)
    _raise_if_failed(fail)
    return out


def _step_arr(x, int kind, double rel_tol, int max_panels, double halfwidth):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    cdef int fail = 0
    with nogil:
        for i in range(n):
            out[i] = _step_kind(kind, xa[i], rel_tol, max_panels, halfwidth, &fail)
    _raise_if_failed(fail)
    return out


def ega_step_arr(x, double rel_tol=1e-10, int max_panels=512, double halfwidth=12.0):
    """Odd-branch degradation map phi^-1(1 - (1 - phi(x))^2) of the exact GA."""
    return _step_arr(x, 0, rel_tol, max_panels, halfwidth)


def aga_step_arr(x, double rel_tol=1e-10, int max_panels=512, double halfwidth=12.0):
    return _step_arr(x, 1, rel_tol, max_panels, halfwidth)


def pga_step_arr(x, double rel_tol=1e-10, int max_panels=512, double halfwidth=12.0):
    return _step_arr(x, 2, rel_tol, max_panels, halfwidth)


cdef inline double _poly_step(const double* C, double x) noexcept nogil:
    cdef int s
    if x <= POLY_B[0]:
        s = 0
    elif x <= POLY_B[1]:
        s = 1
    elif x <= POLY_B[2]:
        s = 2
    elif x <= POLY_B[3]:
        s = 3
    else:
        s = 4
    cdef double v = ((C[4 * s] * x + C[4 * s + 1]) * x + C[4 * s + 2]) * x + C[4 * s + 3]
    return v if v > 0.0 else 0.0


def apga_step_arr(x):
    """Five-segment polynomial step map tuned for medium block lengths."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _poly_step(APGA_C4, xa[i])
    return out


def spga_step_arr(x):
    """Five-segment polynomial step map tuned for long block lengths."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _poly_step(SPGA_C4, xa[i])
    return out


# ---------------------------------------------------------------------------
# Codec

def polar_transform_arr(cnp.ndarray[cnp.uint8_t, ndim=2] bits):
    """In-place butterfly x = u * F2^(kron n) on uint8 rows of shape (B, N)."""
    cdef Py_ssize_t B = bits.shape[0]
    cdef Py_ssize_t N = bits.shape[1]
    cdef Py_ssize_t span = 1
    cdef Py_ssize_t r, base, i
    cdef cnp.uint8_t[:, ::1] v = bits
    with nogil:
        while span < N:
            for r in range(B):
                base = 0
                while base < N:
                    for i in range(base, base + span):
                        v[r, i] ^= v[r, i + span]
                    base += 2 * span
            span *= 2
    return bits


cdef inline double _f_llr(double a, double b) noexcept nogil:
    cdef double m = fabs(a)
    cdef double mb = fabs(b)
    if mb < m:
        m = mb
    if (a < 0.0) != (b < 0.0):
        m = -m
    return m + log1p(exp(-fabs(a + b))) - log1p(exp(-fabs(a - b)))


cdef void _sc_rec(const double* llr, unsigned char* u, unsigned char* x,
                  const unsigned char* frozen, Py_ssize_t length,
                  double* scratch) noexcept nogil:
    cdef Py_ssize_t half, i
    cdef double s
    if length == 1:
        if frozen[0]:
            u[0] = 0
        else:
            u[0] = 1 if llr[0] < 0.0 else 0
        x[0] = u[0]
        return
    half = length >> 1
    for i in range(half):
        scratch[i] = _f_llr(llr[i], llr[half + i])
    _sc_rec(scratch, u, x, frozen, half, scratch + half)
    for i in range(half):
        s = 1.0 - 2.0 * x[i]
        scratch[i] = llr[half + i] + s * llr[i]
    _sc_rec(scratch, u + half, x + half, frozen + half, half, scratch + half)
    for i in range(half):
        x[i] ^= x[half + i]


def sc_decode_arr(cnp.ndarray[cnp.float64_t, ndim=2] llr,
                  cnp.ndarray[cnp.uint8_t, ndim=1] frozen_mask):
    """Batch successive-cancellation decode; see the NumPy twin for the contract."""
    cdef Py_ssize_t B = llr.shape[0]
    cdef Py_ssize_t N = llr.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] uhat = np.empty((B, N), dtype=np.uint8)
    cdef cnp.float64_t[:, ::1] lv = llr
    cdef cnp.uint8_t[:, ::1] uv = uhat
    cdef cnp.uint8_t[::1] fv = frozen_mask
    cdef double* scratch = <double*> malloc(N * sizeof(double))
    cdef unsigned char* xbuf = <unsigned char*> malloc(N)
    if scratch == NULL or xbuf == NULL:
        free(scratch)
        free(xbuf)
        raise MemoryError()
    cdef Py_ssize_t r
    try:
        with nogil:
            for r in range(B):
                _sc_rec(&lv[r, 0], &uv[r, 0], xbuf, &fv[0], N, scratch)
    finally:
        free(scratch)
        free(xbuf)
    return uhat
