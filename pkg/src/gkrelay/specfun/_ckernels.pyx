# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numerical hot loops (see ``_pykernels``)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport (cos, sin, exp, log, log1p, sqrt, fabs, floor, cosh,
                        sinh, isfinite, INFINITY, M_PI)

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double HALF_LOG_2PI = 0.91893853320467274178
cdef double SHIFT_TO = 15.0
cdef double[8] STIRLING = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
]


cdef inline double complex _loggamma(double complex z) nogil:
    cdef double complex shift = 0.0
    cdef double complex zinv, z2, series
    cdef int k
    while creal(z) < 0.0 or cabs(z) < SHIFT_TO:
        shift = shift + clog(z)
        z = z + 1.0
    zinv = 1.0 / z
    z2 = zinv * zinv
    series = 0.0
    for k in range(7, -1, -1):
        series = series * z2 + STIRLING[k]
    return (z - 0.5) * clog(z) - z + HALF_LOG_2PI + series * zinv - shift


def loggamma(z):
    """Principal branch of log Gamma(z); ``z`` must not be a pole."""
    cdef double complex zz = complex(z)
    if cimag(zz) == 0.0 and creal(zz) <= 0.0 and creal(zz) == floor(creal(zz)):
        raise ValueError("log-gamma pole at non-positive integer %r" % creal(zz))
    return _loggamma(zz)


def loggamma_array(z):
    """Vectorized :func:`loggamma` over a 1-D complex array (no pole checks)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=complex).ravel()
    cdef Py_ssize_t i, n = zz.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=complex)
    with nogil:
        for i in range(n):
            out[i] = _loggamma(zz[i])
    return out


def expint_e1(double x):
    """Exponential integral E1(x) for x > 0."""
    cdef double total, term, contrib, b, c, d, h, an, delta
    cdef int k, i
    if x <= 1.0:
        total = 0.0
        term = 1.0
        k = 1
        while True:
            term *= -x / k
            contrib = -term / k
            total += contrib
            if fabs(contrib) < 1e-17 * fabs(total):
                break
            k += 1
        return total - EULER_GAMMA - log(x)
    b = x + 1.0
    c = 1.0 / 1e-300
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -(<double>i) * i
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if fabs(delta - 1.0) < 1e-16:
            break
    return h * exp(-x)


def bessel_k(double nu, double x):
    """K_nu(x) from the trapezoid rule on int_0^inf exp(-x cosh t) cosh(nu t) dt."""
    cdef double h, total, peak, t, expo
    cdef long k
    nu = fabs(nu)
    h = 0.05
    if 0.5 / sqrt(x) < h:
        h = 0.5 / sqrt(x)
    total = 0.5
    peak = 0.0
    k = 1
    while True:
        t = k * h
        expo = -x * (cosh(t) - 1.0) + nu * t
        if expo > peak:
            peak = expo
        total += exp(expo) * 0.5 * (1.0 + exp(-2.0 * nu * t))
        if expo < peak - 41.0 and t > 1.0:
            break
        k += 1
    return h * total * exp(-x)


cdef inline double _exp_sinh_log_integrand(double u, double a, double b, double x) nogil:
    cdef double lnt = 0.5 * M_PI * sinh(u)
    cdef double t
    if lnt > 700.0:
        return -INFINITY
    t = exp(lnt)
    return (-x * t + a * lnt + (b - a - 1.0) * log1p(t)
            + log(0.5 * M_PI * cosh(u)))


def hyperu_integral(double a, double b, double x, double tol=1e-15):
    """Gamma(a) * U(a, b, x) for a > 0, x > 0 by exp-sinh quadrature.

    Returns ``(log_scale, value)`` with Gamma(a) U = value * exp(log_scale).
    """
    cdef double step = 0.125, peak = -INFINITY, lv, h, total, prev = 0.0
    cdef int i, n, first = 1
    for i in range(-72, 73):
        lv = _exp_sinh_log_integrand(i * step, a, b, x)
        if lv > peak:
            peak = lv
    h = step
    while True:
        n = <int>(9.0 / h + 0.5)
        total = 0.0
        for i in range(-n, n + 1):
            lv = _exp_sinh_log_integrand(i * h, a, b, x)
            if lv > peak - 45.0:
                total += exp(lv - peak)
        total *= h
        if not first and fabs(total - prev) <= tol * fabs(total):
            return peak, total
        if h < 1e-4:
            return peak, total
        first = 0
        prev = total
        h *= 0.5


def hyperu_asymptotic(double a, double b, double x, double tol=1e-16, int max_terms=60):
    """x^a U(a, b, x) from the large-x asymptotic series (see ``_pykernels``)."""
    cdef double term = 1.0, total = 1.0, nxt, c = a - b + 1.0
    cdef int n
    for n in range(max_terms):
        nxt = -term * (a + n) * (c + n) / ((n + 1.0) * x)
        if fabs(nxt) > fabs(term):
            return total, -(n + 1)
        term = nxt
        total += term
        if fabs(term) <= tol * fabs(total):
            return total, n + 2
    return total, -max_terms


def hyp_series(up, lo, double z, double tol, long max_terms):
    """Sum of the generalized hypergeometric series pFq(up; lo; z).

    Returns ``(sum, abs_sum, terms)``; ``terms`` is negative when the series did
    not settle within ``max_terms`` terms.
    """
    cdef double[::1] u = np.ascontiguousarray(up, dtype=float)
    cdef double[::1] v = np.ascontiguousarray(lo, dtype=float)
    cdef Py_ssize_t nu = u.shape[0], nv = v.shape[0], j
    cdef double term = 1.0, total = 0.0, abs_total = 0.0, ratio
    cdef long k, small = 0
    for k in range(max_terms):
        total += term
        abs_total += fabs(term)
        if term == 0.0:
            return total, abs_total, k + 1
        ratio = z / (k + 1.0)
        for j in range(nu):
            ratio *= k + u[j]
        for j in range(nv):
            ratio /= k + v[j]
        term *= ratio
        if not isfinite(abs_total) or not isfinite(term):
            return total, abs_total, -(k + 1)
        if fabs(term) <= tol * fabs(total) and fabs(ratio) < 1.0:
            small += 1
            if small >= 3:
                return total, abs_total, k + 2
        else:
            small = 0
    return total, abs_total, -max_terms


def mb_sum(log_phi, tau, logz, double first_weight=1.0):
    """Sums of Re[exp(log_phi) z^(-i tau)] over grid points, one per ``logz``.

    ``first_weight`` scales the first grid point (0.5 for the tau = 0 end of a
    trapezoid rule).
    """
    cdef double complex[::1] lp = np.ascontiguousarray(log_phi, dtype=complex)
    cdef double[::1] t = np.ascontiguousarray(tau, dtype=float)
    cdef double[::1] lz = np.ascontiguousarray(np.atleast_1d(logz), dtype=float)
    cdef Py_ssize_t nk = t.shape[0], nz = lz.shape[0], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nz)
    cdef double[::1] mag = np.empty(nk)
    cdef double[::1] arg = np.empty(nk)
    cdef double acc, ph
    for k in range(nk):
        mag[k] = exp(creal(lp[k]))
        arg[k] = cimag(lp[k])
    if nk > 0:
        mag[0] *= first_weight
    with nogil:
        for i in range(nz):
            acc = 0.0
            for k in range(nk):
                ph = arg[k] - t[k] * lz[i]
                acc += mag[k] * cos(ph)
            out[i] = acc
    return out
