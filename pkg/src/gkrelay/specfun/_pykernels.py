"""Pure-Python implementations of the numerical hot loops.

This module mirrors ``_ckernels.pyx`` function for function and is used when
the compiled extension is unavailable (or when ``GKRELAY_PURE_PYTHON=1``).
Both backends implement the same algorithms, so results agree to rounding.
"""
import cmath
import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
HALF_LOG_2PI = 0.91893853320467274178

# B_{2k} / (2k (2k-1)) for k = 1..8
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_SHIFT_TO = 15.0


def _stirling(z):
    zinv = 1.0 / z
    z2 = zinv * zinv
    series = 0.0
    for coef in reversed(_STIRLING):
        series = series * z2 + coef
    return (z - 0.5) * cmath.log(z) - z + HALF_LOG_2PI + series * zinv


def loggamma(z):
    """Principal branch of log Gamma(z); ``z`` must not be a pole."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise ValueError("log-gamma pole at non-positive integer %r" % z.real)
    shift = 0.0j
    while z.real < 0.0 or abs(z) < _SHIFT_TO:
        shift += cmath.log(z)
        z += 1.0
    return _stirling(z) - shift


def loggamma_array(z):
    """Vectorized :func:`loggamma` over a 1-D complex array (no pole checks)."""
    z = np.array(z, dtype=complex)
    shift = np.zeros_like(z)
    need = (z.real < 0.0) | (np.abs(z) < _SHIFT_TO)
    while need.any():
        shift[need] += np.log(z[need])
        z[need] += 1.0
        need = (z.real < 0.0) | (np.abs(z) < _SHIFT_TO)
    zinv = 1.0 / z
    z2 = zinv * zinv
    series = np.zeros_like(z)
    for coef in reversed(_STIRLING):
        series = series * z2 + coef
    return (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + series * zinv - shift


def expint_e1(x):
    """Exponential integral E1(x) for x > 0."""
    if x <= 1.0:
        total = 0.0
        term = 1.0
        k = 1
        while True:
            term *= -x / k
            contrib = -term / k
            total += contrib
            if abs(contrib) < 1e-17 * abs(total):
                break
            k += 1
        return total - EULER_GAMMA - math.log(x)
    # modified Lentz continued fraction
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


def bessel_k(nu, x):
    """K_nu(x) from the trapezoid rule on int_0^inf exp(-x cosh t) cosh(nu t) dt."""
    nu = abs(nu)
    h = min(0.05, 0.5 / math.sqrt(x))
    # integrand scaled by exp(x) to postpone underflow
    total = 0.5
    peak = 0.0
    k = 1
    while True:
        t = k * h
        expo = -x * (math.cosh(t) - 1.0) + nu * t
        if expo > peak:
            peak = expo
        term = math.exp(expo) * 0.5 * (1.0 + math.exp(-2.0 * nu * t))
        total += term
        if expo < peak - 41.0 and t > 1.0:
            break
        k += 1
    return h * total * math.exp(-x)


def _exp_sinh_log_integrand(u, a, b, x):
    lnt = 0.5 * math.pi * math.sinh(u)
    if lnt > 700.0:
        return -math.inf
    t = math.exp(lnt)
    return (-x * t + a * lnt + (b - a - 1.0) * math.log1p(t)
            + math.log(0.5 * math.pi * math.cosh(u)))


def hyperu_integral(a, b, x, tol=1e-15):
    """Gamma(a) * U(a, b, x) for a > 0, x > 0 by exp-sinh quadrature.

    Returns ``(log_scale, value)`` with Gamma(a) U = value * exp(log_scale).
    """
    # locate the peak on a coarse grid
    step = 0.125
    grid = [i * step for i in range(-72, 73)]
    vals = [_exp_sinh_log_integrand(u, a, b, x) for u in grid]
    peak = max(vals)
    prev = None
    h = step
    while True:
        n = int(round(9.0 / h))
        total = 0.0
        for i in range(-n, n + 1):
            lv = _exp_sinh_log_integrand(i * h, a, b, x)
            if lv > peak - 45.0:
                total += math.exp(lv - peak)
        total *= h
        if prev is not None and abs(total - prev) <= tol * abs(total):
            return peak, total
        if h < 1e-4:
            return peak, total
        prev = total
        h *= 0.5


def hyperu_asymptotic(a, b, x, tol=1e-16, max_terms=60):
    """x^a U(a, b, x) from the large-x asymptotic series.

    Returns ``(sum, terms)``; ``terms`` is negative when the terms started
    to grow before reaching ``tol`` (the argument is too small).
    """
    term = 1.0
    total = 1.0
    c = a - b + 1.0
    for n in range(max_terms):
        nxt = -term * (a + n) * (c + n) / ((n + 1.0) * x)
        if abs(nxt) > abs(term):
            return total, -(n + 1)
        term = nxt
        total += term
        if abs(term) <= tol * abs(total):
            return total, n + 2
    return total, -max_terms


def hyp_series(up, lo, z, tol, max_terms):
    """Sum of the generalized hypergeometric series pFq(up; lo; z).

    Returns ``(sum, abs_sum, terms)``; ``terms`` is negative when the series did
    not settle within ``max_terms`` terms.
    """
    term = 1.0
    total = 0.0
    abs_total = 0.0
    small = 0
    for k in range(max_terms):
        total += term
        abs_total += abs(term)
        if term == 0.0:
            return total, abs_total, k + 1
        ratio = z / (k + 1.0)
        for u in up:
            ratio *= k + u
        for v in lo:
            ratio /= k + v
        term *= ratio
        if not math.isfinite(abs_total) or not math.isfinite(term):
            return total, abs_total, -(k + 1)
        if abs(term) <= tol * abs(total) and abs(ratio) < 1.0:
            small += 1
            if small >= 3:
                return total, abs_total, k + 2
        else:
            small = 0
    return total, abs_total, -max_terms


def mb_sum(log_phi, tau, logz, first_weight=1.0):
    """Sums of Re[exp(log_phi) z^(-i tau)] over grid points, one per ``logz``.

    ``first_weight`` scales the first grid point (0.5 for the tau = 0 end of a
    trapezoid rule).
    """
    log_phi = np.asarray(log_phi, dtype=complex)
    tau = np.asarray(tau, dtype=float)
    logz = np.atleast_1d(np.asarray(logz, dtype=float))
    weights = np.ones_like(tau)
    if weights.size:
        weights[0] = first_weight
    phase = np.exp(log_phi[None, :] - 1j * np.outer(logz, tau))
    return (phase.real * weights).sum(axis=1)
