"""Scalar special functions and the Gauss-Chebyshev rule."""
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ._backend import kernels


def log_gamma_complex(z):
    """Principal branch of log Gamma(z) for complex ``z``.

    Raises
    ------
    DomainError
        If ``z`` is a non-positive integer (a pole of Gamma).
    """
    try:
        return kernels.loggamma(complex(z))
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def exp_integral_ei(x):
    """Exponential integral Ei(x) on the negative real axis.

    Ei(x) = -E1(-x); the capacity integrand only ever needs x < 0.
    """
    x = float(x)
    if not x < 0.0:
        raise DomainError("Ei is only implemented for x < 0, got %r" % x)
    return -kernels.expint_e1(-x)


def exp_integral_ei_array(x):
    x = np.asarray(x, dtype=float)
    if np.any(x >= 0.0):
        raise DomainError("Ei is only implemented for x < 0")
    out = np.empty_like(x)
    flat = out.reshape(-1)
    for i, xi in enumerate(x.reshape(-1)):
        flat[i] = -kernels.expint_e1(-xi)
    return out


def bessel_k(nu, x):
    """Modified Bessel function of the second kind, K_nu(x), for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError("bessel_k requires x > 0, got %r" % x)
    return kernels.bessel_k(float(nu), x)


# below this argument the asymptotic series cannot reach full precision
_HYPERU_ASYMPTOTIC_X = 30.0


def _hyperu_positive(a, b, x):
    if x >= _HYPERU_ASYMPTOTIC_X:
        total, terms = kernels.hyperu_asymptotic(a, b, x)
        if terms > 0:
            return math.exp(-a * math.log(x)) * total
    log_scale, value = kernels.hyperu_integral(a, b, x)
    return math.exp(log_scale - math.lgamma(a)) * value


def hyperu(a, b, x):
    """Tricomi confluent hypergeometric function U(a, b, x) for x > 0.

    Uses the Laplace-type integral for a > 0 and the three-term recurrence
    in ``a`` below that.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError("hyperu requires x > 0, got %r" % x)
    if a > 0.0:
        return _hyperu_positive(a, b, x)
    if a == math.floor(a):
        # polynomial case; start the recurrence from U(0) = 1, U(1)
        steps = int(-a)
        upper, lower = _hyperu_positive(1.0, b, x), 1.0
        ai = 0.0
    else:
        steps = int(math.ceil(-a)) + 1
        ai = a + steps
        upper = _hyperu_positive(ai + 1.0, b, x)
        lower = _hyperu_positive(ai, b, x)
    # U(a-1) = (2a - b + x) U(a) - a (a - b + 1) U(a+1)
    for _ in range(steps):
        lower, upper = (2.0 * ai - b + x) * lower - ai * (ai - b + 1.0) * upper, lower
        ai -= 1.0
    return lower


def whittaker_w_scaled(kappa, mu, x):
    """exp(x/2) * W_{kappa,mu}(x), which stays finite for large ``x``."""
    mu = abs(mu)
    return x ** (mu + 0.5) * hyperu(0.5 + mu - kappa, 1.0 + 2.0 * mu, x)


def whittaker_w(kappa, mu, x):
    """Whittaker function W_{kappa,mu}(x) for real parameters and x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError("whittaker_w requires x > 0, got %r" % x)
    return math.exp(-0.5 * x) * whittaker_w_scaled(kappa, mu, x)


@dataclass(frozen=True)
class GCQuadrature:
    """Nodes and weights of the mapped Gauss-Chebyshev rule on (0, inf)."""

    N: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values):
        return float(np.dot(self.weights, values))


def gc_nodes_weights(N):
    """Gauss-Chebyshev rule for integrals over (0, inf).

    The Chebyshev nodes t_v = cos((2v-1) pi / 2N) are mapped through
    s = tan(pi/4 t + pi/4); the weights absorb the Jacobian and the
    sqrt(1 - t^2) factor, so sum(weights * g(nodes)) approximates the
    integral of g over (0, inf).
    """
    N = int(N)
    if N < 1:
        raise DomainError("quadrature order must be >= 1, got %d" % N)
    theta = (2.0 * np.arange(1, N + 1) - 1.0) * np.pi / (2.0 * N)
    arg = 0.25 * np.pi * np.cos(theta) + 0.25 * np.pi
    nodes = np.tan(arg)
    weights = np.pi ** 2 * np.sin(theta) / (4.0 * N * np.cos(arg) ** 2)
    return GCQuadrature(N, nodes, weights)
