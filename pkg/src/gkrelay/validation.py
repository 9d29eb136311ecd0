"""Self-checks run by ``gkrelay validate``.

Each check compares a closed form with something computed a different way:
a special-function identity, a quadrature of the density, a finite
difference, or a Monte Carlo estimate.  Only numpy is required, so the
checks can run on an installation without the test dependencies.
"""
import math
from dataclasses import dataclass

import numpy as np

from .capacity import (capacity_single_hop, capacity_single_hop_pmax, ergodic_capacity,
                       pmax_distance_threshold, table1_scenario)
from .channel import (GKLink, SystemParams, gk_power_pdf, snr_mgf,
                      snr_mgf_derivative, snr_mgf_derivative_pmax, snr_mgf_pmax,
                      snr_ratio_pdf)
from .montecarlo import MCConfig, estimate_capacity
from .specfun import (EvalOptions, MeijerGSpec, bessel_k, gc_nodes_weights, meijer_g,
                      whittaker_w)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _log_quad(f, lo=-40.0, hi=40.0, points=32):
    """int_0^inf f(x) dx by Gauss-Legendre panels in ln x (f vectorized).

    The wide range in ln x is needed for the polynomial tails of the SNR ratio.
    """
    x, w = np.polynomial.legendre.leggauss(points)
    edges = np.arange(lo, hi + 0.5, 0.5)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.25
    u = (mid + half * x).ravel()
    t = np.exp(u)
    return float(np.dot(np.tile(w, len(edges) - 1) * half, f(t) * t))


def _rel(a, b):
    return abs(a - b) / abs(b)


def _check(name, err, tol):
    return Check(name, bool(err < tol), "error %.2e (tolerance %.0e)" % (err, tol))


def run_checks(samples=1_000_000, seed=1):
    checks = []
    # kernel identities
    err = 0.0
    for b, z in ((0.5, 1.0), (0.3, 0.02), (1.7, 30.0)):
        g = meijer_g(MeijerGSpec(2, 0, 0, 2, (), (b, -b)), z)
        err = max(err, _rel(g, 2.0 * bessel_k(2.0 * b, 2.0 * math.sqrt(z))))
    checks.append(_check("Meijer-G vs Bessel-K identity", err, 1e-10))
    err = max(_rel(whittaker_w(1.0, 0.5, 2.0), 2.0 * math.exp(-1.0)),
              _rel(whittaker_w(0.0, 0.7, 3.0), math.sqrt(3.0 / math.pi) * bessel_k(0.7, 1.5)))
    checks.append(_check("Whittaker-W identities", err, 1e-9))
    spec = MeijerGSpec(4, 1, 2, 4, (-1.37, -0.37), (0.41, -0.41, -1.37, -1.37 + 0.31))
    a = meijer_g(spec, 0.8, EvalOptions(strategy="residue_series"))
    b = meijer_g(spec, 0.8, EvalOptions(strategy="contour_integration"))
    checks.append(_check("residue series vs contour integral", _rel(a, b), 1e-8))
    rule = gc_nodes_weights(1)
    checks.append(_check("Gauss-Chebyshev N=1 weight", _rel(rule.weights[0], math.pi ** 2 / 2), 1e-15))

    # channel statistics
    scn = table1_scenario(0.3, 10.0)
    hop, sys_ = scn.hop1, scn.sys
    checks.append(_check("hop SNR density normalization",
                         abs(_log_quad(lambda x: snr_ratio_pdf(hop, sys_, x)) - 1.0), 1e-6))
    link = GKLink(2.0, 1.5, 0.9)
    checks.append(_check("link power density normalization",
                         abs(_log_quad(lambda x: gk_power_pdf(link, x)) - 1.0), 1e-8))
    s = 1.0
    quad = _log_quad(lambda x: np.exp(-s * x) * snr_ratio_pdf(hop, sys_, x))
    checks.append(_check("MGF vs quadrature of the density", _rel(snr_mgf(hop, sys_, s), quad), 1e-7))
    h = 1e-5
    fd = (snr_mgf(hop, sys_, s + h) - snr_mgf(hop, sys_, s - h)) / (2 * h)
    checks.append(_check("MGF derivative vs finite difference",
                         _rel(snr_mgf_derivative(hop, sys_, s), fd), 1e-5))
    capped = SystemParams(1.0, 100.0)
    fd = (snr_mgf_pmax(link, capped, s + h) - snr_mgf_pmax(link, capped, s - h)) / (2 * h)
    checks.append(_check("capped MGF derivative vs finite difference",
                         _rel(snr_mgf_derivative_pmax(link, capped, s), fd), 1e-5))

    # capacity
    quad = _log_quad(lambda x: np.log2(1 + x) * snr_ratio_pdf(hop, sys_, x))
    checks.append(_check("single-hop capacity vs quadrature",
                         _rel(capacity_single_hop(hop, sys_), quad), 1e-6))
    quad = _log_quad(lambda x: np.log2(1 + capped.pmax_over_n0 * x) * gk_power_pdf(link, x))
    checks.append(_check("capped single-hop capacity vs quadrature",
                         _rel(capacity_single_hop_pmax(link, capped), quad), 1e-6))
    thr = pmax_distance_threshold(SystemParams.from_db(-3.0, 0.0), 4.0)
    checks.append(_check("distance threshold (0 dB / -3 dB, alpha 4)", abs(thr - 1.19), 5e-3))
    accurate = scn.with_(cross_term="log_panels")
    closed = ergodic_capacity(accurate).total
    mc = estimate_capacity(accurate, MCConfig(n_samples=samples, seed=seed))
    z = abs(closed - mc.mean) / mc.std_error
    checks.append(Check("capacity vs Monte Carlo", bool(z < 4.0),
                        "%.6f vs %.6f +/- %.1e (%.1f std errors)"
                        % (closed, mc.mean, mc.std_error, z)))
    return checks
