"""End-to-end ergodic capacity of the dual-hop AF link.

The capacity splits as

    C = 1/2 E[log2(1 + g1 g2 / (g1 + g2 + 1))]
      = 1/2 (C1 + C2 - C12),

with C_l = E[log2(1 + g_l)] and C12 = E[log2(1 + g1 + g2)].  The per-hop
terms have Meijer-G closed forms.  The cross term uses the identity

    E[ln(1 + X)] = int_0^inf Ei(-s) M_X'(s) ds,

which for X = g1 + g2 only needs the hop MGFs (M_X = M1 M2), evaluated by
the mapped Gauss-Chebyshev rule of :func:`gkrelay.specfun.gc_nodes_weights`.

All components are reported in bits (log2) before the factor 1/2.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import (GKLink, HopChannels, Regime, SystemParams, hop_mgf,
                      hop_mgf_derivative)
from .errors import NonConvergenceError, ParameterError
from .specfun import MeijerGSpec, exp_integral_ei_array, gc_nodes_weights, meijer_g

__all__ = [
    "Scenario", "CapacityResult", "capacity_single_hop", "capacity_single_hop_pmax",
    "capacity_cross_term", "cross_term_integrand", "ergodic_capacity",
    "pmax_distance_threshold", "resolve_regimes", "capacity_for_orders",
    "convergence_study", "capacity_cross_term_log_panels", "CROSS_TERM_METHODS",
    "DEFAULT_QUADRATURE_ORDER",
]

DEFAULT_QUADRATURE_ORDER = 60
LN2 = math.log(2.0)
CROSS_TERM_METHODS = ("gauss_chebyshev", "log_panels")


def _as_regimes(regime):
    if isinstance(regime, (str, Regime)):
        regime = (regime, regime)
    regime = tuple(Regime(r) for r in regime)
    if len(regime) != 2:
        raise ParameterError("regime", "expected one regime per hop")
    return regime


@dataclass(frozen=True)
class Scenario:
    """Two hops, the power constraints and how to evaluate the capacity.

    ``regime`` is either a single :class:`Regime` applied to both hops or a
    pair.  ``Regime.AUTO`` picks the power-capped form for a hop whose
    interference link is longer than :func:`pmax_distance_threshold`.

    ``cross_term`` selects how C12 is integrated: ``"gauss_chebyshev"`` (the
    N-point rule, N = ``quadrature_order``) or ``"log_panels"`` (see
    :func:`capacity_cross_term_log_panels`), which stays accurate when the
    hop SNRs are large.
    """

    hop1: HopChannels
    hop2: HopChannels
    sys: SystemParams
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER
    regime: tuple = (Regime.AUTO, Regime.AUTO)
    cross_term: str = "gauss_chebyshev"

    def __post_init__(self):
        object.__setattr__(self, "regime", _as_regimes(self.regime))
        if self.cross_term not in CROSS_TERM_METHODS:
            raise ParameterError("cross_term", "must be one of %s, got %r"
                                 % (", ".join(CROSS_TERM_METHODS), self.cross_term))
        n = self.quadrature_order
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise ParameterError("quadrature_order", "must be a positive integer, got %r" % (n,))
        object.__setattr__(self, "quadrature_order", int(n))

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class CapacityResult:
    """Capacity in bits/s/Hz and its pre-halving components."""

    total: float
    c1: float
    c2: float
    c12: float
    n_used: int
    regime_used: tuple = field(default=(Regime.INTERFERENCE, Regime.INTERFERENCE))


def pmax_distance_threshold(sys, alpha):
    """Interference-link distance beyond which the power cap binds.

    Averaging out the fading, w / Omega_j > P_max  <=>  d_j > (P_max / w)^(1/alpha).
    """
    alpha = float(alpha)
    if not 2.0 <= alpha <= 6.0:
        raise ParameterError("alpha", "path-loss exponent must lie in [2, 6], got %g" % alpha)
    return (sys.pmax_over_n0 / sys.w_over_n0) ** (1.0 / alpha)


def _resolve(hop, sys, regime):
    if regime is not Regime.AUTO:
        return regime
    j = hop.interference
    if j.d > pmax_distance_threshold(sys, j.alpha):
        return Regime.PMAX
    return Regime.INTERFERENCE


def resolve_regimes(scn):
    """Per-hop regimes with ``AUTO`` replaced by the distance rule."""
    return (_resolve(scn.hop1, scn.sys, scn.regime[0]),
            _resolve(scn.hop2, scn.sys, scn.regime[1]))


def capacity_single_hop(hop, sys):
    """E[log2(1 + g)] for an interference-limited hop, in bits.

    C = beta^Delta G^{4,3}_{4,4}(beta | 1-Delta-k_j, 1-Delta-m_j, -Delta, 1-Delta;
        Theta, -Theta, -Delta, -Delta) / (Gamma(k_i) Gamma(m_i) Gamma(k_j) Gamma(m_j) ln 2)

    with beta = k_i m_i Omega_j / (k_j m_j Omega_i w/N0).  Dividing by ln 4
    instead of ln 2 gives the halved contribution to the end-to-end capacity.
    """
    i, j = hop.data, hop.interference
    beta = (i.k * i.m * j.omega) / (j.k * j.m * i.omega * sys.w_over_n0)
    d, t = i.delta, i.theta
    spec = MeijerGSpec(4, 3, 4, 4, (1.0 - d - j.k, 1.0 - d - j.m, -d, 1.0 - d),
                       (t, -t, -d, -d))
    log_pre = d * math.log(beta) - i.log_gamma_product() - j.log_gamma_product()
    return math.exp(log_pre) * meijer_g(spec, beta) / LN2


def capacity_single_hop_pmax(link, sys):
    """E[log2(1 + (P_max/N0)|h|^2)] for the data link of a power-capped hop.

    C = b^Delta G^{4,1}_{2,4}(b | -Delta, 1-Delta; Theta, -Theta, -Delta, -Delta)
        / (Gamma(k) Gamma(m) ln 2),   b = k m / (Omega P_max/N0).
    """
    b = link.k * link.m / (link.omega * sys.pmax_over_n0)
    d, t = link.delta, link.theta
    spec = MeijerGSpec(4, 1, 2, 4, (-d, 1.0 - d), (t, -t, -d, -d))
    log_pre = d * math.log(b) - link.log_gamma_product()
    return math.exp(log_pre) * meijer_g(spec, b) / LN2


def _hop_capacity(hop, sys, regime):
    if regime is Regime.PMAX:
        return capacity_single_hop_pmax(hop.data, sys)
    return capacity_single_hop(hop, sys)


def cross_term_integrand(hop1, hop2, sys, s, regimes=(Regime.INTERFERENCE, Regime.INTERFERENCE)):
    """Ei(-s) d/ds[M1(s) M2(s)] / ln 2; its integral over (0, inf) is C12."""
    s = np.asarray(s, dtype=float)
    m1 = hop_mgf(hop1, sys, regimes[0], s)
    m2 = hop_mgf(hop2, sys, regimes[1], s)
    d1 = hop_mgf_derivative(hop1, sys, regimes[0], s)
    d2 = hop_mgf_derivative(hop2, sys, regimes[1], s)
    return exp_integral_ei_array(-s) * (m1 * d2 + m2 * d1) / LN2


def capacity_cross_term(hop1, hop2, sys, N=DEFAULT_QUADRATURE_ORDER,
                        regimes=(Regime.INTERFERENCE, Regime.INTERFERENCE)):
    """C12 = E[log2(1 + g1 + g2)] by N-point Gauss-Chebyshev quadrature.

    C12 ~= (1/ln 2) sum_v psi_v Ei(-s_v) (M1(s_v) M2'(s_v) + M2(s_v) M1'(s_v)).

    Both factors of each summand are negative, so the result is positive.
    """
    rule = gc_nodes_weights(N)
    regimes = _as_regimes(regimes)
    if Regime.AUTO in regimes:
        raise ValueError("regimes must be resolved; see resolve_regimes")
    return rule.integrate(cross_term_integrand(hop1, hop2, sys, rule.nodes, regimes))


def capacity_cross_term_log_panels(hop1, hop2, sys,
                                   regimes=(Regime.INTERFERENCE, Regime.INTERFERENCE),
                                   rtol=1e-9, panel_points=24):
    """C12 by composite Gauss-Legendre quadrature in u = ln s.

    The integrand varies on the scale s ~ 1/E[g], which for strong hops lies
    far below the smallest Gauss-Chebyshev node.  Unit-width panels in
    ln s cover s in [e^-46, e^4] uniformly on a log scale; the result is
    accepted when doubling the points per panel changes it by less than
    ``rtol`` (relative) and raises :class:`NonConvergenceError` otherwise.
    """
    regimes = _as_regimes(regimes)
    if Regime.AUTO in regimes:
        raise ValueError("regimes must be resolved; see resolve_regimes")
    edges = np.arange(-46.0, 4.5, 1.0)
    estimates = []
    for n in (panel_points, 2 * panel_points):
        x, w = np.polynomial.legendre.leggauss(n)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        half = 0.5 * np.diff(edges)[:, None]
        u = (mid + half * x).ravel()
        weights = (half * w).ravel()
        s = np.exp(u)
        values = cross_term_integrand(hop1, hop2, sys, s, regimes)
        estimates.append(float(np.dot(weights, values * s)))
    coarse, fine = estimates
    if abs(fine - coarse) > rtol * abs(fine) + 1e-15:
        raise NonConvergenceError("log-panel quadrature of the cross term did not settle "
                                  "(%.3g vs %.3g)" % (coarse, fine),
                                  terms=2 * panel_points, operation="capacity_cross_term")
    return fine


def ergodic_capacity(scn):
    """Closed-form end-to-end capacity of a scenario.

    Returns
    -------
    CapacityResult
        ``total = (c1 + c2 - c12) / 2`` in bits/s/Hz.
    """
    regimes = resolve_regimes(scn)
    c1 = _hop_capacity(scn.hop1, scn.sys, regimes[0])
    c2 = _hop_capacity(scn.hop2, scn.sys, regimes[1])
    if scn.cross_term == "log_panels":
        c12 = capacity_cross_term_log_panels(scn.hop1, scn.hop2, scn.sys, regimes)
    else:
        c12 = capacity_cross_term(scn.hop1, scn.hop2, scn.sys, scn.quadrature_order,
                                  regimes)
    return CapacityResult(0.5 * (c1 + c2 - c12), c1, c2, c12,
                          scn.quadrature_order, regimes)


def capacity_for_orders(scn, orders):
    """Total capacity for several quadrature orders at once.

    The nodes of all orders are evaluated in a single batch, which keeps a
    sweep over N = 1..200 cheap.
    """
    orders = [int(n) for n in orders]
    regimes = resolve_regimes(scn)
    c1 = _hop_capacity(scn.hop1, scn.sys, regimes[0])
    c2 = _hop_capacity(scn.hop2, scn.sys, regimes[1])
    rules = [gc_nodes_weights(n) for n in orders]
    nodes = np.concatenate([r.nodes for r in rules])
    integrand = cross_term_integrand(scn.hop1, scn.hop2, scn.sys, nodes, regimes)
    out = []
    start = 0
    for rule in rules:
        c12 = rule.integrate(integrand[start:start + rule.N])
        start += rule.N
        out.append(0.5 * (c1 + c2 - c12))
    return np.array(out)


def convergence_study(scn, max_n=200, tol=1e-4, reference_n=200):
    """Smallest quadrature order N with |C(N) - C(reference_n)| < tol.

    Raises
    ------
    NonConvergenceError
        If no N <= max_n meets the tolerance.
    """
    if max_n < 1:
        raise ParameterError("max_n", "must be >= 1")
    orders = list(range(1, max_n + 1))
    if reference_n not in orders:
        orders.append(reference_n)
    values = capacity_for_orders(scn, orders)
    reference = values[orders.index(reference_n)]
    for n, value in zip(orders[:max_n], values[:max_n]):
        if abs(value - reference) < tol:
            return n
    raise NonConvergenceError("capacity did not settle within %g of its N=%d value "
                              "for any N <= %d" % (tol, reference_n, max_n),
                              terms=max_n, operation="convergence_study")


def table1_scenario(d_j, w_db, pmax_db=20.0):
    """The symmetric scenario behind the quadrature-convergence table."""
    data = GKLink(k=1.0, m=1.0, d=0.5, alpha=4.0)
    interference = GKLink(k=4.0, m=3.0, d=d_j, alpha=4.0)
    hop = HopChannels(data, interference)
    return Scenario(hop, hop, SystemParams.from_db(w_db, pmax_db))
