import math

import numpy as np
import pytest
from scipy import integrate

from gkrelay.capacity import Scenario, cross_term_integrand, resolve_regimes, table1_scenario
from gkrelay.channel import GKLink, HopChannels, SystemParams, snr_ratio_pdf
from gkrelay.specfun import MeijerGSpec


def log_quad(f, lo=-40.0, hi=40.0):
    """Integral over (0, inf) via adaptive quadrature in u = ln x."""
    val, _ = integrate.quad(lambda u: f(np.exp(u)) * np.exp(u), lo, hi,
                            limit=500, epsabs=0.0, epsrel=1e-12)
    return val


def central_difference(f, x, rel_step=1e-6):
    h = rel_step * x
    return (f(x + h) - f(x - h)) / (2.0 * h)


def chi_square(hop, sys_, samples, bins):
    """Pearson statistic over cells cut at sample quantiles, and its degrees of freedom."""
    edges = np.quantile(samples, np.linspace(0.0, 1.0, bins + 1)[1:-1])
    observed = np.bincount(np.searchsorted(edges, samples), minlength=bins)
    inner = [log_quad(lambda t: snr_ratio_pdf(hop, sys_, t), math.log(lo), math.log(hi))
             for lo, hi in zip(edges[:-1], edges[1:])]
    first = log_quad(lambda t: snr_ratio_pdf(hop, sys_, t), -60, math.log(edges[0]))
    probs = np.array([first] + inner + [1.0 - first - sum(inner)])
    expected = probs * samples.size
    # the density is fully specified, so cells cut at sample quantiles still
    # leave an asymptotic chi-square(bins - 1) reference distribution
    return float(np.sum((observed - expected) ** 2 / expected)), bins - 1


def adaptive_cross_term(scn):
    """C12 by adaptive quadrature of the same integrand in u = ln s."""
    regimes = resolve_regimes(scn)

    def f(u):
        s = np.array([math.exp(u)])
        return float(cross_term_integrand(scn.hop1, scn.hop2, scn.sys, s, regimes)[0]) * s[0]

    value, _ = integrate.quad(f, -60.0, 8.0, limit=1000, epsabs=1e-13, epsrel=1e-11)
    return value


def fig3_scenario(d, primary=(0.3, 0.7), cross_term="log_panels"):
    def hop(data_d, primary_d):
        return HopChannels(GKLink(2.0, 1.0, data_d), GKLink(2.0, 1.0, primary_d))
    return Scenario(hop(d, primary[0]), hop(1.0 - d, primary[1]), SystemParams.from_db(10.0, 20.0),
                    cross_term=cross_term)


def model_classes(ki, mi, kj, mj):
    """One instance of every G-function class used by the capacity formulas."""
    d, t = 0.5 * (ki + mi), 0.5 * (ki - mi)
    return [
        MeijerGSpec(2, 0, 0, 2, (), (t, -t)),
        MeijerGSpec(2, 2, 2, 2, (1 - d - kj, 1 - d - mj), (t, -t)),
        MeijerGSpec(2, 3, 3, 2, (1 - d, 1 - d - kj, 1 - d - mj), (t, -t)),
        MeijerGSpec(4, 3, 4, 4, (1 - d - kj, 1 - d - mj, -d, 1 - d), (t, -t, -d, -d)),
        MeijerGSpec(4, 1, 2, 4, (-d, 1 - d), (t, -t, -d, -d)),
    ]


@pytest.fixture
def table1_hop():
    scn = table1_scenario(0.3, 0.0)
    return scn.hop1, scn.sys


@pytest.fixture
def unit_link():
    # Omega = 1 at d = 1
    return GKLink(1.0, 1.0, 1.0)


ASYMMETRIC_HOPS = [
    HopChannels(GKLink(1.0, 1.0, 0.5), GKLink(4.0, 3.0, 0.05)),
    HopChannels(GKLink(2.0, 1.0, 0.8), GKLink(1.3, 0.7, 0.4)),
    HopChannels(GKLink(3.5, 2.2, 0.6), GKLink(0.8, 1.5, 0.9)),
    HopChannels(GKLink(0.7, 4.0, 1.1), GKLink(2.6, 1.1, 0.7)),
    HopChannels(GKLink(5.0, 0.9, 0.3), GKLink(1.7, 2.4, 0.2)),
]

ASYMMETRIC_SYS = [
    SystemParams(1.0, 100.0),
    SystemParams(3.0, 100.0),
    SystemParams(0.5, 100.0),
    SystemParams(10.0, 100.0),
    SystemParams(2.0, 100.0),
]


# (criterion number, verdict line), echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
