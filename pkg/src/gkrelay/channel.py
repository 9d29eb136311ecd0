"""Generalized-K link model and the statistics of the per-hop SNRs.

A generalized-K (K_G) link has power gain |h|^2 = Y * Z with
Y ~ Gamma(k, mean Omega) (shadowing) and Z ~ Gamma(m, mean 1) (multipath),
where Omega = d^-alpha.  In the underlay cognitive relay every secondary
transmitter sets its power so that the interference at the primary
receiver stays at the temperature w, which makes the per-hop SNR the ratio

    gamma_l = (w / N0) |h_i|^2 / |h_j|^2,

with i the secondary data link of hop l and j the link from the transmitter
of that hop to the primary receiver.  When the interference link is very
weak the power cap P_max binds instead and gamma_l = (P_max / N0) |h_i|^2.

All closed forms below are expressed through Meijer-G and Whittaker-W
functions from :mod:`gkrelay.specfun`.  Throughout, N0 is normalized away:
``SystemParams`` stores the linear ratios w/N0 and P_max/N0.
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .specfun import MeijerGSpec, meijer_g, whittaker_w_scaled

__all__ = [
    "GKLink", "HopChannels", "SystemParams", "RandomStream", "Regime",
    "gk_power_pdf", "snr_ratio_pdf", "snr_ratio_cdf", "snr_mgf",
    "snr_mgf_derivative", "snr_mgf_pmax", "snr_mgf_derivative_pmax",
    "hop_mgf", "hop_mgf_derivative", "sample_gk_power", "sample_hop_snr",
    "sample_e2e_snr", "e2e_snr", "db_to_linear", "linear_to_db",
]


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


@dataclass(frozen=True)
class GKLink:
    """One generalized-K faded link.

    Parameters
    ----------
    k : float
        Shadowing shape (k > 0; k -> inf removes shadowing).
    m : float
        Nakagami multipath shape (m >= 0.5).
    d : float
        Distance normalized to a 1 km reference.
    alpha : float
        Path-loss exponent in [2, 6].
    """

    k: float
    m: float
    d: float
    alpha: float = 4.0

    def __post_init__(self):
        for name in ("k", "m", "d", "alpha"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise ParameterError(name, "must be a real number, got %r" % (value,))
            if not math.isfinite(value):
                raise ParameterError(name, "must be finite, got %r" % (value,))
            object.__setattr__(self, name, float(value))
        if not self.k > 0.0:
            raise ParameterError("k", "shadowing shape must be positive, got %g" % self.k)
        if not self.m >= 0.5:
            raise ParameterError("m", "multipath shape must be >= 0.5, got %g" % self.m)
        if not self.d > 0.0:
            raise ParameterError("d", "distance must be positive, got %g" % self.d)
        if not 2.0 <= self.alpha <= 6.0:
            raise ParameterError("alpha", "path-loss exponent must lie in [2, 6], "
                                 "got %g" % self.alpha)

    @property
    def omega(self):
        """Mean power gain d^-alpha."""
        return self.d ** -self.alpha

    @property
    def delta(self):
        return 0.5 * (self.k + self.m)

    @property
    def theta(self):
        return 0.5 * (self.k - self.m)

    def log_gamma_product(self):
        return math.lgamma(self.k) + math.lgamma(self.m)


@dataclass(frozen=True)
class HopChannels:
    """The two links that determine one hop's SNR.

    ``data`` is the secondary link carrying the signal (S->R or R->D) and
    ``interference`` the link from the same transmitter to the primary
    receiver (S->P or R->P).
    """

    data: GKLink
    interference: GKLink

    def __post_init__(self):
        for name in ("data", "interference"):
            if not isinstance(getattr(self, name), GKLink):
                raise ParameterError(name, "must be a GKLink")


@dataclass(frozen=True)
class SystemParams:
    """Linear-scale interference temperature and power cap, both over N0."""

    w_over_n0: float
    pmax_over_n0: float

    def __post_init__(self):
        for name in ("w_over_n0", "pmax_over_n0"):
            value = float(getattr(self, name))
            if not (value > 0.0 and math.isfinite(value)):
                raise ParameterError(name, "must be positive and finite, got %r" % value)
            object.__setattr__(self, name, value)

    @classmethod
    def from_db(cls, w_db, pmax_db):
        return cls(float(db_to_linear(w_db)), float(db_to_linear(pmax_db)))

    @property
    def w_db(self):
        return float(linear_to_db(self.w_over_n0))

    @property
    def pmax_db(self):
        return float(linear_to_db(self.pmax_over_n0))


class Regime(str, enum.Enum):
    """Which constraint sets a secondary transmitter's power."""

    INTERFERENCE = "interference"
    PMAX = "pmax"
    AUTO = "auto"


@dataclass
class RandomStream:
    """Seeded random stream; ``spawn`` derives independent child streams.

    Children are derived with :class:`numpy.random.SeedSequence`, so the
    stream handed to shard ``i`` depends only on the master seed and ``i``.
    """

    seed: int
    _seq: np.random.SeedSequence = field(init=False, repr=False)
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._init(np.random.SeedSequence(int(self.seed) & (2 ** 64 - 1)))

    def _init(self, seq):
        self._seq = seq
        self.generator = np.random.Generator(np.random.PCG64(seq))

    @classmethod
    def _from_sequence(cls, seq, seed):
        stream = cls.__new__(cls)
        stream.seed = seed
        stream._init(seq)
        return stream

    def spawn(self, n):
        return [RandomStream._from_sequence(child, self.seed)
                for child in self._seq.spawn(n)]


def _as_positive(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)):
        raise ParameterError(name, "must be positive")
    return arr


def _finish(arr, values):
    values = np.asarray(values, dtype=float)
    return float(values.ravel()[0]) if arr.ndim == 0 else values.reshape(arr.shape)


# ---------------------------------------------------------------------------
# single-link power

def gk_power_pdf(link, x):
    """Density of |h|^2 for a generalized-K link.

    f(x) = (km/Omega)^Delta x^(Delta-1) G^{2,0}_{0,2}(km x/Omega | Theta, -Theta)
           / (Gamma(k) Gamma(m))
    """
    arr = _as_positive(x, "x")
    scale = link.k * link.m / link.omega
    spec = MeijerGSpec(2, 0, 0, 2, (), (link.theta, -link.theta))
    g = meijer_g(spec, scale * np.ravel(arr))
    log_pre = (link.delta * math.log(scale) + (link.delta - 1.0) * np.log(np.ravel(arr))
               - link.log_gamma_product())
    return _finish(arr, np.exp(log_pre) * g)


# ---------------------------------------------------------------------------
# interference-limited hop: gamma = (w/N0) |h_i|^2 / |h_j|^2

def _ratio_scale(hop, sys):
    i, j = hop.data, hop.interference
    return (i.k * i.m * j.omega) / (j.k * j.m * i.omega * sys.w_over_n0)


def _log_norm(hop):
    return hop.data.log_gamma_product() + hop.interference.log_gamma_product()


def _ratio_lower(hop):
    return (hop.data.theta, -hop.data.theta)


def _ratio_upper(hop):
    i, j = hop.data, hop.interference
    return (1.0 - i.delta - j.k, 1.0 - i.delta - j.m)


def snr_ratio_pdf(hop, sys, x):
    """Density of the interference-limited hop SNR.

    f(x) = beta^Delta x^(Delta-1) G^{2,2}_{2,2}(beta x | 1-Delta-k_j, 1-Delta-m_j;
           Theta, -Theta) / (Gamma(k_i) Gamma(m_i) Gamma(k_j) Gamma(m_j)),

    beta = k_i m_i Omega_j / (k_j m_j Omega_i w/N0), with Delta and Theta of
    the data link.
    """
    arr = _as_positive(x, "x")
    beta = _ratio_scale(hop, sys)
    spec = MeijerGSpec(2, 2, 2, 2, _ratio_upper(hop), _ratio_lower(hop))
    xs = np.ravel(arr)
    delta = hop.data.delta
    g = meijer_g(spec, beta * xs)
    log_pre = delta * math.log(beta) + (delta - 1.0) * np.log(xs) - _log_norm(hop)
    return _finish(arr, np.exp(log_pre) * g)


def snr_ratio_cdf(hop, sys, x):
    """Distribution function of the interference-limited hop SNR.

    Integrating the density term by term gives
    F(x) = (beta x)^Delta G^{2,3}_{3,3}(beta x | 1-Delta-k_j, 1-Delta-m_j, 1-Delta;
           Theta, -Theta, -Delta) / (Gamma(k_i) Gamma(m_i) Gamma(k_j) Gamma(m_j)).
    """
    arr = _as_positive(x, "x")
    beta = _ratio_scale(hop, sys)
    delta = hop.data.delta
    spec = MeijerGSpec(2, 3, 3, 3, _ratio_upper(hop) + (1.0 - delta,),
                       _ratio_lower(hop) + (-delta,))
    z = beta * np.ravel(arr)
    g = meijer_g(spec, z)
    return _finish(arr, np.exp(delta * np.log(z) - _log_norm(hop)) * g)


def _mgf_spec(hop, first):
    return MeijerGSpec(2, 3, 3, 2, (first,) + _ratio_upper(hop), _ratio_lower(hop))


def snr_mgf(hop, sys, s):
    """MGF E[exp(-s gamma)] of the interference-limited hop SNR.

    M(s) = (beta/s)^Delta G^{2,3}_{3,2}(beta/s | 1-Delta, 1-Delta-k_j,
           1-Delta-m_j; Theta, -Theta) / (Gamma(k_i) Gamma(m_i) Gamma(k_j) Gamma(m_j)).
    """
    arr = _as_positive(s, "s")
    beta = _ratio_scale(hop, sys)
    delta = hop.data.delta
    z = beta / np.ravel(arr)
    g = meijer_g(_mgf_spec(hop, 1.0 - delta), z)
    return _finish(arr, np.exp(delta * np.log(z) - _log_norm(hop)) * g)


def snr_mgf_derivative(hop, sys, s):
    """d/ds of :func:`snr_mgf`.

    M'(s) = -beta^Delta s^-(Delta+1) G^{2,3}_{3,2}(beta/s | -Delta, 1-Delta-k_j,
            1-Delta-m_j; Theta, -Theta) / (Gamma(k_i) Gamma(m_i) Gamma(k_j) Gamma(m_j)).
    """
    arr = _as_positive(s, "s")
    beta = _ratio_scale(hop, sys)
    delta = hop.data.delta
    ss = np.ravel(arr)
    g = meijer_g(_mgf_spec(hop, -delta), beta / ss)
    log_pre = delta * math.log(beta) - (delta + 1.0) * np.log(ss) - _log_norm(hop)
    return _finish(arr, -np.exp(log_pre) * g)


# ---------------------------------------------------------------------------
# power-capped hop: gamma = (P_max/N0) |h_i|^2

def _pmax_scale(link, sys):
    return link.k * link.m / (link.omega * sys.pmax_over_n0)


def snr_mgf_pmax(link, sys, s):
    """MGF of (P_max/N0)|h|^2 for the data link of a power-capped hop.

    M(s) = z^(Delta-1/2) exp(z/2) W_{1/2-Delta, Theta}(z),  z = k m / (Omega P_max/N0 s).
    """
    arr = _as_positive(s, "s")
    beta = _pmax_scale(link, sys)
    kappa = 0.5 - link.delta
    out = [(beta / si) ** (link.delta - 0.5)
           * whittaker_w_scaled(kappa, link.theta, beta / si) for si in np.ravel(arr)]
    return _finish(arr, out)


def snr_mgf_derivative_pmax(link, sys, s):
    """d/ds of :func:`snr_mgf_pmax`.

    M'(s) = -(k m / (Omega P_max/N0))^(Delta-1/2) k m s^-(Delta+1/2)
            exp(z/2) W_{-Delta-1/2, Theta}(z).

    Both shape factors in front belong to the same link as everything else;
    differentiating the MGF does not bring in any other link.
    """
    arr = _as_positive(s, "s")
    beta = _pmax_scale(link, sys)
    kappa = -0.5 - link.delta
    km = link.k * link.m
    out = [-(beta ** (link.delta - 0.5)) * km * si ** (-link.delta - 0.5)
           * whittaker_w_scaled(kappa, link.theta, beta / si) for si in np.ravel(arr)]
    return _finish(arr, out)


def hop_mgf(hop, sys, regime, s):
    """MGF of a hop's SNR under an explicit (non-auto) regime."""
    if Regime(regime) is Regime.PMAX:
        return snr_mgf_pmax(hop.data, sys, s)
    if Regime(regime) is Regime.INTERFERENCE:
        return snr_mgf(hop, sys, s)
    raise ValueError("regime must be resolved before evaluating the MGF")


def hop_mgf_derivative(hop, sys, regime, s):
    if Regime(regime) is Regime.PMAX:
        return snr_mgf_derivative_pmax(hop.data, sys, s)
    if Regime(regime) is Regime.INTERFERENCE:
        return snr_mgf_derivative(hop, sys, s)
    raise ValueError("regime must be resolved before evaluating the MGF")


# ---------------------------------------------------------------------------
# sampling

def _generator(rng):
    return rng.generator if isinstance(rng, RandomStream) else rng


def sample_gk_power(link, rng, size=None):
    """Draw |h|^2 as Y * Z, Y ~ Gamma(k, Omega/k), Z ~ Gamma(m, 1/m)."""
    gen = _generator(rng)
    y = gen.standard_gamma(link.k, size) * (link.omega / link.k)
    z = gen.standard_gamma(link.m, size) / link.m
    return y * z


def sample_hop_snr(hop, sys, rng, regime=Regime.INTERFERENCE, size=None):
    """Draw the SNR of one hop under an explicit regime.

    Both links are always drawn, in the same order, so that switching a
    hop's regime does not shift the random streams of anything else.
    """
    hi = sample_gk_power(hop.data, rng, size)
    hj = sample_gk_power(hop.interference, rng, size)
    if Regime(regime) is Regime.PMAX:
        return sys.pmax_over_n0 * hi
    if Regime(regime) is Regime.INTERFERENCE:
        return sys.w_over_n0 * hi / hj
    raise ValueError("regime must be resolved before sampling")


def e2e_snr(gamma1, gamma2):
    """End-to-end SNR of variable-gain AF relaying, g1 g2 / (g1 + g2 + 1)."""
    gamma1 = np.asarray(gamma1, dtype=float)
    gamma2 = np.asarray(gamma2, dtype=float)
    return gamma1 * gamma2 / (gamma1 + gamma2 + 1.0)


def sample_e2e_snr(hop1, hop2, sys, rng, regimes=(Regime.INTERFERENCE, Regime.INTERFERENCE),
                   size=None, return_hops=False):
    """Draw end-to-end SNRs; with ``return_hops`` also the two hop SNRs."""
    g1 = sample_hop_snr(hop1, sys, rng, regimes[0], size)
    g2 = sample_hop_snr(hop2, sys, rng, regimes[1], size)
    out = e2e_snr(g1, g2)
    if size is None:
        out = float(out)
    if return_hops:
        return out, g1, g2
    return out
