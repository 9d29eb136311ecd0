"""Meijer G-function of real parameters and positive real argument.

Two independent evaluation routes are provided:

``residue_series``
    Slater's theorem: the Mellin-Barnes integral closed around the poles of
    the Gamma(b_h + t) factors, giving one generalized hypergeometric series
    per pole family.  Classes with p > q (and p == q with z > 1) are first
    mapped through G(z | a; b) = G(1/z | 1 - b; 1 - a) so that the series
    converges.  Pole families that coincide (integer-spaced b's) are split
    by +/- ``pole_epsilon`` and the two results averaged, which removes the
    first-order perturbation error.

``contour_integration``
    The Mellin-Barnes integral itself along a vertical line Re t = c that
    separates the two pole families, discretised by the trapezoid rule and
    refined by step halving.

The default ``auto`` strategy uses the residue series whenever its own
cancellation estimate certifies the result and falls back to the contour
otherwise (coincident poles of order three or more, arguments near the
singular point of p == q classes, large arguments of entire series).
"""
import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ..errors import (DomainError, IllConditionedError, NonConvergenceError,
                      UnsupportedClassError)
from ._backend import kernels

STRATEGIES = ("auto", "residue_series", "contour_integration")

# (m, n, p, q) orders the channel and capacity formulas are built from
MODEL_CLASSES = frozenset({(2, 0, 0, 2), (2, 2, 2, 2), (2, 3, 3, 2),
                           (4, 3, 4, 4), (4, 1, 2, 4)})

_COLLISION_TOL = 1e-7


@dataclass(frozen=True)
class MeijerGSpec:
    """Orders and parameters of G^{m,n}_{p,q}(. | a; b).

    ``a`` holds the p upper parameters (the first n belong to the
    Gamma(1 - a_j - t) factors), ``b`` the q lower ones (the first m belong
    to the Gamma(b_j + t) factors).
    """

    m: int
    n: int
    p: int
    q: int
    a: tuple = ()
    b: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise ValueError("parameter lists do not match orders p=%d, q=%d"
                             % (self.p, self.q))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError("orders must satisfy 0 <= m <= q and 0 <= n <= p")

    @classmethod
    def from_groups(cls, an=(), ap=(), bm=(), bq=()):
        """Build a spec from the four parameter groups, mpmath style."""
        an, ap, bm, bq = tuple(an), tuple(ap), tuple(bm), tuple(bq)
        return cls(len(bm), len(an), len(an) + len(ap), len(bm) + len(bq),
                   an + ap, bm + bq)

    @property
    def order(self):
        return (self.m, self.n, self.p, self.q)

    def inverted(self):
        """Spec of G^{n,m}_{q,p}(1/z | 1 - b; 1 - a), equal to this one at z."""
        return MeijerGSpec(self.n, self.m, self.q, self.p,
                           tuple(1.0 - v for v in self.b),
                           tuple(1.0 - v for v in self.a))


@dataclass(frozen=True)
class EvalOptions:
    pole_epsilon: float = 1e-5
    series_tol: float = 1e-14
    max_terms: int = 10_000
    strategy: str = "auto"
    # residue sums whose |terms| / |sum| exceeds this are rejected
    max_condition: float = 1e6
    contour_tol: float = 1e-13
    # "auto" keeps a residue sum only below this condition; the rounding
    # error of the sum is about 2e-15 * condition
    auto_condition: float = 1e4

    def __post_init__(self):
        if not 0.0 < self.pole_epsilon <= 1e-4:
            raise ValueError("pole_epsilon must lie in (0, 1e-4]")
        if not self.series_tol > 0.0:
            raise ValueError("series_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")
        if self.strategy not in STRATEGIES:
            raise ValueError("unknown strategy %r" % (self.strategy,))
        if not 1.0 <= self.auto_condition <= self.max_condition:
            raise ValueError("auto_condition must lie in [1, max_condition]")


DEFAULT_OPTIONS = EvalOptions()


class ResidueResult(NamedTuple):
    value: float
    condition: float
    terms: int


def _pole_gap(spec):
    left = max((-v for v in spec.b[:spec.m]), default=-math.inf)
    right = min((1.0 - v for v in spec.a[:spec.n]), default=math.inf)
    return left, right


def check_supported(spec):
    """Raise unless the integrand decays and a vertical contour exists."""
    if spec.m + spec.n - 0.5 * (spec.p + spec.q) <= 0:
        raise UnsupportedClassError(
            "G^{%d,%d}_{%d,%d} is outside the supported classes "
            "(need m + n > (p + q)/2)" % spec.order)
    if spec.m == 0:
        raise UnsupportedClassError("classes with m = 0 are not supported")
    left, right = _pole_gap(spec)
    if not left < right:
        raise UnsupportedClassError(
            "poles of Gamma(b_j + t) and Gamma(1 - a_j - t) are not separated "
            "by a vertical line (max(-b) = %g >= min(1 - a) = %g)" % (left, right))


def _sinpi(v):
    # reduce first so that sin(pi v) keeps full relative accuracy near integers
    n = round(v)
    r = v - n
    out = math.sin(math.pi * r)
    return -out if n % 2 else out


def _log_abs_gamma(v):
    """(log|Gamma(v)|, sign Gamma(v)) for real v that is not a pole."""
    if v >= 0.5:
        return math.lgamma(v), 1.0
    # reflection; math.lgamma itself is only absolutely accurate near poles
    s = _sinpi(v)
    return (math.log(math.pi / abs(s)) - math.lgamma(1.0 - v),
            1.0 if s > 0.0 else -1.0)


def _is_pole(v):
    return v <= 0.0 and v == math.floor(v)


def _gamma_ratio(num, den):
    log_mag = 0.0
    sign = 1.0
    for v in num:
        if _is_pole(v):
            raise DomainError("Gamma pole in residue prefactor at %g" % v)
        lg, sg = _log_abs_gamma(v)
        log_mag += lg
        sign *= sg
    for v in den:
        if _is_pole(v):
            return 0.0
        lg, sg = _log_abs_gamma(v)
        log_mag -= lg
        sign *= sg
    return sign * math.exp(log_mag)


def _near_integer(v):
    return abs(v - round(v)) < _COLLISION_TOL


def _has_collision(values):
    return any(_near_integer(values[i] - values[j])
               for i in range(len(values)) for j in range(i))


def _max_cluster(values):
    best = 0
    for v in values:
        best = max(best, sum(1 for w in values if _near_integer(v - w)))
    return best


def _split_offsets(values):
    """Offsets (in units of epsilon) that pull apart integer-spaced poles.

    Members of each cluster are spread symmetrically about their original
    position, so the mean shift is zero and averaging the +/- evaluations
    leaves only an O(epsilon^2) error.
    """
    offsets = [0.0] * len(values)
    seen = set()
    for i, v in enumerate(values):
        if i in seen:
            continue
        cluster = [j for j in range(len(values))
                   if j not in seen and _near_integer(values[j] - v)]
        seen.update(cluster)
        r = len(cluster)
        for rank, j in enumerate(cluster):
            offsets[j] = rank - 0.5 * (r - 1)
    return offsets


def _slater(m, n, a, b, z, opts):
    p, q = len(a), len(b)
    sign = -1.0 if (p - m - n) % 2 else 1.0
    log_z = math.log(z)
    total = 0.0
    abs_total = 0.0
    terms = 0
    for h in range(m):
        bh = b[h]
        # Differences are formed once and 1 - (x - b_h) is then exact near
        # the poles, so the near-singular Gamma factors of one residue family
        # and the near-zero series parameters of another see the same rounding.
        db = [v - bh for v in b]
        da = [v - bh for v in a]
        num = [db[j] for j in range(m) if j != h]
        num += [1.0 - da[j] for j in range(n)]
        den = [1.0 - db[j] for j in range(m, q)]
        den += [da[j] for j in range(n, p)]
        pre = _gamma_ratio(num, den)
        if pre == 0.0:
            continue
        up = [1.0 - v for v in da]
        lo = [1.0 - db[j] for j in range(q) if j != h]
        s, s_abs, k = kernels.hyp_series(up, lo, sign * z, opts.series_tol,
                                         opts.max_terms)
        if k < 0:
            raise NonConvergenceError(
                "residue series did not converge after %d terms" % -k,
                terms=-k, operation="meijer_g")
        scale = pre * math.exp(bh * log_z)
        total += scale * s
        abs_total += abs(scale) * s_abs
        terms += k
    return total, abs_total, terms


def residue_series(spec, z, opts=DEFAULT_OPTIONS):
    """Evaluate G at one argument by Slater's residue expansion.

    Returns a :class:`ResidueResult` whose ``condition`` is the ratio of the
    summed term magnitudes to the result, i.e. the factor by which rounding
    errors are amplified.

    Raises
    ------
    NonConvergenceError
        If a series needs more than ``opts.max_terms`` terms.
    IllConditionedError
        If ``condition`` exceeds ``opts.max_condition``.
    """
    check_supported(spec)
    z = float(z)
    if not z > 0.0:
        raise DomainError("Meijer-G argument must be positive, got %r" % z)
    m, n, a, b = spec.m, spec.n, list(spec.a), list(spec.b)
    p, q = spec.p, spec.q
    if p > q or (p == q and z > 1.0):
        m, n = n, m
        a, b = [1.0 - v for v in b], [1.0 - v for v in a]
        p, q = q, p
        z = 1.0 / z
    if p > q:
        raise UnsupportedClassError("no convergent residue expansion for "
                                    "G^{%d,%d}_{%d,%d}" % spec.order)
    if _has_collision(b[:m]):
        eps = opts.pole_epsilon
        results = []
        offsets = _split_offsets(b[:m])
        for direction in (1.0, -1.0):
            shifted = [v + direction * eps * o
                       for v, o in zip(b[:m], offsets)] + b[m:]
            results.append(_slater(m, n, a, shifted, z, opts))
        total = 0.5 * (results[0][0] + results[1][0])
        abs_total = max(results[0][1], results[1][1])
        terms = results[0][2] + results[1][2]
    else:
        total, abs_total, terms = _slater(m, n, a, b, z, opts)
    if total == 0.0:
        condition = math.inf if abs_total > 0.0 else 1.0
    else:
        condition = abs_total / abs(total)
    if condition > opts.max_condition:
        raise IllConditionedError(
            "residue series lost too many digits (condition %.3g)" % condition,
            condition=condition, terms=terms, operation="meijer_g")
    return ResidueResult(total, condition, terms)


def _residue_hopeless(spec):
    """True when every residue orientation has a triple (or worse) pole."""
    orientations = []
    if spec.p <= spec.q:
        orientations.append(spec.b[:spec.m])
    if spec.p >= spec.q:
        orientations.append(spec.a[:spec.n])
    return all(_max_cluster(list(vals)) >= 3 for vals in orientations)


class _ContourGrid:
    """Integrand samples along Re t = c, refined level by level."""

    def __init__(self, spec, c):
        self.spec = spec
        self.c = c
        left, right = _pole_gap(spec)
        self.pole_distance = min(c - left, right - c)
        self.lock = threading.Lock()
        self.tau_max = self._extent()
        self.h0 = min(0.5, 0.5 * self.pole_distance)
        self.levels = []

    def log_phi(self, tau):
        s = self.spec
        t = self.c + 1j * np.asarray(tau, dtype=float)
        lg = kernels.loggamma_array
        out = np.zeros(t.shape, dtype=complex)
        for v in s.b[:s.m]:
            out += lg(v + t)
        for v in s.a[:s.n]:
            out += lg(1.0 - v - t)
        for v in s.b[s.m:]:
            out -= lg(1.0 - v - t)
        for v in s.a[s.n:]:
            out -= lg(v + t)
        return out

    def _extent(self):
        tau = 0.0
        peak = -math.inf
        while True:
            val = self.log_phi(np.array([tau]))[0].real
            peak = max(peak, val)
            if tau >= 2.0 and val < peak - 46.0:
                return tau
            if tau > 2000.0:
                raise NonConvergenceError("Mellin-Barnes integrand does not decay",
                                          operation="meijer_g")
            tau += 0.5

    def level(self, i):
        """(tau, log_phi, first_weight) of the points new at level ``i``."""
        with self.lock:
            while len(self.levels) <= i:
                j = len(self.levels)
                if j == 0:
                    k = np.arange(0, int(math.ceil(self.tau_max / self.h0)) + 1)
                    tau = k * self.h0
                    weight = 0.5
                else:
                    h = self.h0 / 2 ** j
                    k = np.arange(1, int(math.ceil(self.tau_max / h)) + 1, 2)
                    tau = k * h
                    weight = 1.0
                self.levels.append((tau, self.log_phi(tau), weight))
            return self.levels[i]


@lru_cache(maxsize=256)
def _grid(spec, c):
    return _ContourGrid(spec, c)


def _log_phi_real(spec, c):
    """log |Phi(c)| on the real axis, skipping denominator Gammas at poles."""
    s = spec
    val = sum(math.lgamma(v + c) for v in s.b[:s.m])
    val -= sum(math.lgamma(1.0 - v - c) if 1.0 - v - c > 0 else 0.0
               for v in s.b[s.m:])
    val -= sum(math.lgamma(v + c) for v in s.a[s.n:])
    return val


def _saddle(spec, log_z, lower):
    """Contour abscissa minimising |Phi(c)| z^-c on the real axis (n = 0).

    Returns ``(c, log_bound)`` where ``log_bound`` is log(|Phi(c)| z^-c).
    """
    def g(c):
        return _log_phi_real(spec, c) - c * log_z

    lo, hi = lower, lower + 1.0
    while g(hi) < g(hi - 0.5) and hi < 1e6:
        hi = lower + 2.0 * (hi - lower)
    golden = 0.5 * (math.sqrt(5.0) - 1.0)
    for _ in range(200):
        c1 = hi - golden * (hi - lo)
        c2 = lo + golden * (hi - lo)
        if g(c1) < g(c2):
            hi = c2
        else:
            lo = c1
        if hi - lo < 1e-3 * max(1.0, lo):
            break
    c = 0.5 * (lo + hi)
    # quantise so that nearby arguments share a cached grid; being a percent
    # off the saddle costs only a few units of cancellation
    c = round(c, 2) if c < 10.0 else float("%.3g" % c)
    return c, g(c)


def _abscissa(left, right, log_x):
    """Contour abscissa for G at x = exp(log_x) when both pole families exist.

    The integral along Re t = c carries a factor x^-c while G itself behaves
    like x^-right for large x (x^-left for small x), so a contour far from
    the dominant pole family sums large oscillating terms to a small result.
    Moving to distance ~1/|log x| from that family balances the cancellation
    against the growth of the integrand near the pole.  Distances are
    quantised to powers of two so that nearby arguments share a grid.
    """
    half = 0.5 * (right - left)
    if abs(log_x) * half <= 1.0:
        return left + half
    delta = half * 2.0 ** -math.floor(math.log2(abs(log_x) * half))
    return right - delta if log_x > 0 else left + delta


def _contour_at(spec, c, xs, opts):
    grid = _grid(spec, c)
    log_x = np.log(xs)
    # sums are kept relative to the largest sample of the coarsest level so
    # that huge or tiny integrands neither overflow nor underflow
    shift = float(grid.level(0)[1].real.max())
    acc = np.zeros_like(xs)
    mag = 0.0
    prev = None
    for i in range(16):
        tau, log_phi, weight = grid.level(i)
        acc = acc + kernels.mb_sum(log_phi - shift, tau, log_x, weight)
        mag += float(np.exp(log_phi.real - shift).sum())
        # the trapezoid sum at step h is h times every sample taken so far
        h = grid.h0 / 2 ** i
        current = acc * h
        if prev is not None:
            err = np.abs(current - prev)
            bound = opts.contour_tol * np.abs(current) + 1e-15 * mag * h
            if np.all(err <= bound):
                with np.errstate(under="ignore"):
                    return current * np.exp(shift - c * log_x) / math.pi
        prev = current
    raise NonConvergenceError("contour integral did not converge after %d "
                              "refinements" % 16, terms=16, operation="meijer_g")


def contour_integration(spec, x, opts=DEFAULT_OPTIONS):
    """Evaluate G at an array of positive arguments along a vertical contour."""
    check_supported(spec)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xs > 0.0)):
        raise DomainError("Meijer-G argument must be positive")
    left, right = _pole_gap(spec)
    if spec.n > 0:
        out = np.empty_like(xs)
        abscissae = np.array([_abscissa(left, right, math.log(v)) for v in xs])
        for c in np.unique(abscissae):
            sel = abscissae == c
            out[sel] = _contour_at(spec, float(c), xs[sel], opts)
        return out
    out = np.empty_like(xs)
    entire = spec.p == 0 and spec.q == spec.m
    for i, xi in enumerate(xs):
        c, log_bound = _saddle(spec, math.log(xi), left + 0.5)
        # With only Gamma(b_j + t) factors, |Phi(c + i tau)| <= Phi(c) and the
        # tau-integral of the ratio is below pi c / 2; when even that bound
        # underflows the value is zero in double precision.
        if entire and log_bound + math.log(c) < -746.0:
            out[i] = 0.0
            continue
        out[i] = _contour_at(spec, c, np.array([xi]), opts)[0]
    return out


def meijer_g(spec, x, opts=None):
    """Value of G^{m,n}_{p,q}(x | a; b) for real parameters and x > 0.

    ``x`` may be a scalar or an array; arrays are evaluated element-wise and
    share one contour grid, which is what makes quadrature sweeps cheap.
    """
    opts = DEFAULT_OPTIONS if opts is None else opts
    check_supported(spec)
    arr = np.asarray(x, dtype=float)
    xs = np.atleast_1d(arr).ravel()
    if np.any(~(xs > 0.0)):
        raise DomainError("Meijer-G argument must be positive")
    if opts.strategy == "contour_integration":
        out = contour_integration(spec, xs, opts)
    elif opts.strategy == "residue_series":
        out = np.array([residue_series(spec, xi, opts).value for xi in xs])
    else:
        out = np.empty_like(xs)
        pending = []
        hopeless = _residue_hopeless(spec)
        for i, xi in enumerate(xs):
            if hopeless:
                pending.append(i)
                continue
            try:
                res = residue_series(spec, xi, opts)
            except NonConvergenceError:
                pending.append(i)
                continue
            if res.condition > opts.auto_condition:
                pending.append(i)
            else:
                out[i] = res.value
        if pending:
            out[pending] = contour_integration(spec, xs[pending], opts)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)
