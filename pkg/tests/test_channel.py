import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special, stats

from conftest import ASYMMETRIC_HOPS, ASYMMETRIC_SYS, central_difference, chi_square, log_quad
from gkrelay.channel import (GKLink, HopChannels, RandomStream, Regime, SystemParams, db_to_linear,
                             e2e_snr, gk_power_pdf, linear_to_db, sample_e2e_snr, sample_gk_power,
                             sample_hop_snr, snr_mgf, snr_mgf_derivative, snr_mgf_derivative_pmax,
                             snr_mgf_pmax, snr_ratio_cdf, snr_ratio_pdf)
from gkrelay.errors import ParameterError
from gkrelay.specfun import whittaker_w_scaled


class TestTypes:
    @pytest.mark.parametrize("field, kwargs", [
        ("k", dict(k=0.0, m=1.0, d=1.0)),
        ("k", dict(k=-1.0, m=1.0, d=1.0)),
        ("m", dict(k=1.0, m=0.4, d=1.0)),
        ("d", dict(k=1.0, m=1.0, d=0.0)),
        ("alpha", dict(k=1.0, m=1.0, d=1.0, alpha=7.0)),
        ("k", dict(k=float("nan"), m=1.0, d=1.0)),
    ])
    def test_link_validation(self, field, kwargs):
        with pytest.raises(ParameterError) as info:
            GKLink(**kwargs)
        assert info.value.name == field

    def test_derived_quantities(self):
        link = GKLink(3.0, 1.0, 0.5, alpha=3.0)
        assert link.omega == 8.0
        assert (link.delta, link.theta) == (2.0, 1.0)

    def test_system_params(self):
        sys_ = SystemParams.from_db(10.0, 20.0)
        assert sys_.w_over_n0 == pytest.approx(10.0)
        assert sys_.pmax_db == pytest.approx(20.0)
        with pytest.raises(ParameterError):
            SystemParams(0.0, 1.0)

    @given(st.floats(-60, 60))
    def test_db_round_trip(self, db):
        assert linear_to_db(db_to_linear(db)) == pytest.approx(db, abs=1e-12)

    def test_hop_requires_links(self):
        with pytest.raises(ParameterError):
            HopChannels(GKLink(1, 1, 1), "not a link")


class TestPowerDensity:
    @pytest.mark.parametrize("link", [GKLink(1, 1, 1), GKLink(4, 3, 0.05), GKLink(0.6, 5.5, 2.0),
                                      GKLink(2.5, 0.5, 0.8, alpha=2.7)])
    def test_normalization(self, link):
        assert log_quad(lambda x: gk_power_pdf(link, x)) == pytest.approx(1.0, abs=1e-8)

    def test_rayleigh_limit(self):
        assert gk_power_pdf(GKLink(100.0, 1.0, 1.0), 1.0) == pytest.approx(math.exp(-1.0), rel=0.02)

    def test_mean(self):
        link = GKLink(2.0, 1.0, 1.0)
        assert log_quad(lambda x: x * gk_power_pdf(link, x)) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("x", [1e-4, 0.3, 2.0, 17.0])
    def test_bessel_form(self, x):
        link = GKLink(2.7, 1.4, 0.9)
        c = link.k * link.m / link.omega
        expected = (2 * c ** link.delta * x ** (link.delta - 1)
                    * special.kv(2 * link.theta, 2 * math.sqrt(c * x))
                    / (special.gamma(link.k) * special.gamma(link.m)))
        assert gk_power_pdf(link, x) == pytest.approx(expected, rel=1e-10)

    def test_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            gk_power_pdf(GKLink(1, 1, 1), 0.0)


def _ratio_density_by_quadrature(hop, sys_, x):
    """f(x) = int y f_i(xy / (w/N0)) f_j(y) dy / (w/N0), straight from the definition."""
    w = sys_.w_over_n0
    return log_quad(lambda y: y * gk_power_pdf(hop.data, x * y / w) * gk_power_pdf(hop.interference, y)) / w


class TestRatioDensity:
    @pytest.mark.parametrize("hop, sys_", list(zip(ASYMMETRIC_HOPS, ASYMMETRIC_SYS)))
    def test_normalization(self, hop, sys_):
        assert log_quad(lambda x: snr_ratio_pdf(hop, sys_, x), -60, 60) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("x", [1e-3, 0.2, 1.0, 9.0])
    def test_matches_ratio_integral(self, x):
        hop, sys_ = ASYMMETRIC_HOPS[2], ASYMMETRIC_SYS[2]
        assert snr_ratio_pdf(hop, sys_, x) == pytest.approx(_ratio_density_by_quadrature(hop, sys_, x), rel=1e-8)

    def test_iid_median(self):
        link = GKLink(2.2, 1.3, 0.7)
        hop = HopChannels(link, link)
        assert snr_ratio_cdf(hop, SystemParams(1.0, 10.0), 1.0) == pytest.approx(0.5, abs=1e-6)

    @pytest.mark.parametrize("x", [1e-3, 0.05, 0.5, 4.0, 80.0])
    def test_cdf_integrates_pdf(self, x):
        hop, sys_ = ASYMMETRIC_HOPS[1], ASYMMETRIC_SYS[1]
        quad = log_quad(lambda t: np.where(t <= x, snr_ratio_pdf(hop, sys_, np.minimum(t, x)), 0.0),
                        -60, math.log(x))
        assert snr_ratio_cdf(hop, sys_, x) == pytest.approx(quad, rel=1e-8)

    @pytest.mark.parametrize("x", [1e-3, 0.4, 3.0, 250.0])
    def test_scale_covariance(self, x):
        hop = ASYMMETRIC_HOPS[3]
        f1 = snr_ratio_pdf(hop, SystemParams(1.5, 10.0), x / 2.0) / 2.0
        f2 = snr_ratio_pdf(hop, SystemParams(3.0, 10.0), x)
        assert f2 == pytest.approx(f1, rel=1e-9)

    @pytest.mark.parametrize("x", [0.01, 0.3, 2.0, 45.0])
    def test_reciprocal_symmetry(self, x):
        link = GKLink(1.7, 2.9, 0.6)
        hop, sys_ = HopChannels(link, link), SystemParams(1.0, 10.0)
        assert snr_ratio_pdf(hop, sys_, 1.0 / x) == pytest.approx(x ** 2 * snr_ratio_pdf(hop, sys_, x), rel=1e-8)

    def test_histogram(self):
        """Chi-square test of 10^7 draws against bin probabilities of the density."""
        hop, sys_ = ASYMMETRIC_HOPS[0], ASYMMETRIC_SYS[0]
        samples = sample_hop_snr(hop, sys_, RandomStream(11).generator, size=10_000_000)
        statistic, dof = chi_square(hop, sys_, samples, bins=60)
        assert stats.chi2.sf(statistic, dof) > 0.05


class TestMGF:
    def test_origin(self, table1_hop):
        hop, sys_ = table1_hop
        assert snr_mgf(hop, sys_, 1e-6) == pytest.approx(1.0, abs=1e-4)

    def test_decreasing(self, table1_hop):
        hop, sys_ = table1_hop
        values = snr_mgf(hop, sys_, np.logspace(-4, 4, 50))
        assert np.all(np.diff(values) < 0) and np.all((values > 0) & (values <= 1))

    @pytest.mark.parametrize("s", [0.05, 1.0, 20.0])
    def test_against_quadrature(self, table1_hop, s):
        hop, sys_ = table1_hop
        quad = log_quad(lambda x: np.exp(-s * x) * snr_ratio_pdf(hop, sys_, x), -60, 60)
        assert snr_mgf(hop, sys_, s) == pytest.approx(quad, rel=1e-7)

    @pytest.mark.parametrize("s", [0.5, 1.0, 5.0])
    def test_derivative_finite_difference(self, table1_hop, s):
        hop, sys_ = table1_hop
        fd = central_difference(lambda t: snr_mgf(hop, sys_, t), s)
        assert snr_mgf_derivative(hop, sys_, s) == pytest.approx(fd, rel=1e-5)

    def test_derivative_sign_and_limit(self, table1_hop):
        hop, sys_ = table1_hop
        values = snr_mgf_derivative(hop, sys_, np.logspace(-3, 6, 30))
        assert np.all(values < 0)
        assert abs(values[-1]) < 1e-6

    @pytest.mark.parametrize("hop, sys_", list(zip(ASYMMETRIC_HOPS, ASYMMETRIC_SYS)))
    def test_derivative_asymmetric(self, hop, sys_):
        fd = central_difference(lambda t: snr_mgf(hop, sys_, t), 0.7)
        assert snr_mgf_derivative(hop, sys_, 0.7) == pytest.approx(fd, rel=1e-5)


class TestCappedMGF:
    link = GKLink(1.0, 1.0, 1.0)
    sys_ = SystemParams(1.0, 100.0)

    def test_origin(self):
        assert snr_mgf_pmax(self.link, self.sys_, 1e-6) == pytest.approx(1.0, abs=1e-4)

    def test_against_quadrature(self):
        p = self.sys_.pmax_over_n0
        quad = log_quad(lambda x: np.exp(-x) * gk_power_pdf(self.link, x / p) / p)
        assert snr_mgf_pmax(self.link, self.sys_, 1.0) == pytest.approx(quad, rel=1e-7)

    def test_decreasing(self):
        values = snr_mgf_pmax(self.link, self.sys_, np.logspace(-4, 3, 40))
        assert np.all(np.diff(values) < 0)

    @pytest.mark.parametrize("link", [GKLink(1, 1, 1), GKLink(2.3, 0.8, 0.6), GKLink(4, 3, 1.3)])
    @pytest.mark.parametrize("s", [0.2, 1.0, 10.0])
    def test_derivative_finite_difference(self, link, s):
        fd = central_difference(lambda t: snr_mgf_pmax(link, self.sys_, t), s)
        assert snr_mgf_derivative_pmax(link, self.sys_, s) == pytest.approx(fd, rel=1e-5)

    def test_derivative_sign(self):
        assert np.all(snr_mgf_derivative_pmax(self.link, self.sys_, np.logspace(-3, 3, 20)) < 0)

    def test_derivative_mean_limit(self):
        link, sys_ = GKLink(2.0, 1.5, 1.0), SystemParams(1.0, 10.0)
        mean = sys_.pmax_over_n0 * link.omega
        assert -snr_mgf_derivative_pmax(link, sys_, 1e-4) == pytest.approx(mean, rel=0.01)

    def test_other_hop_prefactor_is_wrong(self):
        """Scaling the derivative by another link's k m instead of its own breaks it."""
        link, other = GKLink(2.3, 0.8, 0.6), GKLink(4.0, 3.0, 0.5)
        s = 1.0
        beta = link.k * link.m / (link.omega * self.sys_.pmax_over_n0)
        rest = beta ** (link.delta - 0.5) * s ** (-link.delta - 0.5) * whittaker_w_scaled(
            -0.5 - link.delta, link.theta, beta / s)
        fd = central_difference(lambda t: snr_mgf_pmax(link, self.sys_, t), s)
        assert -link.k * link.m * rest == pytest.approx(fd, rel=1e-6)
        assert abs(-other.k * other.m * rest / fd - 1.0) > 1.0


class TestSampling:
    def test_power_mean(self):
        link = GKLink(1.5, 2.0, 0.7)
        draws = sample_gk_power(link, RandomStream(5), 10_000_000)
        assert draws.mean() == pytest.approx(link.omega, rel=0.005)

    def test_power_ks(self):
        link = GKLink(2.0, 1.0, 1.0)
        draws = np.sort(sample_gk_power(link, RandomStream(8), 1_000_000))
        u = np.linspace(math.log(draws[0]) - 1, math.log(draws[-1]) + 1, 40001)
        x = np.exp(u)
        cdf = integrate.cumulative_simpson(gk_power_pdf(link, x) * x, x=u, initial=0.0)
        cdf += log_quad(lambda t: gk_power_pdf(link, t), -60, u[0])
        F = np.interp(draws, x, cdf)
        n = draws.size
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - F), np.max(F - (i - 1) / n))
        # D ~ 1e-3 is the typical size at n = 10^6, so judge D by its exact null distribution
        print("KS statistic %.3g, p-value %.3f" % (ks, stats.kstwo.sf(ks, n)))
        assert stats.kstwo.sf(ks, n) > 0.01

    def test_deterministic(self):
        link = GKLink(1.0, 1.0, 1.0)
        first = sample_gk_power(link, RandomStream(42), 10)
        assert np.array_equal(first, sample_gk_power(link, RandomStream(42), 10))
        assert not np.array_equal(first, sample_gk_power(link, RandomStream(43), 10))

    def test_spawn_reproducible(self):
        a = [s.generator.random(3) for s in RandomStream(9).spawn(4)]
        b = [s.generator.random(3) for s in RandomStream(9).spawn(4)]
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert not np.array_equal(a[0], a[1])

    def test_e2e_below_min(self):
        hop1, hop2 = ASYMMETRIC_HOPS[1], ASYMMETRIC_HOPS[2]
        e2e, g1, g2 = sample_e2e_snr(hop1, hop2, SystemParams(2.0, 10.0), RandomStream(1).generator,
                                     size=100_000, return_hops=True)
        assert np.all(e2e < np.minimum(g1, g2))

    def test_e2e_formula(self):
        assert e2e_snr(1.0, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_capped_regime_uses_pmax(self):
        hop, sys_ = ASYMMETRIC_HOPS[1], SystemParams(2.0, 10.0)
        capped = sample_hop_snr(hop, sys_, RandomStream(4).generator, Regime.PMAX, 5)
        data = sample_gk_power(hop.data, RandomStream(4).generator, 5)
        assert np.allclose(capped, 10.0 * data, rtol=1e-15)

    def test_auto_regime_rejected(self):
        with pytest.raises(ValueError):
            sample_hop_snr(ASYMMETRIC_HOPS[0], ASYMMETRIC_SYS[0], RandomStream(1), Regime.AUTO)
