import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from dcovar.dist import GammaDist, LocationScale, ParetoLomax, StudentT
from dcovar.errors import DomainError, InfiniteMeanError, ParameterDomainError
from dcovar.numerics import make_rng

P_GRID = np.linspace(0.001, 0.999, 41)

MODELS = [
    ParetoLomax(1.5),
    ParetoLomax(1.0, 3.0),
    GammaDist(1.0),
    GammaDist(2.5, 0.7),
    StudentT(6.4188),
    StudentT(5.0, standardized=False),
    LocationScale(StudentT(7.0), loc=0.3, scale=2.0),
]


class TestClosedForms:
    def test_lomax_pdf_at_zero(self):
        # differentiating F(x) = 1 - beta/(x+beta) gives beta/(x+beta)^2
        assert ParetoLomax(1.5).pdf(0.0) == pytest.approx(1 / 1.5, rel=1e-12)

    def test_exponential_pdf_at_zero(self):
        assert GammaDist(1.0).pdf(0.0) == pytest.approx(1.0)

    def test_student_t_pdf_normalization(self):
        # constant fixed by numerically integrating the unnormalized kernel
        assert StudentT(6.4188, standardized=False).pdf(0.0) == pytest.approx(
            0.3837617508946992, rel=1e-9
        )
        assert StudentT(6.4188).pdf(0.0) == pytest.approx(0.46252630398674616, rel=1e-9)

    def test_lomax_cdf(self):
        assert ParetoLomax(1.5).cdf(13.5) == pytest.approx(0.9, rel=1e-12)

    def test_cdf_clamps_below_support(self):
        assert ParetoLomax(1.5).cdf(-1e9) == 0.0
        assert GammaDist(2.0).cdf(-3.0) == 0.0

    def test_exponential_median(self):
        assert GammaDist(1.0).cdf(math.log(2)) == pytest.approx(0.5, rel=1e-12)

    def test_lomax_var_quantiles(self):
        m = ParetoLomax(1.5)
        assert m.quantile(0.9) == pytest.approx(13.5, rel=1e-12)
        assert m.quantile(0.95) == pytest.approx(28.5, rel=1e-12)

    def test_student_t_median(self):
        assert StudentT(6.0).quantile(0.5) == pytest.approx(0.0, abs=1e-12)


class TestInvariants:
    @pytest.mark.parametrize("m", MODELS, ids=repr)
    def test_quantile_roundtrip(self, m):
        q = m.quantile(P_GRID)
        assert np.max(np.abs(np.asarray(m.cdf(q)) - P_GRID)) < 1e-9

    @pytest.mark.parametrize("m", MODELS, ids=repr)
    def test_pdf_matches_cdf_derivative(self, m):
        xs = np.asarray(m.quantile(np.linspace(0.05, 0.95, 19)))
        eps = 1e-6
        fd = (np.asarray(m.cdf(xs + eps)) - np.asarray(m.cdf(xs - eps))) / (2 * eps)
        assert np.max(np.abs(fd - np.asarray(m.pdf(xs)))) < 1e-6

    @pytest.mark.parametrize("m", MODELS, ids=repr)
    def test_cdf_monotone(self, m):
        xs = np.asarray(m.quantile(np.linspace(0.01, 0.99, 50)))
        assert np.all(np.diff(np.asarray(m.cdf(xs))) >= 0)

    @given(p=st.floats(0.001, 0.999))
    @settings(max_examples=50, deadline=None)
    def test_lomax_roundtrip_property(self, p):
        m = ParetoLomax(2.0, 1.5)
        assert m.cdf(m.quantile(p)) == pytest.approx(p, abs=1e-9)

    def test_unit_shape_lomax_refuses_mean(self):
        with pytest.raises(InfiniteMeanError):
            ParetoLomax(1.5).mean()
        assert not ParetoLomax(1.5).has_finite_mean
        assert ParetoLomax(1.0, 3.0).mean() == pytest.approx(0.5)


class TestSampling:
    def test_lomax_ks(self):
        m = ParetoLomax(1.5)
        x = m.sample(make_rng(0), 3000)
        stat = stats.kstest(x, m.cdf).statistic
        # 1% critical value of the one-sample KS statistic
        assert stat < 1.63 / math.sqrt(3000)

    def test_determinism(self):
        m = GammaDist(2.0)
        assert np.array_equal(m.sample(make_rng(5), 100), m.sample(make_rng(5), 100))

    def test_exponential_mean_clt(self):
        x = GammaDist(1.0).sample(make_rng(1), 100_000)
        # 3 sigma / sqrt(n) band around the unit mean
        assert abs(float(np.mean(x)) - 1.0) < 0.02

    def test_bad_sample_size(self):
        with pytest.raises(DomainError):
            ParetoLomax(1.0).sample(make_rng(0), 0)


class TestValidation:
    def test_bad_params(self):
        with pytest.raises(ParameterDomainError):
            ParetoLomax(-1.0)
        with pytest.raises(ParameterDomainError):
            ParetoLomax(1.0, 0.0)
        with pytest.raises(ParameterDomainError):
            GammaDist(0.0)
        with pytest.raises(ParameterDomainError):
            StudentT(2.0)
        with pytest.raises(ParameterDomainError):
            LocationScale(StudentT(5.0), scale=0.0)

    def test_quantile_domain(self):
        with pytest.raises(DomainError):
            ParetoLomax(1.0).quantile(0.0)
        with pytest.raises(DomainError):
            ParetoLomax(1.0).quantile(1.0)


class TestLocationScale:
    def test_affine_quantiles(self):
        inner = StudentT(6.0)
        m = LocationScale(inner, loc=1.0, scale=3.0)
        assert m.quantile(0.9) == pytest.approx(1.0 + 3.0 * float(inner.quantile(0.9)))

    def test_density_scaling(self):
        inner = GammaDist(2.0)
        m = LocationScale(inner, loc=0.0, scale=2.0)
        assert m.pdf(4.0) == pytest.approx(inner.pdf(2.0) / 2.0)
