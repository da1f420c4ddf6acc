import math

import numpy as np
import pytest

from dcovar.copula import Clayton, Gumbel
from dcovar.dist import StudentT
from dcovar.errors import DataError, DomainError, ParameterDomainError
from dcovar.garch import (
    GarchFit,
    GarchSpec,
    conditional_quantile,
    dcovar_forecast,
    filter_variance,
    fit_mle_garch,
    one_step_variance,
    rolling_backtest,
)
from dcovar.numerics import make_rng
from dcovar.risk import RiskLevels

TRUE = GarchSpec(kappa0=0.05, kappa1=0.05, eta=0.90, nu=7.0)


def simulate_garch(spec, n, rng, h0=None):
    """Draw a path of the volatility recursion with unit-variance t shocks."""
    innov = StudentT(spec.nu, standardized=True)
    z = np.asarray(innov.sample(rng, n))
    x = np.empty(n)
    h = spec.long_run_variance if h0 is None else h0
    for t in range(n):
        x[t] = math.sqrt(h) * z[t]
        h = spec.kappa0 + spec.kappa1 * x[t] ** 2 + spec.eta * h
    return x


def make_fit(spec, returns, h0=None):
    h = filter_variance(spec, returns, h0=h0)
    return GarchFit(spec, 0.0, h, np.asarray(returns) / np.sqrt(h))


class TestSpec:
    def test_validation(self):
        with pytest.raises(ParameterDomainError):
            GarchSpec(0.0, 0.1, 0.8, 7.0)
        with pytest.raises(ParameterDomainError):
            GarchSpec(0.1, -0.1, 0.8, 7.0)
        with pytest.raises(ParameterDomainError):
            GarchSpec(0.1, 0.3, 0.7, 7.0)
        with pytest.raises(ParameterDomainError):
            GarchSpec(0.1, 0.1, 0.8, 2.0)

    def test_long_run_variance(self):
        assert TRUE.long_run_variance == pytest.approx(0.05 / 0.05, rel=1e-12)


class TestFilter:
    def test_constant_when_memoryless(self):
        spec = GarchSpec(0.3, 0.0, 0.0, 7.0)
        h = filter_variance(spec, np.ones(50), h0=2.0)
        assert h[0] == 2.0
        assert np.allclose(h[1:], 0.3)

    def test_zero_returns_geometric_decay(self):
        # with x = 0 the recursion solves to
        # h_t = kappa0 (1 - eta^t)/(1 - eta) + eta^t h0
        spec = GarchSpec(0.1, 0.2, 0.7, 7.0)
        h0 = 5.0
        h = filter_variance(spec, np.zeros(30), h0=h0)
        t = np.arange(30)
        expect = 0.1 * (1 - 0.7**t) / (1 - 0.7) + 0.7**t * h0
        assert np.allclose(h, expect, rtol=1e-12)

    def test_split_and_resume_matches_full_pass(self):
        rng = make_rng(0)
        x = simulate_garch(TRUE, 400, rng)
        full = filter_variance(TRUE, x, h0=1.0)
        k = 150
        tail = filter_variance(TRUE, x[k:], h0=float(full[k]))
        assert np.allclose(tail, full[k:], rtol=1e-12)

    def test_one_step_consistency(self):
        x = simulate_garch(TRUE, 100, make_rng(1))
        h = filter_variance(TRUE, x, h0=1.0)
        assert one_step_variance(TRUE, x[-2], h[-2]) == pytest.approx(h[-1], rel=1e-12)

    def test_rejects_bad_input(self):
        with pytest.raises(DataError):
            filter_variance(TRUE, [])
        with pytest.raises(DataError):
            filter_variance(TRUE, [0.1, math.nan, 0.2])
        with pytest.raises(DomainError):
            filter_variance(TRUE, [0.1, 0.2], h0=0.0)


class TestFit:
    def test_parameter_recovery(self):
        x = simulate_garch(TRUE, 10_000, make_rng(8))
        fit = fit_mle_garch(x)
        assert fit.spec.kappa0 == pytest.approx(TRUE.kappa0, abs=0.03)
        assert fit.spec.kappa1 == pytest.approx(TRUE.kappa1, abs=0.03)
        assert fit.spec.eta == pytest.approx(TRUE.eta, abs=0.05)
        assert fit.spec.nu == pytest.approx(TRUE.nu, abs=2.0)

    def test_loglik_beats_generic_start(self):
        x = simulate_garch(TRUE, 2000, make_rng(9))
        fit = fit_mle_garch(x)
        start = GarchSpec(0.05 * float(np.var(x)), 0.05, 0.90, 8.0)
        h = filter_variance(start, x, h0=float(np.var(x)))
        from dcovar.garch import _std_t_loglik

        assert fit.loglik >= _std_t_loglik(x, h, start.nu) - 1e-6
        assert fit.spec.kappa1 + fit.spec.eta < 1.0

    def test_deterministic(self):
        x = simulate_garch(TRUE, 1500, make_rng(10))
        a, b = fit_mle_garch(x), fit_mle_garch(x)
        assert a.spec == b.spec and a.loglik == b.loglik

    def test_residuals_shape(self):
        x = simulate_garch(TRUE, 1000, make_rng(11))
        fit = fit_mle_garch(x)
        assert fit.filtered_h.shape == x.shape
        assert np.allclose(fit.standardized_residuals * np.sqrt(fit.filtered_h), x)

    def test_too_short(self):
        with pytest.raises(DataError):
            fit_mle_garch(np.zeros(100))


class TestConditionalQuantile:
    FIT = make_fit(TRUE, simulate_garch(TRUE, 300, make_rng(2)), h0=1.0)

    def test_median_is_zero(self):
        assert conditional_quantile(self.FIT, 10, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_monotone_in_p(self):
        qs = [conditional_quantile(self.FIT, 10, p) for p in (0.01, 0.1, 0.5, 0.9, 0.99)]
        assert all(b > a for a, b in zip(qs, qs[1:]))

    def test_scales_with_volatility(self):
        q = conditional_quantile(self.FIT, 25, 0.05)
        innov = StudentT(TRUE.nu, standardized=True)
        assert q == pytest.approx(
            math.sqrt(float(self.FIT.filtered_h[25])) * float(innov.quantile(0.05)), rel=1e-12
        )

    def test_one_step_ahead_index(self):
        n = self.FIT.filtered_h.size
        x_last = float(
            self.FIT.standardized_residuals[-1] * math.sqrt(self.FIT.filtered_h[-1])
        )
        expect_h = one_step_variance(TRUE, x_last, float(self.FIT.filtered_h[-1]))
        q = conditional_quantile(self.FIT, n, 0.05)
        innov = StudentT(TRUE.nu, standardized=True)
        assert q == pytest.approx(math.sqrt(expect_h) * float(innov.quantile(0.05)), rel=1e-12)
        with pytest.raises(DomainError):
            conditional_quantile(self.FIT, n + 1, 0.05)

    def test_coverage_on_simulated_path(self):
        # with the true parameters, standardized residuals are iid
        # unit-variance t, so empirical coverage matches p
        x = simulate_garch(TRUE, 20_000, make_rng(3), h0=TRUE.long_run_variance)
        h = filter_variance(TRUE, x, h0=TRUE.long_run_variance)
        fit = make_fit(TRUE, x, h0=TRUE.long_run_variance)
        for p in (0.05, 0.10):
            hits = np.mean(
                [x[t] <= conditional_quantile(fit, t, p) for t in range(1, 20_000, 37)]
            )
            assert hits == pytest.approx(p, abs=3 * math.sqrt(p * (1 - p) / (20_000 / 37)))


class TestDcovarForecast:
    LEVELS = RiskLevels(0.05, 0.0, 0.05, 0.0)

    def _fits(self):
        fs = make_fit(TRUE, simulate_garch(TRUE, 300, make_rng(4)), h0=1.0)
        fy = make_fit(TRUE, simulate_garch(TRUE, 300, make_rng(5)), h0=1.0)
        return fs, fy

    def test_lower_tail_monte_carlo_oracle(self):
        fs, fy = self._fits()
        cop = Clayton(2.0)
        t = 42
        val = dcovar_forecast(fs, fy, cop, self.LEVELS, t, tail="lower")
        innov = StudentT(TRUE.nu, standardized=True)
        u, v = cop.sample(make_rng(6), 3_000_000)
        keep = (u <= 0.05) & (v <= 0.05)
        sel = math.sqrt(float(fs.filtered_h[t])) * np.asarray(innov.quantile(u[keep]))
        se = sel.std(ddof=1) / math.sqrt(sel.size)
        assert val == pytest.approx(float(sel.mean()), abs=3 * se)

    def test_lower_tail_below_conditional_quantile(self):
        fs, fy = self._fits()
        val = dcovar_forecast(fs, fy, Clayton(2.0), self.LEVELS, 42, tail="lower")
        assert val <= conditional_quantile(fs, 42, 0.05)

    def test_scales_with_target_volatility(self):
        fs, fy = self._fits()
        cop = Gumbel(1.5)
        v10 = dcovar_forecast(fs, fy, cop, self.LEVELS, 10, tail="lower")
        v20 = dcovar_forecast(fs, fy, cop, self.LEVELS, 20, tail="lower")
        ratio = math.sqrt(fs.filtered_h[10] / fs.filtered_h[20])
        assert v10 == pytest.approx(v20 * ratio, rel=1e-9)

    def test_independent_of_associate_volatility(self):
        # the associate enters only through its copula rank, so its
        # volatility scale cancels from the forecast
        fs, fy = self._fits()
        fy2 = make_fit(TRUE, 3.0 * simulate_garch(TRUE, 300, make_rng(5)), h0=9.0)
        cop = Clayton(2.0)
        a = dcovar_forecast(fs, fy, cop, self.LEVELS, 15, tail="lower")
        b = dcovar_forecast(fs, fy2, cop, self.LEVELS, 15, tail="lower")
        assert a == pytest.approx(b, rel=1e-9)

    def test_upper_tail_within_conditioning_band(self):
        fs, fy = self._fits()
        lv = RiskLevels(0.9, 0.1, 0.9, 0.1)
        val = dcovar_forecast(fs, fy, Clayton(2.0), lv, 42, tail="upper")
        lo = conditional_quantile(fs, 42, lv.alpha)
        hi = conditional_quantile(fs, 42, lv.alpha1)
        assert lo <= val <= hi

    def test_bad_tail(self):
        fs, fy = self._fits()
        with pytest.raises(DomainError):
            dcovar_forecast(fs, fy, Clayton(2.0), self.LEVELS, 0, tail="middle")


@pytest.fixture(scope="module")
def series():
    rng = make_rng(14)
    u, v = Clayton(1.5).sample(rng, 800)
    innov = StudentT(7.0, standardized=True)
    zs = np.asarray(innov.quantile(u))
    zy = np.asarray(innov.quantile(v))
    xs = np.empty(800)
    ys = np.empty(800)
    hs = hy = TRUE.long_run_variance
    for t in range(800):
        xs[t] = math.sqrt(hs) * zs[t]
        ys[t] = math.sqrt(hy) * zy[t]
        hs = TRUE.kappa0 + TRUE.kappa1 * xs[t] ** 2 + TRUE.eta * hs
        hy = TRUE.kappa0 + TRUE.kappa1 * ys[t] ** 2 + TRUE.eta * hy
    return xs, ys


class TestRollingBacktest:
    LEVELS_LIST = [
        RiskLevels(0.10, 0.0, 0.10, 0.0),
        RiskLevels(0.15, 0.0, 0.15, 0.0),
        RiskLevels(0.10, 0.0, 0.15, 0.0),
        RiskLevels(0.15, 0.0, 0.10, 0.0),
    ]

    def test_report_and_determinism(self, series, tmp_path):
        xs, ys = series
        a = rolling_backtest(xs, ys, "clayton", self.LEVELS_LIST, in_sample=550)
        b = rolling_backtest(xs, ys, "clayton", self.LEVELS_LIST, in_sample=550)
        assert a.cells == b.cells
        assert a.copula_family == "clayton"
        assert a.in_sample == 550 and a.out_of_sample == 250
        out = tmp_path / "bt.csv"
        a.to_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0].startswith("#") and len(lines) == 2 + len(self.LEVELS_LIST)

    def test_exchangeable_copula_symmetric_significance(self, series):
        xs, ys = series
        rep = rolling_backtest(xs, ys, "clayton", self.LEVELS_LIST, in_sample=550)
        # C(0.10, 0.15) = C(0.15, 0.10) for an exchangeable family
        assert rep.cells[2].joint_sig_level == pytest.approx(
            rep.cells[3].joint_sig_level, rel=1e-12
        )
        assert rep.cells[0].joint_sig_level < rep.cells[1].joint_sig_level

    def test_violation_rates_reasonable(self, series):
        xs, ys = series
        rep = rolling_backtest(xs, ys, "clayton", self.LEVELS_LIST, in_sample=550)
        for cell in rep.cells:
            # the forecast is a tail mean below the alpha-quantile, so the
            # marginal violation rate must come in under alpha
            assert 0.0 <= cell.violations_pct <= cell.alpha

    def test_validation(self, series):
        xs, ys = series
        with pytest.raises(DataError):
            rolling_backtest(xs, ys[:-1], "clayton", self.LEVELS_LIST, in_sample=550)
        with pytest.raises(DomainError):
            rolling_backtest(xs, ys, "clayton", self.LEVELS_LIST, in_sample=900)
