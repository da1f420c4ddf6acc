import csv
import math

import numpy as np
import pytest

from dcovar.copula import FGM, Clayton, Frank, Gumbel
from dcovar.dist import ParetoLomax
from dcovar.errors import DomainError
from dcovar.risk import DependentPair, RiskLevels, mcovar
from dcovar.simulate import (
    CSV_SCHEMA_VERSION,
    SimScenario,
    run_scenario,
    sweep_delta_curve,
)

PAIR = DependentPair(ParetoLomax(1.5), ParetoLomax(1.5), Clayton(7.0))

# alpha outer, delta inner: the layout of the published study tables
GRID = [
    RiskLevels(al, 0.1, de, 0.1)
    for al in (0.90, 0.95)
    for de in (0.90, 0.925, 0.95)
]

# two-decimal percentage significance columns of the three study tables,
# in grid order; these are deterministic given theta
SIG_CLAYTON = [2.79, 2.13, 1.43, 1.43, 1.12, 0.77]
SIG_GUMBEL = [6.61, 5.14, 2.91, 2.91, 3.17, 2.99]
SIG_FRANK = [4.42, 3.41, 2.21, 2.21, 1.91, 1.41]

# published violation percentages for the Clayton grid; a fresh seed lands
# in the same binomial neighbourhood, not on the same draw
VIOL_CLAYTON = [1.83, 1.27, 0.73, 1.17, 0.80, 0.40]


def scenario(seed=42, copula=None, n_obs=3000):
    pair = PAIR if copula is None else DependentPair(PAIR.target, PAIR.associate, copula)
    return SimScenario(pair=pair, levels_grid=GRID, n_obs=n_obs, seed=seed)


class TestDeterminism:
    def test_reports_identical_for_same_seed(self):
        a = run_scenario(scenario(seed=7))
        b = run_scenario(scenario(seed=7))
        assert a.cells == b.cells

    def test_violations_move_with_seed(self):
        a = run_scenario(scenario(seed=1))
        b = run_scenario(scenario(seed=2))
        assert any(
            x.violations_count != y.violations_count for x, y in zip(a.cells, b.cells)
        )

    def test_deterministic_columns_ignore_seed(self):
        a = run_scenario(scenario(seed=1))
        b = run_scenario(scenario(seed=2))
        for x, y in zip(a.cells, b.cells):
            assert x.joint_sig_level == y.joint_sig_level
            assert x.dcovar_value == y.dcovar_value
            assert x.mcovar_value == y.mcovar_value


class TestStudyTables:
    @pytest.mark.parametrize(
        "copula,expected",
        [(Clayton(7.0), SIG_CLAYTON), (Gumbel(6.3), SIG_GUMBEL), (Frank(25.0), SIG_FRANK)],
        ids=["clayton", "gumbel", "frank"],
    )
    def test_significance_columns(self, copula, expected):
        report = run_scenario(scenario(copula=copula))
        got = [100.0 * c.joint_sig_level for c in report.cells]
        assert got == pytest.approx(expected, abs=0.01)

    def test_clayton_violations_within_binomial_band(self):
        report = run_scenario(scenario(seed=42))
        for cell, pub in zip(report.cells, VIOL_CLAYTON):
            p = pub / 100.0
            sd = math.sqrt(p * (1 - p) / 3000)
            assert abs(cell.violations_pct - p) <= 3 * sd

    def test_violation_rate_tracks_rectangle_probability(self):
        # with a large sample the empirical rate must sit near the true
        # probability of {S >= forecast} within the associate band
        report = run_scenario(scenario(seed=3, n_obs=200_000))
        for cell in report.cells:
            assert 0.0 < cell.violations_pct < cell.joint_sig_level
            sd = math.sqrt(cell.violations_pct * (1 - cell.violations_pct) / 200_000)
            assert cell.violations_pct > cell.joint_sig_level / 10

    def test_forecast_between_conditioning_quantiles(self):
        report = run_scenario(scenario())
        m = PAIR.target
        for cell in report.cells:
            lv = RiskLevels(cell.alpha, cell.a, cell.delta, cell.d)
            assert float(m.quantile(lv.alpha)) <= cell.dcovar_value
            assert cell.dcovar_value <= float(m.quantile(lv.alpha1))


class TestDeltaSweep:
    DELTAS = np.linspace(0.85, 0.97, 7)

    def test_truncated_column_constant(self):
        rows = sweep_delta_curve(PAIR, 0.9, 0.1, 0.1, self.DELTAS)
        base = mcovar(PAIR.target, 0.9, 0.1)
        assert all(abs(r[2] - base) < 1e-10 for r in rows)

    def test_dependent_forecast_nondecreasing_under_clayton(self):
        rows = sweep_delta_curve(PAIR, 0.9, 0.1, 0.1, self.DELTAS)
        vals = [r[1] for r in rows]
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))

    def test_independence_collapses_to_truncated_column(self):
        pair = DependentPair(PAIR.target, PAIR.associate, FGM(0.0))
        rows = sweep_delta_curve(pair, 0.9, 0.1, 0.1, self.DELTAS)
        assert all(r[1] == pytest.approx(r[2], rel=1e-8) for r in rows)

    def test_rejects_bad_grid(self):
        with pytest.raises(DomainError):
            sweep_delta_curve(PAIR, 0.9, 0.1, 0.1, [0.5, 1.0])


class TestCsv:
    def test_schema_and_values(self, tmp_path):
        out = tmp_path / "report.csv"
        run_scenario(scenario(seed=42)).to_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0] == f"# {CSV_SCHEMA_VERSION}"
        rows = list(csv.DictReader(lines[1:]))
        assert len(rows) == len(GRID)
        first = rows[0]
        assert first["copula"] == "clayton"
        assert float(first["theta"]) == 7.0
        assert first["joint_sig_pct"] == "2.79"
        assert int(first["violations"]) >= 0
        # full-precision repr columns round-trip exactly
        assert float(first["alpha"]) == 0.9
        assert float(first["dcovar"]) == run_scenario(scenario(seed=42)).cells[0].dcovar_value

    def test_byte_identical_reruns(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run_scenario(scenario(seed=11)).to_csv(p1)
        run_scenario(scenario(seed=11)).to_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestValidation:
    def test_small_sample_rejected(self):
        with pytest.raises(DomainError):
            SimScenario(pair=PAIR, levels_grid=GRID, n_obs=10)

    def test_empty_grid_rejected(self):
        with pytest.raises(DomainError):
            SimScenario(pair=PAIR, levels_grid=[])

    def test_unknown_associate_kind(self):
        with pytest.raises(DomainError):
            SimScenario(pair=PAIR, levels_grid=GRID, associate_kind="matrix")
