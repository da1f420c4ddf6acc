"""Dependent conditional value-at-risk toolkit.

Copula-coupled tail risk measures over parametric marginals, a seeded
Monte Carlo study harness, and GARCH(1,1)-t conditional forecasting
with out-of-sample violation backtesting.
"""

from .copula import FGM, Clayton, Frank, Gumbel, fit_mle, pseudo_observations
from .dist import GammaDist, LocationScale, MarginalModel, ParetoLomax, StudentT
from .errors import (
    BoundaryError,
    BracketError,
    ConvergenceError,
    DataError,
    DcovarError,
    DegenerateRegionError,
    DomainError,
    FitError,
    InfiniteMeanError,
    ParameterDomainError,
)
from .garch import (
    BacktestReport,
    GarchFit,
    GarchSpec,
    conditional_quantile,
    dcovar_forecast,
    filter_variance,
    fit_mle_garch,
    rolling_backtest,
)
from .numerics import QuadratureSpec, derive_rng, make_rng
from .risk import (
    AggregateParetoModel,
    ClosedFormAudit,
    DependentPair,
    RiskLevels,
    audit_closed_forms,
    ccovar,
    covar,
    dcovar_aggregate_closed,
    dcovar_copula,
    dcovar_fgm_closed,
    dcovar_joint_density,
    dcovar_quantile_form,
    joint_significance,
    mcovar,
    var,
)
from .simulate import SimReport, SimScenario, run_scenario, sweep_delta_curve

__version__ = "0.1.0"
