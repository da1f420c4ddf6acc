"""Bivariate copula families: FGM, Clayton, Gumbel, Frank.

Each family exposes the copula cdf, its density, the conditional cdf
``partial_u`` (dC/du, the h-function), rectangle probability mass,
seeded sampling and maximum-likelihood fitting on pseudo-observations.
Frank is evaluated through expm1/log1p forms so that strong dependence
(|theta| >= 25) does not lose the rectangle masses to cancellation.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from scipy import stats

from .errors import BoundaryError, DomainError, FitError, ParameterDomainError
from .numerics import maximize_1d

__all__ = [
    "CopulaModel",
    "FGM",
    "Clayton",
    "Gumbel",
    "Frank",
    "FAMILIES",
    "pseudo_observations",
    "fit_mle",
]

_THETA_SEARCH_CAP = 50.0  # likelihood profiles are flat beyond this


def _as_unit(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return x


def _interior(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise BoundaryError(f"{name} must lie strictly inside (0, 1)")
    return x


def _ret(x):
    x = np.asarray(x)
    return x if x.ndim else float(x)


class CopulaModel:
    """Common surface of the bivariate copula families."""

    family: str = "base"

    def __init__(self, theta: float):
        theta = float(theta)
        self._check_theta(theta)
        self.theta = theta

    def __repr__(self):
        return f"{type(self).__name__}(theta={self.theta})"

    @classmethod
    def _check_theta(cls, theta: float) -> None:
        raise NotImplementedError

    # admissible theta interval used by the MLE search (within the
    # family domain, capped at +-_THETA_SEARCH_CAP)
    _fit_bounds: tuple[float, float] = (-_THETA_SEARCH_CAP, _THETA_SEARCH_CAP)

    def cdf(self, u, v):
        raise NotImplementedError

    def density(self, u, v):
        raise NotImplementedError

    def partial_u(self, u, v):
        """Conditional cdf of V given U=u, i.e. dC/du."""
        raise NotImplementedError

    def inverse_partial_u(self, u, w):
        """Solve ``partial_u(u, v) = w`` for v; used by conditional sampling."""
        # vectorized bisection fallback; families with closed forms override
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        lo = np.full_like(w, 1e-12)
        hi = np.full_like(w, 1.0 - 1e-12)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = self.partial_u(u, mid) < w
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def rectangle_mass(self, lo_u, hi_u, lo_v, hi_v):
        """C-measure of [lo_u, hi_u] x [lo_v, hi_v], floored at zero."""
        lo_u, hi_u = _as_unit(lo_u, "lo_u"), _as_unit(hi_u, "hi_u")
        lo_v, hi_v = _as_unit(lo_v, "lo_v"), _as_unit(hi_v, "hi_v")
        if np.any(lo_u > hi_u) or np.any(lo_v > hi_v):
            raise DomainError("rectangle bounds are inverted")
        mass = (
            self.cdf(hi_u, hi_v)
            - self.cdf(lo_u, hi_v)
            - self.cdf(hi_u, lo_v)
            + self.cdf(lo_u, lo_v)
        )
        return _ret(np.maximum(mass, 0.0))

    def sample(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        """n dependent pairs (u, v) by conditional inversion."""
        u = rng.random(n)
        w = rng.random(n)
        return u, self.inverse_partial_u(u, w)

    def sample_pair(self, rng: np.random.Generator) -> tuple[float, float]:
        u, v = self.sample(rng, 1)
        return float(u[0]), float(v[0])

    def loglik(self, uv: np.ndarray) -> float:
        uv = np.asarray(uv, dtype=float)
        with np.errstate(divide="ignore"):
            ll = np.log(self.density(uv[:, 0], uv[:, 1]))
        return float(np.sum(ll))

    @classmethod
    def fit(cls, uv: Iterable[tuple[float, float]]) -> "CopulaModel":
        """MLE of theta on pseudo-observations strictly inside (0,1)^2."""
        uv = np.asarray(list(uv) if not isinstance(uv, np.ndarray) else uv, dtype=float)
        if uv.ndim != 2 or uv.shape[1] != 2 or uv.shape[0] < 30:
            raise FitError("need at least 30 (u, v) pairs")
        if np.any(uv <= 0.0) or np.any(uv >= 1.0):
            raise FitError("pseudo-observations must lie strictly inside (0, 1)^2")
        if np.allclose(uv, uv[0], atol=1e-12):
            raise FitError("degenerate input: all pairs identical")

        def objective(theta: float) -> float:
            try:
                c = cls(theta)
            except ParameterDomainError:
                return -np.inf
            ll = c.loglik(uv)
            return ll if np.isfinite(ll) else -np.inf

        lo, hi = cls._fit_bounds
        theta_hat, ll_hat = maximize_1d(objective, lo, hi, tol=1e-7)
        if not np.isfinite(ll_hat):
            raise FitError(f"no finite likelihood found for {cls.__name__}")
        fitted = cls(theta_hat)
        fitted.fitted_loglik = ll_hat
        return fitted


class FGM(CopulaModel):
    """Farlie-Gumbel-Morgenstern, theta in [-1, 1]; theta=0 is independence."""

    family = "fgm"
    _fit_bounds = (-1.0, 1.0)

    @classmethod
    def _check_theta(cls, theta):
        if not -1.0 <= theta <= 1.0:
            raise ParameterDomainError(f"FGM theta must lie in [-1, 1], got {theta}")

    def cdf(self, u, v):
        u, v = _as_unit(u, "u"), _as_unit(v, "v")
        return _ret(u * v * (1.0 + self.theta * (1.0 - u) * (1.0 - v)))

    def density(self, u, v):
        u, v = _interior(u, "u"), _interior(v, "v")
        return _ret(1.0 + self.theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v))

    def partial_u(self, u, v):
        u, v = _as_unit(u, "u"), _as_unit(v, "v")
        return _ret(v * (1.0 + self.theta * (1.0 - 2.0 * u) * (1.0 - v)))

    def inverse_partial_u(self, u, w):
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        b = self.theta * (1.0 - 2.0 * u)
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt((1.0 + b) ** 2 - 4.0 * b * w)
            v = np.where(np.abs(b) < 1e-12, w, (1.0 + b - disc) / (2.0 * b))
        return v


class Clayton(CopulaModel):
    """Clayton Archimedean copula, theta in [-1, inf) \\ {0}."""

    family = "clayton"
    # the MLE search spans the theta=0 puncture through the independence limit
    _fit_bounds = (-0.95, _THETA_SEARCH_CAP)

    @classmethod
    def _check_theta(cls, theta):
        if theta < -1.0 or theta == 0.0:
            raise ParameterDomainError(
                f"Clayton theta must lie in [-1, inf) excluding 0, got {theta}"
            )

    def __init__(self, theta: float):
        # near-zero theta is evaluated through the independence limit to
        # keep the MLE profile continuous across the puncture
        theta = float(theta)
        if abs(theta) < 1e-8 and theta != 0.0:
            theta = math.copysign(1e-8, theta)
        super().__init__(theta)

    def cdf(self, u, v):
        u, v = _as_unit(u, "u"), _as_unit(v, "v")
        t = self.theta
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            g = u ** (-t) + v ** (-t) - 1.0
            out = np.where(g > 0.0, np.maximum(g, 1e-300) ** (-1.0 / t), 0.0)
        out = np.where((u == 0.0) | (v == 0.0), 0.0, out)
        out = np.where(u == 1.0, v * np.ones_like(out), out)
        out = np.where(v == 1.0, u * np.ones_like(out), out)
        return _ret(np.clip(out, 0.0, 1.0))

    def density(self, u, v):
        u, v = _interior(u, "u"), _interior(v, "v")
        t = self.theta
        g = u ** (-t) + v ** (-t) - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            logc = (
                np.log1p(t)
                - (t + 1.0) * (np.log(u) + np.log(v))
                - (1.0 / t + 2.0) * np.log(np.maximum(g, 1e-300))
            )
            out = np.where(g > 0.0, np.exp(logc), 0.0)
        return _ret(out)

    def partial_u(self, u, v):
        u = _interior(u, "u")
        v = _as_unit(v, "v")
        t = self.theta
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            g = u ** (-t) + v ** (-t) - 1.0
            out = np.where(
                g > 0.0,
                u ** (-t - 1.0) * np.maximum(g, 1e-300) ** (-1.0 / t - 1.0),
                0.0,
            )
        out = np.where(v == 1.0, 1.0, out)
        out = np.where(v == 0.0, 0.0, out)
        return _ret(np.clip(out, 0.0, 1.0))

    def inverse_partial_u(self, u, w):
        t = self.theta
        if t <= 0.0:
            return super().inverse_partial_u(u, w)
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        return ((w ** (-t / (1.0 + t)) - 1.0) * u ** (-t) + 1.0) ** (-1.0 / t)


class Gumbel(CopulaModel):
    """Gumbel Archimedean copula, theta in [1, inf); theta=1 is independence."""

    family = "gumbel"
    _fit_bounds = (1.0, _THETA_SEARCH_CAP)

    @classmethod
    def _check_theta(cls, theta):
        if theta < 1.0:
            raise ParameterDomainError(f"Gumbel theta must lie in [1, inf), got {theta}")

    def cdf(self, u, v):
        u, v = _as_unit(u, "u"), _as_unit(v, "v")
        t = self.theta
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            x = -np.log(u)
            y = -np.log(v)
            out = np.exp(-((x**t + y**t) ** (1.0 / t)))
        out = np.where((u == 0.0) | (v == 0.0), 0.0, out)
        return _ret(np.clip(out, 0.0, 1.0))

    def density(self, u, v):
        u, v = _interior(u, "u"), _interior(v, "v")
        t = self.theta
        x = -np.log(u)
        y = -np.log(v)
        s = x**t + y**t
        A = s ** (1.0 / t)
        c = (
            np.exp(-A)
            / (u * v)
            * (x * y) ** (t - 1.0)
            * s ** (2.0 / t - 2.0)
            * (1.0 + (t - 1.0) / A)
        )
        return _ret(c)

    def partial_u(self, u, v):
        u = _interior(u, "u")
        v = _as_unit(v, "v")
        t = self.theta
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            x = -np.log(u)
            y = -np.log(np.clip(v, 1e-300, 1.0))
            s = x**t + y**t
            out = np.exp(-(s ** (1.0 / t))) * x ** (t - 1.0) * s ** (1.0 / t - 1.0) / u
        out = np.where(v == 1.0, 1.0, out)
        out = np.where(v == 0.0, 0.0, out)
        return _ret(np.clip(out, 0.0, 1.0))

    def sample(self, rng: np.random.Generator, n: int):
        """Marshall-Olkin construction with a positive-stable frailty."""
        t = self.theta
        if t == 1.0:
            return rng.random(n), rng.random(n)
        alpha = 1.0 / t
        # Chambers-Mallows-Stuck one-sided stable with Laplace transform
        # exp(-s^alpha)
        T = rng.uniform(0.0, math.pi, n)
        W = rng.exponential(1.0, n)
        V = (
            np.sin(alpha * T)
            / np.sin(T) ** (1.0 / alpha)
            * (np.sin((1.0 - alpha) * T) / W) ** ((1.0 - alpha) / alpha)
        )
        e1 = rng.exponential(1.0, n)
        e2 = rng.exponential(1.0, n)
        u = np.exp(-((e1 / V) ** alpha))
        v = np.exp(-((e2 / V) ** alpha))
        eps = 1e-15
        return np.clip(u, eps, 1 - eps), np.clip(v, eps, 1 - eps)


class Frank(CopulaModel):
    """Frank Archimedean copula, theta != 0; theta -> 0 is independence."""

    family = "frank"
    _fit_bounds = (-_THETA_SEARCH_CAP, _THETA_SEARCH_CAP)

    @classmethod
    def _check_theta(cls, theta):
        if theta == 0.0:
            raise ParameterDomainError("Frank theta must be nonzero")

    def __init__(self, theta: float):
        theta = float(theta)
        if abs(theta) < 1e-8 and theta != 0.0:
            theta = math.copysign(1e-8, theta)
        super().__init__(theta)

    def cdf(self, u, v):
        u, v = _as_unit(u, "u"), _as_unit(v, "v")
        t = self.theta
        # 1 - e^{-t x} via expm1 keeps strong-dependence rectangle masses
        # free of cancellation
        gu = -np.expm1(-t * u)
        gv = -np.expm1(-t * v)
        g1 = -np.expm1(-t)
        out = -np.log1p(-gu * gv / g1) / t
        # restore exact uniform margins lost to rounding at large |theta|
        out = np.where(u == 1.0, v * np.ones_like(out), out)
        out = np.where(v == 1.0, u * np.ones_like(out), out)
        return _ret(np.clip(out, 0.0, 1.0))

    def density(self, u, v):
        u, v = _interior(u, "u"), _interior(v, "v")
        t = self.theta
        # denominator expanded as e^{-tu}+e^{-tv}-e^{-t}-e^{-t(u+v)} to
        # avoid subtracting near-unit quantities
        D = np.exp(-t * u) + np.exp(-t * v) - np.exp(-t) - np.exp(-t * (u + v))
        num = t * (-np.expm1(-t)) * np.exp(-t * (u + v))
        return _ret(num / (D * D))

    def partial_u(self, u, v):
        u = _interior(u, "u")
        v = _as_unit(v, "v")
        t = self.theta
        D = np.exp(-t * u) + np.exp(-t * v) - np.exp(-t) - np.exp(-t * (u + v))
        out = np.exp(-t * u) * (-np.expm1(-t * v)) / D
        return _ret(np.clip(out, 0.0, 1.0))

    def inverse_partial_u(self, u, w):
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        t = self.theta
        eu = np.exp(-t * u)
        tv = (eu * (1.0 - w) + w * np.exp(-t)) / (eu * (1.0 - w) + w)
        return -np.log(tv) / t


FAMILIES = {c.family: c for c in (FGM, Clayton, Gumbel, Frank)}


def pseudo_observations(x, y) -> np.ndarray:
    """Rank/(n+1) transform into (0,1)^2 with average ranks on ties."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-d arrays of equal length")
    n = len(x)
    u = stats.rankdata(x, method="average") / (n + 1.0)
    v = stats.rankdata(y, method="average") / (n + 1.0)
    return np.column_stack([u, v])


def fit_mle(family: str, uv) -> CopulaModel:
    """MLE fit of the named family on (u, v) pseudo-observation pairs."""
    key = family.lower()
    if key not in FAMILIES:
        raise DomainError(f"unknown copula family {family!r}; choose from {sorted(FAMILIES)}")
    return FAMILIES[key].fit(uv)
