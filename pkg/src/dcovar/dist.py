"""Parametric univariate marginals for targets, associates and innovations.

All models expose ``pdf``, ``cdf``, ``quantile`` and inverse-transform
``sample``; instances are immutable and safe to share. Heavy-tailed
Lomax with unit shape has no finite mean, and mean-based consumers
check ``has_finite_mean`` before integrating.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy import special

from .errors import DomainError, InfiniteMeanError, ParameterDomainError

__all__ = [
    "MarginalModel",
    "ParetoLomax",
    "GammaDist",
    "StudentT",
    "LocationScale",
]


class MarginalModel:
    """Common interface of the univariate loss distributions."""

    #: Lower end of the support (losses live on [support_lo, inf) unless
    #: the model is location-scale over the whole line).
    support_lo: float = -math.inf

    @property
    def has_finite_mean(self) -> bool:
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Inverse-transform sampling; reproducible given a seeded ``rng``."""
        if n < 1:
            raise DomainError("sample size must be >= 1")
        return self.quantile(rng.random(n))

    def _check_p(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(p <= 0.0) or np.any(p >= 1.0):
            raise DomainError("probability must lie strictly inside (0, 1)")
        return p


class ParetoLomax(MarginalModel):
    """Lomax (Pareto type II) loss with cdf 1 - (beta/(x+beta))^gamma.

    The shape defaults to gamma=1, the heavy-tailed case whose mean is
    infinite; gamma > 1 gives mean beta/(gamma-1).
    """

    support_lo = 0.0

    def __init__(self, beta: float, gamma: float = 1.0):
        if beta <= 0:
            raise ParameterDomainError(f"scale beta must be positive, got {beta}")
        if gamma <= 0:
            raise ParameterDomainError(f"shape gamma must be positive, got {gamma}")
        self.beta = float(beta)
        self.gamma = float(gamma)

    def __repr__(self):
        return f"ParetoLomax(beta={self.beta}, gamma={self.gamma})"

    @property
    def has_finite_mean(self) -> bool:
        return self.gamma > 1.0

    def mean(self) -> float:
        if not self.has_finite_mean:
            raise InfiniteMeanError(
                f"Lomax with shape gamma={self.gamma} <= 1 has no finite mean"
            )
        return self.beta / (self.gamma - 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            x < 0.0,
            0.0,
            self.gamma * self.beta**self.gamma / (x + self.beta) ** (self.gamma + 1.0),
        )
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0.0, 0.0, 1.0 - (self.beta / (x + self.beta)) ** self.gamma)
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_p(p)
        out = self.beta * ((1.0 - p) ** (-1.0 / self.gamma) - 1.0)
        return out if out.ndim else float(out)


class GammaDist(MarginalModel):
    """Gamma loss with shape tau and scale omega; tau=omega=1 is Exp(1)."""

    support_lo = 0.0

    def __init__(self, tau: float, omega: float = 1.0):
        if tau <= 0 or omega <= 0:
            raise ParameterDomainError(
                f"gamma parameters must be positive, got tau={tau}, omega={omega}"
            )
        self.tau = float(tau)
        self.omega = float(omega)

    def __repr__(self):
        return f"GammaDist(tau={self.tau}, omega={self.omega})"

    @property
    def has_finite_mean(self) -> bool:
        return True

    def mean(self) -> float:
        return self.tau * self.omega

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = x / self.omega
            logpdf = (
                (self.tau - 1.0) * np.log(z)
                - z
                - special.gammaln(self.tau)
                - np.log(self.omega)
            )
            out = np.where(x < 0.0, 0.0, np.exp(logpdf))
        # tau=1 density is finite (=1/omega) at the origin.
        out = np.where((x == 0.0) & (self.tau == 1.0), 1.0 / self.omega, out)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0.0, 0.0, special.gammainc(self.tau, np.maximum(x, 0.0) / self.omega))
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_p(p)
        out = self.omega * special.gammaincinv(self.tau, p)
        return out if out.ndim else float(out)


class StudentT(MarginalModel):
    """Student-t innovation with nu > 2 degrees of freedom.

    By default the variable is standardized to unit variance (the GARCH
    convention): x = t * sqrt((nu-2)/nu) for t a raw Student-t. Set
    ``standardized=False`` for the raw-t parameterization.
    """

    support_lo = -math.inf

    def __init__(self, nu: float, standardized: bool = True):
        if nu <= 2.0:
            raise ParameterDomainError(f"degrees of freedom must exceed 2, got {nu}")
        self.nu = float(nu)
        self.standardized = bool(standardized)
        self._scale = math.sqrt((self.nu - 2.0) / self.nu) if standardized else 1.0

    def __repr__(self):
        return f"StudentT(nu={self.nu}, standardized={self.standardized})"

    @property
    def has_finite_mean(self) -> bool:
        return True

    def mean(self) -> float:
        return 0.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = x / self._scale
        lognorm = (
            special.gammaln((self.nu + 1.0) / 2.0)
            - special.gammaln(self.nu / 2.0)
            - 0.5 * math.log(self.nu * math.pi)
        )
        out = np.exp(lognorm - (self.nu + 1.0) / 2.0 * np.log1p(z * z / self.nu))
        out = out / self._scale
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = special.stdtr(self.nu, x / self._scale)
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_p(p)
        out = self._scale * special.stdtrit(self.nu, p)
        return out if out.ndim else float(out)


class LocationScale(MarginalModel):
    """Affine transform ``loc + scale * Z`` of an inner marginal ``Z``."""

    def __init__(self, inner: MarginalModel, loc: float = 0.0, scale: float = 1.0):
        if scale <= 0:
            raise ParameterDomainError(f"scale must be positive, got {scale}")
        self.inner = inner
        self.loc = float(loc)
        self.scale = float(scale)

    def __repr__(self):
        return f"LocationScale({self.inner!r}, loc={self.loc}, scale={self.scale})"

    @property
    def support_lo(self) -> float:
        lo = self.inner.support_lo
        return -math.inf if lo == -math.inf else self.loc + self.scale * lo

    @property
    def has_finite_mean(self) -> bool:
        return self.inner.has_finite_mean

    def mean(self) -> float:
        return self.loc + self.scale * self.inner.mean()

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self.inner.pdf((x - self.loc) / self.scale) / self.scale
        return out if np.ndim(out) else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self.inner.cdf((x - self.loc) / self.scale)
        return out if np.ndim(out) else float(out)

    def quantile(self, p):
        out = self.loc + self.scale * np.asarray(self.inner.quantile(p))
        return out if out.ndim else float(out)
