"""Shared numerical kernels.

Thin, contract-enforcing wrappers around scipy's adaptive quadrature
(QUADPACK), Brent root finding, bounded scalar maximization and
Nelder-Mead simplex minimization, plus the project's seeded RNG
convention (numpy PCG64 via ``default_rng``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import BracketError, ConvergenceError, DomainError

__all__ = [
    "QuadratureSpec",
    "make_rng",
    "derive_rng",
    "RNG_ALGORITHM",
    "integrate_1d",
    "integrate_2d",
    "find_root",
    "maximize_1d",
    "minimize_simplex",
]

#: Identifier of the generator family every seeded computation uses.
#: numpy guarantees stream stability for a fixed seed across platforms.
RNG_ALGORITHM = "numpy-PCG64"


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance budget for adaptive quadrature."""

    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_depth: int = 30

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")

    @property
    def limit(self) -> int:
        # QUADPACK subdivision budget; ~2 intervals per depth level.
        return max(50, 2 * self.max_depth)


DEFAULT_SPEC = QuadratureSpec()


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator; identical seed gives an identical stream everywhere."""
    return np.random.default_rng(seed)


def derive_rng(seed: int, index: int) -> np.random.Generator:
    """Child generator for grid cell ``index``; stable under parallel scheduling."""
    return np.random.default_rng((seed, index))


def integrate_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Adaptive quadrature of ``f`` on [lo, hi]; ``hi`` may be ``np.inf``.

    Raises
    ------
    ConvergenceError
        If the achieved error estimate exceeds the requested tolerance;
        the best estimate is attached to the exception.
    """
    if not lo < hi:
        raise DomainError(f"integration bounds must satisfy lo < hi, got [{lo}, {hi}]")
    out = integrate.quad(
        f, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.limit, full_output=1,
    )
    value, abserr = out[0], out[1]
    tol = max(spec.abs_tol, spec.rel_tol * abs(value))
    # QUADPACK's error estimate is conservative; allow modest slack before
    # declaring failure.
    if abserr > 100 * tol and abserr > 1e-6 * max(1.0, abs(value)):
        raise ConvergenceError(
            f"quadrature error estimate {abserr:.3e} exceeds tolerance {tol:.3e}",
            best=value,
        )
    return value


def integrate_2d(
    f: Callable[[float, float], float],
    x_lo: float,
    x_hi: float,
    y_lo: float,
    y_hi: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Tensorized adaptive quadrature of ``f(x, y)`` over a rectangle.

    The inner (y) integral runs at tolerances tightened 10x relative to
    the outer integral so inner noise does not pollute the outer error
    control. Upper limits may be infinite.
    """
    inner_spec = QuadratureSpec(
        abs_tol=spec.abs_tol / 10.0,
        rel_tol=spec.rel_tol / 10.0,
        max_depth=spec.max_depth,
    )

    def outer(x: float) -> float:
        return integrate_1d(lambda y: f(x, y), y_lo, y_hi, inner_spec)

    return integrate_1d(outer, x_lo, x_hi, spec)


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
) -> float:
    """Brent root of ``f`` on [lo, hi]; requires a sign change."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    return optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def maximize_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-8,
) -> tuple[float, float]:
    """Bounded scalar maximization; returns ``(x_star, f(x_star))``.

    A coarse grid scan seeds the bounded (golden section + parabolic)
    refinement so a mildly multimodal objective does not trap it.
    """
    if not lo < hi:
        raise DomainError(f"bounds must satisfy lo < hi, got [{lo}, {hi}]")
    grid = np.linspace(lo, hi, 33)
    vals = np.array([f(x) for x in grid])
    k = int(np.nanargmax(vals))
    b_lo = grid[max(k - 1, 0)]
    b_hi = grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        lambda x: -f(x), bounds=(b_lo, b_hi), method="bounded",
        options={"xatol": tol},
    )
    x_star, f_star = float(res.x), -float(res.fun)
    if vals[k] > f_star:
        x_star, f_star = float(grid[k]), float(vals[k])
    return x_star, f_star


def minimize_simplex(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    scale: float = 0.1,
    iters: int = 2000,
) -> tuple[np.ndarray, float]:
    """Nelder-Mead with the standard coefficients (1, 2, 0.5, 0.5).

    Returns the best point found; the best-so-far value is nonincreasing
    by construction of the algorithm.
    """
    x0 = np.asarray(x0, dtype=float)
    f0 = f(x0)
    if not np.isfinite(f0):
        raise DomainError("objective is not finite at the starting point")
    simplex = np.vstack([x0] + [x0 + scale * np.eye(len(x0))[i] for i in range(len(x0))])
    res = optimize.minimize(
        f, x0, method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxiter": iters,
            "maxfev": 4 * iters,
            "xatol": 1e-10,
            "fatol": 1e-12,
        },
    )
    if res.fun <= f0:
        return np.asarray(res.x, dtype=float), float(res.fun)
    return x0, float(f0)
