"""Grid checks of the usual stochastic order and of the NBU property.

Results are grid-verified only: a universal statement over a continuum is
never proved numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ValidationError
from .quantile import QuantileDistribution

__all__ = [
    "DEFAULT_NBU_GRID",
    "DEFAULT_ORDER_TOL",
    "DEFAULT_ST_GRID",
    "OrderCheckResult",
    "is_nbu",
    "nbu_excess",
    "st_dominates",
]

DEFAULT_ST_GRID = 1024
DEFAULT_NBU_GRID = 128
DEFAULT_ORDER_TOL = 1e-10


@dataclass(frozen=True)
class OrderCheckResult:
    """Outcome of a grid check.

    ``witness`` is the grid location of the largest violation: a quantile
    level ``u`` for the stochastic order, an ``(s, t)`` pair for NBU.
    """

    holds: bool
    worst_violation: float
    witness: float | tuple[float, float]
    grid_size: int
    tolerance: float

    def __bool__(self) -> bool:
        return self.holds


def st_dominates(
    X: QuantileDistribution,
    Y: QuantileDistribution,
    grid_size: int = DEFAULT_ST_GRID,
    tol: float = DEFAULT_ORDER_TOL,
) -> OrderCheckResult:
    """Check ``X <=_st Y`` through ``Q_X(u) <= Q_Y(u) + tol`` on a ``u``-grid."""
    if grid_size < 2:
        raise ValidationError("grid_size must be at least 2")
    u = (np.arange(grid_size) + 1.0) / (grid_size + 1.0)
    with np.errstate(all="ignore"):
        excess = np.asarray(X.quantile(u), dtype=float) - np.asarray(Y.quantile(u), dtype=float)
    excess = np.where(np.isnan(excess), np.inf, excess)
    i = int(np.argmax(excess))
    worst = max(float(excess[i]), 0.0)
    return OrderCheckResult(worst <= tol, worst, float(u[i]), grid_size, tol)


def nbu_excess(X: QuantileDistribution, s, t) -> np.ndarray:
    """``S(s + t) - S(s) S(t)``; positive values violate NBU."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.asarray(X.survival(s + t)) - np.asarray(X.survival(s)) * np.asarray(X.survival(t))


def is_nbu(
    X: QuantileDistribution,
    grid_size: int = DEFAULT_NBU_GRID,
    tol: float = DEFAULT_ORDER_TOL,
    *,
    extra_points: Sequence[float] = (),
) -> OrderCheckResult:
    """Check ``S(s) S(t) >= S(s + t) - tol`` over an ``(s, t)`` product grid.

    The grid is the image under ``Q`` of ``grid_size`` equally spaced levels
    in ``[0.01, 0.99]``, optionally augmented by ``extra_points``.
    """
    if grid_size < 2:
        raise ValidationError("grid_size must be at least 2")
    if X.support_lower < 0:
        raise ValidationError(f"{X.name} is not nonnegative")
    levels = np.linspace(0.01, 0.99, grid_size)
    pts = np.concatenate([np.asarray(X.quantile(levels), dtype=float), np.asarray(extra_points, dtype=float)])
    pts = np.unique(pts)
    S, T = np.meshgrid(pts, pts, indexing="ij")
    excess = nbu_excess(X, S, T)
    i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
    worst = max(float(excess[i, j]), 0.0)
    return OrderCheckResult(worst <= tol, worst, (float(pts[i]), float(pts[j])), grid_size, tol)
