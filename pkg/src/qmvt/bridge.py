"""Bridge distributions on (0, 1) built from two stochastically ordered laws.

For ``X <=_st Y`` the bridge ``Z`` has density ``(Q_Y - Q_X) / (E[Y] - E[X])``
on ``(0, 1)``.  With ``X`` the point mass at zero this is the Lorenz-curve
distribution of ``Y``.  The CDF is tabulated once at construction on nodes
clustered towards both endpoints, so evaluation and sampling are read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distortion import DistortionFunction, distort, pointwise_dominates
from .exceptions import DegenerateBridgeError, DomainError, HypothesisError, SamplingRefusedError
from .order import OrderCheckResult, is_nbu, st_dominates
from .quadrature import default_tol_quad, gauss_legendre, integrate_interval
from .quantile import QuantileDistribution, make_degenerate_zero, residual_lifetime

__all__ = [
    "BridgeDistribution",
    "bridge",
    "distorted_bridge",
    "lorenz",
    "mass_gap_is_degenerate",
    "nbu_bridge",
    "sample",
]

TABLE_INTERVALS = 4096
_TABLE_GL = 16
_LOCAL_GL = 8
_NEWTON_STEPS = 6


def mass_gap_is_degenerate(lower: QuantileDistribution, upper: QuantileDistribution) -> bool:
    gap = upper.mean - lower.mean
    scale = max(1.0, abs(lower.mean), abs(upper.mean))
    return not gap > max(1e-12 * scale, 2.0 * (lower.mean_error + upper.mean_error))


@dataclass(frozen=True, eq=False)
class BridgeDistribution:
    """Absolutely continuous law on ``(0, 1)`` with CDF ``L_{X,Y}``."""

    lower: QuantileDistribution
    upper: QuantileDistribution
    mass_gap: float
    mass_gap_error: float
    st_order: OrderCheckResult
    label: str
    _nodes: np.ndarray = field(repr=False)
    _cum: np.ndarray = field(repr=False)

    @property
    def sampleable(self) -> bool:
        return self.st_order.holds

    def numerator(self, x):
        """``Q_Y(x) - Q_X(x)``."""
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.asarray(self.upper.quantile(x), dtype=float) - np.asarray(self.lower.quantile(x), dtype=float)

    def density(self, x):
        return self.numerator(x) / self.mass_gap

    def _local_mass(self, a, x):
        # integral of the density from node a to x; intervals are short and interior
        nodes, weights = gauss_legendre(_LOCAL_GL)
        a = np.asarray(a, dtype=float)
        x = np.asarray(x, dtype=float)
        width = x - a
        pts = a[..., None] + width[..., None] * nodes
        return width * np.sum(self.density(pts) * weights, axis=-1)

    def cdf(self, p):
        """``L_{X,Y}(p)``; clamps to 0 below the support and to the total mass above."""
        p = np.asarray(p, dtype=float)
        k = np.clip(np.searchsorted(self._nodes, p, side="right") - 1, 0, TABLE_INTERVALS - 1)
        pc = np.clip(p, 0.0, 1.0)
        out = self._cum[k] + self._local_mass(self._nodes[k], pc)
        out = np.where(p <= 0.0, 0.0, out)
        out = np.where(p >= 1.0, self._cum[-1], out)
        return out[()] if out.ndim == 0 else out

    def ppf(self, v):
        """Inverse of :meth:`cdf` by table lookup and safeguarded Newton steps."""
        if not self.sampleable:
            raise SamplingRefusedError(f"bridge {self.label} has negative density; inversion refused")
        v = np.clip(np.asarray(v, dtype=float), 0.0, self._cum[-1])
        shape = v.shape
        v = v.ravel()
        k = np.clip(np.searchsorted(self._cum, v, side="right") - 1, 0, TABLE_INTERVALS - 1)
        a0 = self._nodes[k]
        lo, hi = a0.copy(), self._nodes[k + 1].copy()
        ca, cb = self._cum[k], self._cum[k + 1]
        with np.errstate(all="ignore"):
            frac = np.where(cb > ca, (v - ca) / (cb - ca), 0.0)
        x = lo + np.clip(frac, 0.0, 1.0) * (hi - lo)
        for _ in range(_NEWTON_STEPS):
            resid = ca + self._local_mass(a0, x) - v
            lo = np.where(resid < 0, x, lo)
            hi = np.where(resid > 0, x, hi)
            with np.errstate(all="ignore"):
                step = x - resid / self.density(x)
            bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
            x = np.where(resid == 0, x, np.where(bad, 0.5 * (lo + hi), step))
        return x.reshape(shape)

    def mean(self) -> float:
        """``E[Z]`` by Gauss-Legendre over the table intervals."""
        nodes, weights = gauss_legendre(_TABLE_GL)
        a, b = self._nodes[:-1], self._nodes[1:]
        pts = a[:, None] + (b - a)[:, None] * nodes
        return float(np.sum((b - a) * np.sum(pts * self.density(pts) * weights, axis=-1)))


def _cluster_nodes(n: int) -> np.ndarray:
    nodes = 0.5 * (1.0 - np.cos(np.pi * np.arange(n + 1) / n))
    nodes[0], nodes[-1] = 0.0, 1.0
    return nodes


def _tabulate(numerator, gap: float, tol: float) -> np.ndarray:
    nodes = _cluster_nodes(TABLE_INTERVALS)
    gl_x, gl_w = gauss_legendre(_TABLE_GL)
    a, b = nodes[:-1], nodes[1:]
    pts = a[:, None] + (b - a)[:, None] * gl_x
    masses = (b - a) * np.sum(numerator(pts) * gl_w, axis=-1)
    # end intervals may carry integrable endpoint singularities
    for i in (0, TABLE_INTERVALS - 1):
        masses[i] = integrate_interval(numerator, a[i], b[i], tol * 1e-3).value
    return np.concatenate([[0.0], np.cumsum(masses)]) / gap


def bridge(
    X: QuantileDistribution,
    Y: QuantileDistribution,
    *,
    label: str | None = None,
    tol: float | None = None,
) -> BridgeDistribution:
    """Bridge between ``X`` (lower) and ``Y`` (upper).

    Raises
    ------
    DegenerateBridgeError
        If ``E[Y] - E[X]`` is not positive.

    A violation of ``Q_X <= Q_Y`` on the order grid does not raise; it is
    carried in ``st_order`` and disables sampling.
    """
    if tol is None:
        tol = default_tol_quad()
    if mass_gap_is_degenerate(X, Y):
        raise DegenerateBridgeError(
            f"mass gap E[{Y.name}] - E[{X.name}] = {Y.mean - X.mean!r} is not positive"
        )
    gap = Y.mean - X.mean
    gap_err = X.mean_error + Y.mean_error
    order = st_dominates(X, Y)

    def numerator(x):
        with np.errstate(all="ignore"):
            return np.asarray(Y.quantile(x), dtype=float) - np.asarray(X.quantile(x), dtype=float)

    cum = _tabulate(numerator, gap, tol)
    return BridgeDistribution(
        X,
        Y,
        gap,
        gap_err,
        order,
        label or f"bridge[{X.name},{Y.name}]",
        _cluster_nodes(TABLE_INTERVALS),
        cum,
    )


def lorenz(X: QuantileDistribution, *, tol: float | None = None) -> BridgeDistribution:
    """The Lorenz-curve distribution ``X^L`` with density ``Q(u) / E[X]``."""
    if not X.in_family_d:
        raise DomainError(f"{X.name} is not in family D (needs Q(0+) = 0 and a finite nonzero mean)")
    return bridge(make_degenerate_zero(), X, label=f"lorenz[{X.name}]", tol=tol)


def distorted_bridge(
    X: QuantileDistribution,
    h: DistortionFunction,
    l: DistortionFunction,
    *,
    tol: float | None = None,
) -> BridgeDistribution:
    """Bridge between ``X_h`` and ``X_l`` for distortions with ``h <= l``."""
    if not pointwise_dominates(h, l):
        raise HypothesisError(f"{h.label} does not lie below {l.label} on (0, 1)")
    return bridge(distort(X, h), distort(X, l), label=f"distorted[{X.name};{h.label},{l.label}]", tol=tol)


def nbu_bridge(
    X: QuantileDistribution,
    h: DistortionFunction,
    t: float,
    *,
    tol: float | None = None,
) -> BridgeDistribution:
    """Bridge between ``(X_t)_h`` (lower) and ``X_h`` (upper) for an NBU base."""
    check = is_nbu(X)
    if not check.holds:
        raise HypothesisError(
            f"{X.name} is not NBU on the check grid (violation {check.worst_violation:.3g} at {check.witness})"
        )
    if not (t > 0 and math.isfinite(t)):
        raise HypothesisError(f"age t must be positive, got {t!r}")
    lower = distort(residual_lifetime(X, t), h)
    upper = distort(X, h)
    return bridge(lower, upper, label=f"nbu[{X.name};{h.label},t={t!r}]", tol=tol)


def sample(B: BridgeDistribution, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` values from ``B`` by inverse-transform sampling.

    Uniform deviates come from a Philox (counter-based) generator keyed by
    ``seed``, so the stream is reproducible.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if not B.sampleable:
        raise SamplingRefusedError(f"bridge {B.label} violates the stochastic order; sampling refused")
    if count == 0:
        return np.empty(0)
    rng = np.random.Generator(np.random.Philox(seed))
    return B.ppf(rng.random(count))
