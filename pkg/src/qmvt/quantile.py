"""Distributions represented through their quantile function.

A :class:`QuantileDistribution` bundles the quantile function ``Q``, the
quantile density ``q = Q'``, the CDF, the survival function and the mean of
a univariate absolutely continuous law.  All callables are vectorized over
numpy arrays.  Where a representation is not available in closed form it is
obtained by monotone numeric inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from ._roots import grow_upper_bracket, invert_increasing
from .exceptions import DivergenceError, DomainError, ValidationError
from .quadrature import QuadResult, default_tol_quad, integrate_interval, integrate_open

__all__ = [
    "FAMILY_D_PROBE",
    "FAMILY_D_TOL",
    "QuantileDistribution",
    "integrate_survival",
    "make_degenerate_zero",
    "make_exponential",
    "make_exponential_mixture",
    "make_from_quantile",
    "make_from_survival",
    "make_uniform",
    "make_uniform01",
    "mean_via_quantile",
    "mean_via_survival",
    "residual_lifetime",
    "scaled",
]

FAMILY_D_PROBE = 1e-9
FAMILY_D_TOL = 1e-6
TAIL_NEGLIGIBLE = 1e-12
_VALIDATION_GRID = 1001
# fallback for slowly vanishing quantiles such as u**(1/3): Q must shrink
# like a positive power of u across these levels
_DECAY_PROBES = (1e-9, 1e-12, 1e-15)
_MIN_DECAY_EXPONENT = 0.05

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class QuantileDistribution:
    """A law described by its quantile function and quantile density.

    Instances are immutable.  ``mean`` is computed on first access by
    quadrature of the quantile function unless a closed form was supplied,
    and is then cached (the computation is idempotent, so concurrent first
    accesses are harmless).
    """

    quantile: Fn
    quantile_density: Fn
    cdf: Fn
    survival: Fn
    name: str = "custom"
    support_lower: float = 0.0
    mean_hint: float | None = field(default=None, repr=False)
    # optional accurate forms of v -> Q(1 - v) and v -> q(1 - v) for small v
    tail_quantile: Fn | None = field(default=None, repr=False)
    tail_quantile_density: Fn | None = field(default=None, repr=False)

    def quantile_tail(self, v):
        """``Q(1 - v)``, without forming ``1 - v`` when a tail form is available."""
        if self.tail_quantile is not None:
            return self.tail_quantile(v)
        return self.quantile(1.0 - np.asarray(v, dtype=float))

    def quantile_density_tail(self, v):
        """``q(1 - v)``; see :meth:`quantile_tail`."""
        if self.tail_quantile_density is not None:
            return self.tail_quantile_density(v)
        return self.quantile_density(1.0 - np.asarray(v, dtype=float))

    @cached_property
    def _mean_estimate(self) -> QuadResult:
        if self.mean_hint is not None:
            return QuadResult(float(self.mean_hint), 0.0)
        return integrate_open(self.quantile, default_tol_quad())

    @property
    def mean(self) -> float:
        """``E[X]``; raises :class:`DivergenceError` if the integral diverges."""
        return self._mean_estimate.value

    @property
    def mean_error(self) -> float:
        return self._mean_estimate.error_estimate

    @cached_property
    def in_family_d(self) -> bool:
        """Whether ``Q(0+) = 0`` and the mean is finite and nonzero."""
        if not _vanishes_at_zero(self.quantile):
            return False
        try:
            m = self.mean
        except DivergenceError:
            return False
        return math.isfinite(m) and abs(m) > 1e-300

    def __repr__(self) -> str:
        return f"QuantileDistribution({self.name})"


def _vanishes_at_zero(quantile: Fn) -> bool:
    with np.errstate(all="ignore"):
        q0 = abs(float(quantile(FAMILY_D_PROBE)))
        if q0 <= FAMILY_D_TOL:
            return True
        vals = [abs(float(quantile(u))) for u in _DECAY_PROBES]
    if not all(math.isfinite(v) and v > 0 for v in vals):
        return False
    decades = math.log10(_DECAY_PROBES[0] / _DECAY_PROBES[1])
    rates = [math.log10(a / b) / decades for a, b in zip(vals, vals[1:])]
    return min(rates) >= _MIN_DECAY_EXPONENT


def _support_end(X: QuantileDistribution) -> float:
    with np.errstate(all="ignore"):
        return float(X.quantile(1.0))


def make_uniform(upper: float = 1.0) -> QuantileDistribution:
    """Uniform law on ``(0, upper)``: ``Q(u) = upper * u``."""
    if not (upper > 0 and math.isfinite(upper)):
        raise ValidationError(f"uniform upper bound must be positive and finite, got {upper!r}")
    b = float(upper)

    def quantile(u):
        return b * np.asarray(u, dtype=float)

    def quantile_density(u):
        return np.full_like(np.asarray(u, dtype=float), b)

    def cdf(x):
        return np.clip(np.asarray(x, dtype=float) / b, 0.0, 1.0)

    def survival(x):
        return np.clip(1.0 - np.asarray(x, dtype=float) / b, 0.0, 1.0)

    name = "uniform01" if b == 1.0 else f"uniform{{{b!r}}}"
    return QuantileDistribution(quantile, quantile_density, cdf, survival, name, 0.0, b / 2)


def make_uniform01() -> QuantileDistribution:
    """Uniform law on ``(0, 1)``."""
    return make_uniform(1.0)


def make_exponential(rate: float) -> QuantileDistribution:
    """Exponential law with survival ``exp(-rate x)``."""
    if not (rate > 0 and math.isfinite(rate)):
        raise ValidationError(f"exponential rate must be positive and finite, got {rate!r}")
    lam = float(rate)

    def quantile(u):
        with np.errstate(divide="ignore"):
            return -np.log1p(-np.asarray(u, dtype=float)) / lam

    def quantile_density(u):
        with np.errstate(divide="ignore"):
            return 1.0 / (lam * (1.0 - np.asarray(u, dtype=float)))

    def survival(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 1.0, np.exp(-lam * np.maximum(x, 0.0)))

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 0.0, -np.expm1(-lam * np.maximum(x, 0.0)))

    def tail_quantile(v):
        with np.errstate(divide="ignore"):
            return -np.log(np.asarray(v, dtype=float)) / lam

    def tail_quantile_density(v):
        with np.errstate(divide="ignore"):
            return 1.0 / (lam * np.asarray(v, dtype=float))

    return QuantileDistribution(
        quantile,
        quantile_density,
        cdf,
        survival,
        f"exponential{{{lam!r}}}",
        0.0,
        1.0 / lam,
        tail_quantile,
        tail_quantile_density,
    )


def make_degenerate_zero() -> QuantileDistribution:
    """Point mass at zero (``Q == 0``); admitted only as a bridge endpoint."""

    def zeros(u):
        return np.zeros_like(np.asarray(u, dtype=float))

    def cdf(x):
        return np.where(np.asarray(x, dtype=float) >= 0, 1.0, 0.0)

    def survival(x):
        return np.where(np.asarray(x, dtype=float) >= 0, 0.0, 1.0)

    return QuantileDistribution(zeros, zeros, cdf, survival, "degenerate0", 0.0, 0.0)


def _validate_quantile(quantile: Fn, quantile_density: Fn, name: str) -> None:
    u = (np.arange(_VALIDATION_GRID) + 0.5) / _VALIDATION_GRID
    with np.errstate(all="ignore"):
        qv = np.asarray(quantile(u), dtype=float)
        dv = np.asarray(quantile_density(u), dtype=float)
    if not np.all(np.isfinite(qv)):
        raise ValidationError(f"{name}: quantile is not finite on the interior validation grid")
    scale = max(1.0, float(np.max(np.abs(qv))))
    if np.any(np.diff(qv) < -1e-12 * scale):
        i = int(np.argmin(np.diff(qv)))
        raise ValidationError(f"{name}: quantile decreases between u={u[i]:.6g} and u={u[i + 1]:.6g}")
    if np.any(dv < 0) or np.any(np.isnan(dv)):
        raise ValidationError(f"{name}: quantile density is negative or undefined on the grid")
    # A flat CDF segment is a jump of Q that the supplied density cannot account for.
    mid = 0.5 * (u[:-1] + u[1:])
    with np.errstate(all="ignore"):
        dm = np.asarray(quantile_density(mid), dtype=float)
    h = np.diff(u)
    simpson = h * (dv[:-1] + 4.0 * dm + dv[1:]) / 6.0
    inc = np.diff(qv)
    bad = np.abs(inc - simpson) > 1e-3 * np.abs(simpson) + 1e-8 * scale
    interior = (u[:-1] > 0.01) & (u[1:] < 0.99)
    if np.any(bad & interior):
        i = int(np.flatnonzero(bad & interior)[0])
        raise ValidationError(
            f"{name}: quantile increment on [{u[i]:.6g}, {u[i + 1]:.6g}] disagrees with the "
            "quantile density (jump in Q, i.e. a flat CDF segment, or an inconsistent density)"
        )


def make_from_quantile(
    quantile: Fn,
    quantile_density: Fn,
    domain_hint: tuple[float, float] | None = None,
    *,
    name: str = "custom",
    mean: float | None = None,
) -> QuantileDistribution:
    """Build a distribution from a user-supplied quantile function.

    The CDF is recovered by inverting ``quantile`` over ``u`` with a bracketed
    bisection/secant iteration.  ``domain_hint = (lower, upper)`` clamps the
    CDF to 0 and 1 outside the support without running the inversion.

    Raises
    ------
    ValidationError
        If the quantile is not nondecreasing, the density is negative, or the
        two disagree (flat CDF segments are rejected).
    """
    _validate_quantile(quantile, quantile_density, name)
    with np.errstate(all="ignore"):
        q_lo = float(quantile(0.0))
    lower = domain_hint[0] if domain_hint is not None else (q_lo if math.isfinite(q_lo) else -math.inf)
    upper = domain_hint[1] if domain_hint is not None else math.inf

    def cdf(x):
        x = np.asarray(x, dtype=float)
        out = invert_increasing(quantile, x, 0.0, 1.0)
        out = np.where(x <= lower, 0.0, out)
        return np.where(x >= upper, 1.0, out)

    def survival(x):
        return 1.0 - cdf(x)

    support_lower = lower if math.isfinite(lower) else -math.inf
    return QuantileDistribution(quantile, quantile_density, cdf, survival, name, support_lower, mean)


def make_from_survival(
    survival: Fn,
    density: Fn,
    *,
    support_lower: float = 0.0,
    mean: float | None = None,
    name: str = "custom",
) -> QuantileDistribution:
    """Build a distribution from its survival function and density.

    The quantile is found by inverting the survival function on a bracket
    grown geometrically from ``support_lower``.
    """
    lower = float(support_lower)

    def neg_survival(x):
        return -np.asarray(survival(x), dtype=float)

    def tail_quantile(v):
        # solve S(x) = v directly so small v keeps full precision
        v = np.asarray(v, dtype=float)
        inner = (v > 0) & (v < 1)
        out = np.where(v <= 0, math.inf, lower)
        if np.any(inner):
            t = -v[inner]
            hi = grow_upper_bracket(neg_survival, t, lower)
            out = np.array(out, dtype=float)
            out[inner] = invert_increasing(neg_survival, t, lower, hi)
        return out[()] if out.ndim == 0 else out

    def tail_quantile_density(v):
        with np.errstate(divide="ignore"):
            return 1.0 / np.asarray(density(tail_quantile(v)), dtype=float)

    def quantile(u):
        return tail_quantile(1.0 - np.asarray(u, dtype=float))

    def quantile_density(u):
        return tail_quantile_density(1.0 - np.asarray(u, dtype=float))

    def cdf(x):
        return 1.0 - np.asarray(survival(x), dtype=float)

    return QuantileDistribution(
        quantile, quantile_density, cdf, survival, name, lower, mean, tail_quantile, tail_quantile_density
    )


def make_exponential_mixture(weights: Sequence[float], rates: Sequence[float]) -> QuantileDistribution:
    """Finite mixture of exponentials, survival ``sum_i w_i exp(-r_i x)``."""
    w = np.asarray(weights, dtype=float)
    r = np.asarray(rates, dtype=float)
    if w.shape != r.shape or w.ndim != 1 or w.size == 0:
        raise ValidationError("weights and rates must be equal-length nonempty sequences")
    if np.any(w <= 0) or not math.isclose(float(w.sum()), 1.0, abs_tol=1e-12):
        raise ValidationError("mixture weights must be positive and sum to 1")
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise ValidationError("mixture rates must be positive and finite")

    def survival(x):
        x = np.asarray(x, dtype=float)
        xs = np.maximum(x, 0.0)[..., None]
        return np.where(x <= 0, 1.0, np.sum(w * np.exp(-r * xs), axis=-1))

    def density(x):
        x = np.asarray(x, dtype=float)
        xs = np.maximum(x, 0.0)[..., None]
        return np.where(x < 0, 0.0, np.sum(w * r * np.exp(-r * xs), axis=-1))

    label = ",".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(w, r))
    return make_from_survival(
        survival, density, support_lower=0.0, mean=float(np.sum(w / r)), name=f"exp_mixture{{{label}}}"
    )


def scaled(X: QuantileDistribution, c: float) -> QuantileDistribution:
    """The law of ``c X`` for ``c > 0``."""
    if not (c > 0 and math.isfinite(c)):
        raise ValidationError(f"scale factor must be positive, got {c!r}")
    c = float(c)
    mean = None if X.mean_hint is None else c * X.mean_hint
    return QuantileDistribution(
        lambda u: c * np.asarray(X.quantile(u)),
        lambda u: c * np.asarray(X.quantile_density(u)),
        lambda x: X.cdf(np.asarray(x, dtype=float) / c),
        lambda x: X.survival(np.asarray(x, dtype=float) / c),
        f"scaled{{{c!r},{X.name}}}",
        c * X.support_lower,
        mean,
        lambda v: c * np.asarray(X.quantile_tail(v)),
        lambda v: c * np.asarray(X.quantile_density_tail(v)),
    )


def residual_lifetime(X: QuantileDistribution, t: float) -> QuantileDistribution:
    """The residual lifetime ``X_t``: the law of ``X - t`` given ``X > t``.

    ``Q_t(u) = Q(1 - (1 - u) S(t)) - t`` and ``q_t(u) = S(t) q(1 - (1 - u) S(t))``
    where ``S`` is the survival function of ``X``.
    """
    if not (t >= 0 and math.isfinite(t)):
        raise ValidationError(f"residual lifetime age must be a finite t >= 0, got {t!r}")
    sbar_t = float(X.survival(t))
    if not sbar_t > 0:
        raise DomainError(f"survival of {X.name} at t={t!r} is zero; conditional law undefined")
    if t == 0.0:
        return X
    t = float(t)

    def tail_quantile(v):
        return np.asarray(X.quantile_tail(np.asarray(v, dtype=float) * sbar_t)) - t

    def tail_quantile_density(v):
        return sbar_t * np.asarray(X.quantile_density_tail(np.asarray(v, dtype=float) * sbar_t))

    def quantile(u):
        return tail_quantile(1.0 - np.asarray(u, dtype=float))

    def quantile_density(u):
        return tail_quantile_density(1.0 - np.asarray(u, dtype=float))

    def survival(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 1.0, np.asarray(X.survival(x + t)) / sbar_t)

    def cdf(x):
        return 1.0 - survival(x)

    return QuantileDistribution(
        quantile,
        quantile_density,
        cdf,
        survival,
        f"residual{{{t!r},{X.name}}}",
        max(X.support_lower - t, 0.0),
        None,
        tail_quantile,
        tail_quantile_density,
    )


def mean_via_quantile(X: QuantileDistribution, tol: float | None = None) -> float:
    """``E[X]`` as the integral of ``Q`` over ``(0, 1)``."""
    return integrate_open(X.quantile, tol).value


def integrate_survival(
    X: QuantileDistribution,
    transform: Callable[[np.ndarray], np.ndarray] | None = None,
    tol: float | None = None,
    *,
    breakpoints: Sequence[float] = (),
    max_doublings: int = 200,
) -> QuadResult:
    """``int_0^inf transform(S(x)) dx`` with an adaptive upper cutoff.

    The cutoff starts at the 0.999-quantile, doubles until the integrand
    falls below ``1e-12``, and then keeps doubling while the contribution of
    the next tail segment exceeds ``tol``.
    """
    if tol is None:
        tol = default_tol_quad()
    if X.support_lower < 0:
        raise DomainError(f"{X.name} is not nonnegative")
    transform = transform or (lambda s: s)

    def integrand(x):
        return transform(np.asarray(X.survival(x), dtype=float))

    levels = np.array([0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999])
    with np.errstate(all="ignore"):
        qs = [float(v) for v in np.atleast_1d(X.quantile(levels))]
    end = _support_end(X)
    pts = sorted({p for p in [*qs, *breakpoints, end] if math.isfinite(p) and p > 0})
    T = max(qs[-1] if math.isfinite(qs[-1]) else 1.0, 1e-12)
    n = 0
    while float(integrand(T)) >= TAIL_NEGLIGIBLE:
        T *= 2.0
        n += 1
        if n > max_doublings:
            raise DivergenceError(f"survival tail of {X.name} does not decay")
    total, err = integrate_interval(integrand, 0.0, T, tol, points=pts[:100])
    while True:
        piece, perr = integrate_interval(integrand, T, 2.0 * T, tol)
        total += piece
        err += perr
        T *= 2.0
        n += 1
        if abs(piece) <= tol:
            break
        if n > max_doublings:
            raise DivergenceError(f"tail integral of {X.name} does not converge", partial=total)
    return QuadResult(total, err)


def mean_via_survival(X: QuantileDistribution, tol: float | None = None) -> float:
    """``E[X]`` as ``int_0^inf S(t) dt`` for a nonnegative ``X``."""
    return integrate_survival(X, None, tol).value
