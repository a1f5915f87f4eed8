"""Distortion functions and distorted random variables.

A distortion ``h`` maps ``[0, 1]`` onto ``[0, 1]``, is continuous,
nondecreasing and piecewise differentiable with ``h(0) = 0`` and
``h(1) = 1``.  The distorted variable ``X_h`` has survival ``h(S(x))`` and
quantile ``Q(1 - h^{-1}(1 - u))`` where ``h^{-1}`` is the generalized
inverse ``inf{t : h(t) >= v}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ValidationError
from .quantile import QuantileDistribution, integrate_survival

__all__ = [
    "DistortedDistribution",
    "DistortionFunction",
    "compose",
    "cte_distortion",
    "distort",
    "distorted_mean",
    "dual_power_distortion",
    "identity_distortion",
    "pointwise_dominates",
    "power_distortion",
]

DOMINANCE_TOL = 1e-12

Fn = Callable[[np.ndarray], np.ndarray]


def _arr(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


@dataclass(frozen=True, eq=False)
class DistortionFunction:
    """A distortion ``h`` together with its inverse and derivatives.

    ``inverse_derivative`` is the derivative of ``h^{-1}``.  It is optional;
    when missing, ``1 / h'(h^{-1}(v))`` is used.  ``kinks`` lists the points
    of ``(0, 1)`` where ``h`` is not differentiable.
    """

    apply: Fn
    inverse: Fn
    derivative: Fn
    label: str
    inverse_derivative: Fn | None = None
    kinks: tuple[float, ...] = field(default=())

    def __call__(self, t):
        return self.apply(t)

    def inverse_slope(self, v):
        """Derivative of ``h^{-1}`` at ``v``, infinite where ``h'`` vanishes."""
        if self.inverse_derivative is not None:
            return self.inverse_derivative(v)
        with np.errstate(divide="ignore"):
            return 1.0 / _arr(self.derivative(self.inverse(v)))

    def __repr__(self) -> str:
        return f"DistortionFunction({self.label})"


def identity_distortion() -> DistortionFunction:
    def ident(t):
        return _arr(t) * 1.0

    def one(t):
        return np.ones_like(_arr(t))

    return DistortionFunction(ident, ident, one, "identity", one)


def power_distortion(alpha: float) -> DistortionFunction:
    """``h(t) = t**alpha``: the proportional hazard rate transform."""
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ValidationError(f"power distortion needs alpha > 0, got {alpha!r}")
    a = float(alpha)

    def apply(t):
        return _arr(t) ** a

    def inverse(v):
        return _arr(v) ** (1.0 / a)

    def derivative(t):
        with np.errstate(divide="ignore"):
            return a * _arr(t) ** (a - 1.0)

    def inverse_derivative(v):
        with np.errstate(divide="ignore"):
            return _arr(v) ** (1.0 / a - 1.0) / a

    return DistortionFunction(apply, inverse, derivative, f"power{{{a!r}}}", inverse_derivative)


def dual_power_distortion(m: float) -> DistortionFunction:
    """``h(t) = 1 - (1 - t)**m``: the proportional reversed hazard transform.

    For integer ``m`` the distorted variable is the maximum of ``m``
    independent copies.  Real ``m >= 1`` is accepted as well.
    """
    if not (m >= 1 and math.isfinite(m)):
        raise ValidationError(f"dual power distortion needs m >= 1, got {m!r}")
    m = float(m)

    def apply(t):
        with np.errstate(divide="ignore"):
            return -np.expm1(m * np.log1p(-_arr(t)))

    def inverse(v):
        with np.errstate(divide="ignore"):
            return -np.expm1(np.log1p(-_arr(v)) / m)

    def derivative(t):
        return m * (1.0 - _arr(t)) ** (m - 1.0)

    def inverse_derivative(v):
        with np.errstate(divide="ignore"):
            return (1.0 - _arr(v)) ** (1.0 / m - 1.0) / m

    return DistortionFunction(apply, inverse, derivative, f"dual_power{{{m!r}}}", inverse_derivative)


def cte_distortion(p: float) -> DistortionFunction:
    """``h(t) = min(t / (1 - p), 1)``, whose distorted mean is ``E[X | X > Q(p)]``.

    The generalized inverse is ``(1 - p) v``; ``h'`` is ``1/(1-p)`` left of
    the kink at ``1 - p`` (the kink itself takes the left derivative) and 0
    to its right.
    """
    if not (0 < p < 1):
        raise ValidationError(f"cte distortion needs 0 < p < 1, got {p!r}")
    p = float(p)
    c = 1.0 - p

    def apply(t):
        return np.minimum(_arr(t) / c, 1.0)

    def inverse(v):
        return c * np.clip(_arr(v), 0.0, 1.0)

    def derivative(t):
        return np.where(_arr(t) <= c, 1.0 / c, 0.0)

    def inverse_derivative(v):
        return np.full_like(_arr(v), c)

    return DistortionFunction(apply, inverse, derivative, f"cte{{{p!r}}}", inverse_derivative, (c,))


def compose(h: DistortionFunction, k: DistortionFunction) -> DistortionFunction:
    """``(h o k)(t) = h(k(t))``."""

    def apply(t):
        return h.apply(k.apply(t))

    def inverse(v):
        return k.inverse(h.inverse(v))

    def derivative(t):
        return _arr(h.derivative(k.apply(t))) * _arr(k.derivative(t))

    def inverse_derivative(v):
        return _arr(k.inverse_slope(h.inverse(v))) * _arr(h.inverse_slope(v))

    kinks = set(k.kinks)
    for point in h.kinks:
        kinks.add(float(k.inverse(point)))
    return DistortionFunction(
        apply,
        inverse,
        derivative,
        f"compose[{h.label},{k.label}]",
        inverse_derivative,
        tuple(sorted(x for x in kinks if 0 < x < 1)),
    )


@dataclass(frozen=True, eq=False)
class DistortedDistribution(QuantileDistribution):
    """``X_h``: a :class:`QuantileDistribution` carrying its base and distortion."""

    base: QuantileDistribution | None = None
    distortion: DistortionFunction | None = None

    def __repr__(self) -> str:
        return f"DistortedDistribution({self.name})"


def distort(X: QuantileDistribution, h: DistortionFunction) -> DistortedDistribution:
    """Build the distorted variable ``X_h`` with survival ``h(S(x))``.

    The quantile density follows from the chain rule applied to
    ``u -> Q(1 - h^{-1}(1 - u))``; at points where ``h'`` vanishes at
    ``h^{-1}(1 - u)`` it is infinite.
    """

    # Q_h(1 - v) = Q(1 - h^{-1}(v)); working with v = 1 - u keeps levels near 1 exact
    def tail_quantile(v):
        return X.quantile_tail(h.inverse(_arr(v)))

    def tail_quantile_density(v):
        v = _arr(v)
        return _arr(X.quantile_density_tail(h.inverse(v))) * _arr(h.inverse_slope(v))

    def quantile(u):
        return tail_quantile(1.0 - _arr(u))

    def quantile_density(u):
        return tail_quantile_density(1.0 - _arr(u))

    def survival(x):
        return h.apply(X.survival(x))

    def cdf(x):
        return 1.0 - _arr(survival(x))

    with np.errstate(all="ignore"):
        lower = float(tail_quantile(1.0))
    return DistortedDistribution(
        quantile,
        quantile_density,
        cdf,
        survival,
        f"{X.name}|{h.label}",
        lower if math.isfinite(lower) else X.support_lower,
        None,
        tail_quantile,
        tail_quantile_density,
        base=X,
        distortion=h,
    )


def distorted_mean(X: QuantileDistribution, h: DistortionFunction, tol: float | None = None) -> float:
    """``E[X_h] = int_0^inf h(S(t)) dt`` for a nonnegative base ``X``.

    Raises
    ------
    DivergenceError
        When the tail of ``h(S(t))`` does not become negligible.
    """
    kinks = []
    for k in h.kinks:
        with np.errstate(all="ignore"):
            kinks.append(float(X.quantile(1.0 - k)))
    return integrate_survival(X, h.apply, tol, breakpoints=kinks).value


def pointwise_dominates(h: DistortionFunction, l: DistortionFunction, grid_size: int = 1000) -> bool:
    """Whether ``h(t) <= l(t)`` on an interior grid of ``(0, 1)``."""
    if grid_size < 2:
        raise ValidationError("grid_size must be at least 2")
    t = (np.arange(grid_size) + 1.0) / (grid_size + 1.0)
    return bool(np.all(_arr(h.apply(t)) <= _arr(l.apply(t)) + DOMINANCE_TOL))
