"""Smooth test functions ``g`` on (0, 1) with analytic derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exceptions import ArityError, ValidationError

__all__ = [
    "MAX_ORDER",
    "TestFunction",
    "constant",
    "exponential",
    "linear",
    "monomial",
    "sine_half_pi",
]

MAX_ORDER = 5

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class TestFunction:
    """``g`` together with ``g', g'', ..., g^(n)``.

    ``derivatives[k - 1]`` is the k-th derivative.
    """

    __test__ = False  # keep pytest from collecting this class

    value: Fn
    derivatives: tuple[Fn, ...]
    label: str

    def __call__(self, u):
        return self.value(u)

    @property
    def order(self) -> int:
        return len(self.derivatives)

    def derivative(self, k: int = 1) -> Fn:
        if k < 1:
            raise ValueError("derivative order starts at 1")
        if k > self.order:
            raise ArityError(f"{self.label} supplies derivatives up to order {self.order}, not {k}")
        return self.derivatives[k - 1]

    def at_one(self) -> float:
        """The one-sided limit ``g(1-)``."""
        with np.errstate(all="ignore"):
            v = float(self.value(1.0))
        if not math.isfinite(v):
            v = float(self.value(1.0 - 1e-9))
        if not math.isfinite(v):
            raise ValidationError(f"{self.label} has no finite limit at 1")
        return v


def _from_sequence(value: Fn, derivatives: Sequence[Fn], label: str) -> TestFunction:
    return TestFunction(value, tuple(derivatives), label)


def monomial(k: int) -> TestFunction:
    """``g(u) = u**k`` for an integer ``k >= 0``."""
    if int(k) != k or k < 0:
        raise ValidationError(f"monomial degree must be a nonnegative integer, got {k!r}")
    k = int(k)

    def term(j: int) -> Fn:
        if j > k:
            return lambda u: np.zeros_like(np.asarray(u, dtype=float))
        coef = math.factorial(k) / math.factorial(k - j)
        power = k - j
        return lambda u: coef * np.asarray(u, dtype=float) ** power

    return _from_sequence(term(0), [term(j) for j in range(1, MAX_ORDER + 1)], f"monomial{{{k}}}")


def exponential() -> TestFunction:
    """``g(u) = exp(u)``."""

    def f(u):
        return np.exp(np.asarray(u, dtype=float))

    return _from_sequence(f, [f] * MAX_ORDER, "exp")


def sine_half_pi() -> TestFunction:
    """``g(u) = sin(pi u / 2)``."""
    w = math.pi / 2

    def term(j: int) -> Fn:
        return lambda u: w**j * np.sin(w * np.asarray(u, dtype=float) + j * w)

    return _from_sequence(term(0), [term(j) for j in range(1, MAX_ORDER + 1)], "sin_half_pi")


def constant(c: float = 1.0) -> TestFunction:
    c = float(c)

    def zero(u):
        return np.zeros_like(np.asarray(u, dtype=float))

    return _from_sequence(lambda u: np.full_like(np.asarray(u, dtype=float), c), [zero] * MAX_ORDER, f"constant{{{c!r}}}")


def linear(c: float = 1.0) -> TestFunction:
    """``g(u) = c u``, so ``g' == c``."""
    c = float(c)

    def zero(u):
        return np.zeros_like(np.asarray(u, dtype=float))

    return _from_sequence(
        lambda u: c * np.asarray(u, dtype=float),
        [lambda u: np.full_like(np.asarray(u, dtype=float), c)] + [zero] * (MAX_ORDER - 1),
        f"linear{{{c!r}}}",
    )
