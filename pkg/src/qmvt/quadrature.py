"""Adaptive integration over the open unit interval.

Every expectation over ``U ~ Uniform(0, 1)`` in this package reduces to
:func:`integrate_open`.  The integrand is pulled back through the smoothing
map ``u = s**2 (3 - 2 s)``, whose derivative ``6 s (1 - s)`` vanishes at both
ends, so integrable endpoint singularities such as ``(1 - u)**-0.5`` or
``log(1 - u)`` become bounded (or much weaker) before being handed to the
QUADPACK ``qags`` routine, which adds Wynn-epsilon extrapolation on top.
The endpoints themselves are never evaluated.
"""

from __future__ import annotations

import math
import os
import warnings
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .exceptions import DivergenceError, ValidationError

DEFAULT_TOL_QUAD = 1e-9
DEFAULT_TOL_IDENTITY = 1e-6
MAX_SUBDIVISIONS = 2**20

# QUADPACK ier codes: 1 subdivision limit, 2 roundoff, 3 bad integrand,
# 4 extrapolation roundoff, 5 divergent or very slowly convergent.
_FATAL_IER = {1, 3, 5}
# roundoff-flagged results (ier 2 or 4) are accepted only if the error estimate
# stays within this factor of the requested accuracy
_ROUNDOFF_SLACK = 1e3

__all__ = [
    "DEFAULT_TOL_IDENTITY",
    "DEFAULT_TOL_QUAD",
    "QuadResult",
    "default_tol_quad",
    "gauss_legendre",
    "integrate_interval",
    "integrate_open",
]


class QuadResult(NamedTuple):
    value: float
    error_estimate: float


def default_tol_quad() -> float:
    """Quadrature tolerance, overridable through ``QMVT_TOL_QUAD``."""
    raw = os.environ.get("QMVT_TOL_QUAD")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL_QUAD
    try:
        tol = float(raw)
    except ValueError:
        tol = math.nan
    if not (tol > 0 and math.isfinite(tol)):
        raise ValidationError(f"QMVT_TOL_QUAD must be a positive number, got {raw!r}")
    return tol


def _call_scalar(f: Callable, u: float) -> float:
    return float(np.asarray(f(u), dtype=float))


def _run_quad(func, a, b, tol, limit, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            func, a, b, epsabs=tol, epsrel=tol, limit=limit, points=points, full_output=1
        )
    value, err = out[0], out[1]
    ier = 0 if len(out) == 3 else _ier_from_message(out)
    return value, err, ier


def _ier_from_message(out) -> int:
    # quad only returns the message tuple entry when ier > 0; the infodict
    # does not carry ier itself, so decode the message text.
    message = str(out[3]).lower() if len(out) > 3 else ""
    if "maximum number of subdivisions" in message:
        return 1
    if "roundoff error is detected in the extrapolation" in message:
        return 4
    if "roundoff" in message:
        return 2
    if "divergent" in message or "slowly convergent" in message:
        return 5
    return 3


def _failed(value: float, err: float, ier: int, tol: float) -> bool:
    if ier in _FATAL_IER or not (math.isfinite(value) and math.isfinite(err)):
        return True
    return ier != 0 and err > _ROUNDOFF_SLACK * max(tol, tol * abs(value))


def integrate_open(
    f: Callable[[float], float],
    tol: float | None = None,
    *,
    limit: int = 2000,
) -> QuadResult:
    """Integrate ``f`` over ``(0, 1)`` without evaluating the endpoints.

    Parameters
    ----------
    f : callable
        Scalar integrand on ``(0, 1)``; may be unbounded at either endpoint
        provided it is integrable.
    tol : float, optional
        Absolute and relative target accuracy.  Defaults to
        :func:`default_tol_quad`.
    limit : int
        Maximum number of subintervals (capped at ``MAX_SUBDIVISIONS``).

    Returns
    -------
    QuadResult
        ``(value, error_estimate)``.

    Raises
    ------
    DivergenceError
        If the subdivision limit is hit or the integral appears divergent.
    """
    if tol is None:
        tol = default_tol_quad()
    limit = min(int(limit), MAX_SUBDIVISIONS)

    def pulled_back(s: float) -> float:
        u = s * s * (3.0 - 2.0 * s)
        if u <= 0.0 or u >= 1.0:
            return 0.0
        fu = _call_scalar(f, u)
        return fu * 6.0 * s * (1.0 - s)

    value, err, ier = _run_quad(pulled_back, 0.0, 1.0, tol, limit)
    if _failed(value, err, ier, tol):
        raise DivergenceError(
            f"integral over (0, 1) did not converge (QUADPACK ier={ier}, "
            f"value={value!r}, error estimate={err!r})",
            partial=value,
            error_estimate=err,
        )
    return QuadResult(value, err)


def integrate_interval(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float | None = None,
    *,
    points=None,
    limit: int = 2000,
) -> QuadResult:
    """Integrate a scalar function over a finite ``[a, b]``."""
    if tol is None:
        tol = default_tol_quad()
    if b <= a:
        return QuadResult(0.0, 0.0)
    if points is not None:
        points = [p for p in points if a < p < b] or None
    value, err, ier = _run_quad(lambda x: _call_scalar(f, x), a, b, tol, limit, points)
    if _failed(value, err, ier, tol):
        raise DivergenceError(
            f"integral over [{a}, {b}] did not converge (QUADPACK ier={ier})",
            partial=value,
            error_estimate=err,
        )
    return QuadResult(value, err)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[order]
