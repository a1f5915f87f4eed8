"""Vectorized inversion of monotone functions.

Bisection is alternated with regula-falsi (secant) steps, so the bracket at
least halves every two iterations while smooth problems converge quickly.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DivergenceError

_MAX_DOUBLINGS = 1100


def invert_increasing(func, target, lo, hi, *, xtol=4e-16, maxiter=400):
    """Return ``inf{x in [lo, hi] : func(x) >= target}`` elementwise.

    ``func`` must be nondecreasing and vectorized.  The caller guarantees
    ``func(lo) < target <= func(hi)``; entries violating the left condition
    return ``lo`` and entries violating the right one return ``hi``.
    """
    target = np.asarray(target, dtype=float)
    shape = target.shape
    target = target.ravel()
    lo = np.broadcast_to(np.asarray(lo, dtype=float), shape).ravel().copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), shape).ravel().copy()
    with np.errstate(all="ignore"):
        flo = func(lo) - target
        fhi = func(hi) - target
    done = (flo >= 0) | (fhi < 0)
    out = np.where(flo >= 0, lo, hi)

    active = ~done
    it = 0
    while active.any() and it < maxiter:
        idx = np.flatnonzero(active)
        a, b = lo[idx], hi[idx]
        fa, fb = flo[idx], fhi[idx]
        mid = 0.5 * (a + b)
        if it % 2:
            with np.errstate(all="ignore"):
                sec = b - fb * (b - a) / (fb - fa)
            ok = np.isfinite(sec) & (sec > a) & (sec < b)
            x = np.where(ok, sec, mid)
        else:
            x = mid
        with np.errstate(all="ignore"):
            fx = func(x) - target[idx]
        right = fx >= 0
        hi[idx] = np.where(right, x, b)
        fhi[idx] = np.where(right, fx, fb)
        lo[idx] = np.where(right, a, x)
        flo[idx] = np.where(right, fa, fx)
        width = hi[idx] - lo[idx]
        conv = (width <= xtol * np.maximum(1.0, np.abs(hi[idx]))) | (fx == 0)
        fin = idx[conv]
        out[fin] = hi[fin]
        active[fin] = False
        it += 1
    out[active] = hi[active]
    return out.reshape(shape)


def grow_upper_bracket(func, target, lower, *, start=1.0):
    """Grow ``hi`` geometrically from ``lower`` until ``func(hi) >= target``."""
    target = np.asarray(target, dtype=float)
    step = np.full(target.shape, float(start))
    hi = lower + step
    with np.errstate(all="ignore"):
        need = func(hi) < target
    n = 0
    while np.any(need):
        if n >= _MAX_DOUBLINGS:
            raise DivergenceError("could not bracket the quantile; survival does not decay")
        step = np.where(need, 2.0 * step, step)
        hi = lower + step
        with np.errstate(all="ignore"):
            need = func(hi) < target
        n += 1
    return hi
