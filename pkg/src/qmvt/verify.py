"""Numerical verification of the quantile-based Taylor and mean value identities.

Each ``verify_*`` function evaluates both sides of an identity by adaptive
quadrature and returns a :class:`VerificationReport`.  Hypotheses (family D
membership, stochastic order, NBU, positive mass gap) are checked on grids
and recorded.  A failed hypothesis does not stop the evaluation; the report
then documents how far the identity is off.

For the mean value identity with lower law ``X`` and upper law ``Y``::

    E[(g(1) - g(U)) (q_Y(U) - q_X(U))] = E[g'(Z)] (E[Y] - E[X])

where ``Z`` is the bridge between ``X`` and ``Y``.  Integration by parts
shows the left side misses ``(g(1) - g(0)) (Q_Y(0+) - Q_X(0+))`` when the two
laws do not both start at 0; that quantity is kept in
``VerificationReport.boundary_term``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .bridge import BridgeDistribution, bridge, lorenz, mass_gap_is_degenerate
from .distortion import DistortionFunction, distort, pointwise_dominates
from .exceptions import DegenerateBridgeError, DomainError, ValidationError
from .order import is_nbu, st_dominates
from .quadrature import DEFAULT_TOL_IDENTITY, default_tol_quad, integrate_open
from .quantile import QuantileDistribution, make_degenerate_zero, residual_lifetime
from .testfunctions import TestFunction

__all__ = [
    "MonteCarloEstimate",
    "VerificationReport",
    "monte_carlo_check",
    "run_scenario",
    "verify_mvt",
    "verify_taylor",
    "verify_theorem1",
    "verify_theorem2",
]

MIN_MC_SAMPLES = 100
MC_SIGMAS = 4.0


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    samples: int

    def to_dict(self) -> dict[str, Any]:
        return {"estimate": _num(self.estimate), "stderr": _num(self.stderr), "samples": self.samples}


@dataclass(frozen=True)
class VerificationReport:
    """Both sides of one identity, their residual, and the checks behind them.

    ``lhs_alt`` is an independent second evaluation of the left side (the
    closed-form quantile-density quotients of the distorted identities);
    ``boundary_term`` is ``(g(1) - g(0)) (Q_Y(0+) - Q_X(0+))``, zero whenever
    both laws start at the origin.
    """

    lhs: float
    rhs: float
    lhs_err: float
    rhs_err: float
    hypothesis_checks: tuple[tuple[str, bool], ...]
    scenario: dict[str, Any]
    tol_quad: float = 1e-9
    tol_identity: float = DEFAULT_TOL_IDENTITY
    lhs_alt: float | None = None
    boundary_term: float = 0.0
    mc_lhs: MonteCarloEstimate | None = None
    mc_rhs: MonteCarloEstimate | None = None
    mc_skipped: str | None = None

    @property
    def residual_abs(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def residual_rel(self) -> float:
        return self.residual_abs / max(abs(self.lhs), abs(self.rhs), 1e-300)

    @property
    def identity_holds(self) -> bool:
        return self.residual_abs <= max(self.tol_identity, 3.0 * (self.lhs_err + self.rhs_err))

    @property
    def lhs_routes_agree(self) -> bool:
        return self.lhs_alt is None or abs(self.lhs - self.lhs_alt) <= 2.0 * self.tol_quad

    @property
    def verified(self) -> bool:
        return self.identity_holds and self.lhs_routes_agree

    @property
    def hypotheses_hold(self) -> bool:
        return all(ok for _, ok in self.hypothesis_checks)

    @property
    def mc_agrees(self) -> bool | None:
        """Whether each quadrature side lies within 4 standard errors of its MC estimate."""
        if self.mc_lhs is None or self.mc_rhs is None:
            return None
        return _within(self.lhs, self.lhs_err, self.mc_lhs) and _within(self.rhs, self.rhs_err, self.mc_rhs)

    def to_dict(self) -> dict[str, Any]:
        if self.mc_lhs is not None and self.mc_rhs is not None:
            mc: dict[str, Any] | None = {"lhs": self.mc_lhs.to_dict(), "rhs": self.mc_rhs.to_dict()}
        elif self.mc_skipped is not None:
            mc = {"skipped": self.mc_skipped}
        else:
            mc = None
        return {
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "residual_abs": _num(self.residual_abs),
            "residual_rel": _num(self.residual_rel),
            "lhs_err": _num(self.lhs_err),
            "rhs_err": _num(self.rhs_err),
            "mc": mc,
            "hypothesis_checks": [{"name": n, "pass": ok} for n, ok in self.hypothesis_checks],
            "scenario": self.scenario,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), allow_nan=False, **kwargs)


def _num(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _within(value: float, err: float, mc: MonteCarloEstimate) -> bool:
    return abs(value - mc.estimate) <= MC_SIGMAS * mc.stderr + 3.0 * err + 1e-12


def _is_point_mass_at_zero(X: QuantileDistribution) -> bool:
    u = np.linspace(0.001, 0.999, 64)
    return bool(np.all(np.asarray(X.quantile(u)) == 0.0))


def _family_d(X: QuantileDistribution) -> bool:
    return X.in_family_d or _is_point_mass_at_zero(X)


def _start(X: QuantileDistribution) -> float:
    with np.errstate(all="ignore"):
        return float(X.quantile(0.0))


# ---------------------------------------------------------------------------
# mean value identity machinery


@dataclass
class _Identity:
    """Ingredients of one instance of the mean value identity."""

    lower: QuantileDistribution
    upper: QuantileDistribution
    g: TestFunction
    checks: list[tuple[str, bool]]
    scenario: dict[str, Any]
    lhs_alt_density: Callable | None = None
    bridge: BridgeDistribution | None = None
    notes: list[str] = field(default_factory=list)

    def delta_q(self, u):
        return np.asarray(self.upper.quantile_density(u)) - np.asarray(self.lower.quantile_density(u))

    def lhs_integrand(self, u):
        g1 = self.g.at_one()
        return (g1 - np.asarray(self.g(u))) * self.delta_q(u)

    def lhs_alt_integrand(self, u):
        g1 = self.g.at_one()
        return (g1 - np.asarray(self.g(u))) * np.asarray(self.lhs_alt_density(u))


def _pair_checks(lower, upper, grid_size, prefix=("lower", "upper")) -> list[tuple[str, bool]]:
    return [
        (f"family-D({prefix[0]})", _family_d(lower)),
        (f"family-D({prefix[1]})", _family_d(upper)),
        ("st-order", st_dominates(lower, upper, grid_size).holds),
        ("mass-gap", not mass_gap_is_degenerate(lower, upper)),
    ]


def _attach_bridge(ident: _Identity, tol: float) -> None:
    try:
        ident.bridge = bridge(ident.lower, ident.upper, tol=tol)
    except DegenerateBridgeError as exc:
        ident.notes.append(str(exc))


def _evaluate(ident: _Identity, tol_quad: float, tol_identity: float) -> VerificationReport:
    lhs, lhs_err = integrate_open(ident.lhs_integrand, tol_quad)
    lhs_alt = None
    if ident.lhs_alt_density is not None:
        lhs_alt = integrate_open(ident.lhs_alt_integrand, tol_quad).value
    dg = ident.g.derivative(1)
    B = ident.bridge
    if B is not None:
        e_g, e_err = integrate_open(lambda x: np.asarray(dg(x)) * B.density(x), tol_quad)
        rhs = e_g * B.mass_gap
        rhs_err = e_err * B.mass_gap + abs(e_g) * B.mass_gap_error
    else:
        # no proper bridge (gap <= 0): evaluate E[g'(Z)] * gap in unnormalized form
        rhs, rhs_err = integrate_open(
            lambda x: np.asarray(dg(x)) * (np.asarray(ident.upper.quantile(x)) - np.asarray(ident.lower.quantile(x))),
            tol_quad,
        )
    g1 = ident.g.at_one()
    g0 = float(ident.g(0.0))
    offset = _start(ident.upper) - _start(ident.lower)
    boundary = (g1 - g0) * offset if offset != 0.0 else 0.0
    return VerificationReport(
        lhs,
        rhs,
        lhs_err,
        rhs_err,
        tuple(ident.checks),
        ident.scenario,
        tol_quad,
        tol_identity,
        lhs_alt,
        boundary,
    )


def _mvt_identity(X, Y, g, *, grid_size, tol_quad, scenario=None) -> _Identity:
    scen = scenario or {"construction": {"mvt": {"lower": X.name, "upper": Y.name}}, "test_function": g.label}
    ident = _Identity(X, Y, g, _pair_checks(X, Y, grid_size), scen)
    _attach_bridge(ident, tol_quad)
    return ident


def _theorem1_identity(X, h, l, g, *, grid_size, tol_quad, scenario=None) -> _Identity:
    Xh, Xl = distort(X, h), distort(X, l)
    checks = [
        ("nonnegative", X.support_lower >= 0),
        ("family-D(X)", X.in_family_d),
        ("dominance", pointwise_dominates(h, l, grid_size)),
    ]
    checks += _pair_checks(Xh, Xl, grid_size, ("X_h", "X_l"))

    def closed_form(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            wl = np.asarray(l.inverse(1.0 - u))
            wh = np.asarray(h.inverse(1.0 - u))
            ql = np.asarray(X.quantile_density(1.0 - wl)) / np.asarray(l.derivative(wl))
            qh = np.asarray(X.quantile_density(1.0 - wh)) / np.asarray(h.derivative(wh))
        return ql - qh

    scen = scenario or {
        "base_distribution": X.name,
        "construction": {"theorem1": {"h": h.label, "l": l.label}},
        "test_function": g.label,
    }
    ident = _Identity(Xh, Xl, g, checks, scen, closed_form)
    _attach_bridge(ident, tol_quad)
    return ident


def _theorem2_identity(X, h, t, g, *, grid_size, tol_quad, scenario=None) -> _Identity:
    sbar_t = float(X.survival(t))
    if not sbar_t > 0:
        raise DomainError(f"survival of {X.name} at t={t!r} is zero")
    nbu = is_nbu(X)
    Xh = distort(X, h)
    Xth = distort(residual_lifetime(X, t), h)
    # a vanishing gap (memoryless base) is an error; a negative one is diagnosed below
    if mass_gap_is_degenerate(Xth, Xh) and mass_gap_is_degenerate(Xh, Xth):
        raise DegenerateBridgeError(
            f"E[X_h] - E[(X_t)_h] = {Xh.mean - Xth.mean!r} for {X.name}; the identity is degenerate"
        )
    checks = [("NBU", nbu.holds), ("nonnegative", X.support_lower >= 0)]
    checks += _pair_checks(Xth, Xh, grid_size, ("(X_t)_h", "X_h"))

    def closed_form(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.asarray(h.inverse(1.0 - u))
            dh = np.asarray(h.derivative(w))
            upper = np.asarray(X.quantile_density(1.0 - w)) / dh
            lower = sbar_t * np.asarray(X.quantile_density(1.0 - w * sbar_t)) / dh
        return upper - lower

    scen = scenario or {
        "base_distribution": X.name,
        "construction": {"theorem2": {"h": h.label, "t": t}},
        "test_function": g.label,
    }
    ident = _Identity(Xth, Xh, g, checks, scen, closed_form)
    _attach_bridge(ident, tol_quad)
    return ident


def _resolve_tols(tol_quad, tol_identity):
    return (default_tol_quad() if tol_quad is None else tol_quad,
            DEFAULT_TOL_IDENTITY if tol_identity is None else tol_identity)


def verify_mvt(
    X: QuantileDistribution,
    Y: QuantileDistribution,
    g: TestFunction,
    *,
    tol_quad: float | None = None,
    tol_identity: float | None = None,
    grid_size: int = 1024,
    scenario: dict | None = None,
) -> VerificationReport:
    """Check ``E[(g(1)-g(U))(q_Y(U)-q_X(U))] = E[g'(Z)](E[Y]-E[X])``.

    When ``E[Y] <= E[X]`` no bridge exists; the right side is then evaluated
    as ``int g'(x) (Q_Y(x) - Q_X(x)) dx`` and the mass-gap check fails.
    """
    tol_quad, tol_identity = _resolve_tols(tol_quad, tol_identity)
    ident = _mvt_identity(X, Y, g, grid_size=grid_size, tol_quad=tol_quad, scenario=scenario)
    return _evaluate(ident, tol_quad, tol_identity)


def verify_theorem1(
    X: QuantileDistribution,
    h: DistortionFunction,
    l: DistortionFunction,
    g: TestFunction,
    *,
    tol_quad: float | None = None,
    tol_identity: float | None = None,
    grid_size: int = 1024,
    scenario: dict | None = None,
) -> VerificationReport:
    """Mean value identity for the distorted pair ``X_h <=_st X_l``.

    The left side is evaluated twice: from the chain-rule quantile densities
    of the distorted variables, and from the quotients
    ``q(1 - l^{-1}(1-u)) / l'(l^{-1}(1-u)) - q(1 - h^{-1}(1-u)) / h'(h^{-1}(1-u))``.
    """
    tol_quad, tol_identity = _resolve_tols(tol_quad, tol_identity)
    ident = _theorem1_identity(X, h, l, g, grid_size=grid_size, tol_quad=tol_quad, scenario=scenario)
    return _evaluate(ident, tol_quad, tol_identity)


def verify_theorem2(
    X: QuantileDistribution,
    h: DistortionFunction,
    t: float,
    g: TestFunction,
    *,
    tol_quad: float | None = None,
    tol_identity: float | None = None,
    grid_size: int = 1024,
    scenario: dict | None = None,
) -> VerificationReport:
    """Mean value identity for ``(X_t)_h <=_st X_h`` with an NBU base ``X``.

    Raises
    ------
    DegenerateBridgeError
        If ``E[X_h] = E[(X_t)_h]`` (e.g. the memoryless exponential).  A
        negative gap, possible when ``X`` is not NBU, is evaluated in
        diagnostic mode instead.
    """
    tol_quad, tol_identity = _resolve_tols(tol_quad, tol_identity)
    ident = _theorem2_identity(X, h, t, g, grid_size=grid_size, tol_quad=tol_quad, scenario=scenario)
    return _evaluate(ident, tol_quad, tol_identity)


def verify_taylor(
    X: QuantileDistribution,
    g: TestFunction,
    n: int,
    *,
    tol_quad: float | None = None,
    tol_identity: float | None = None,
    factorials: bool = True,
    scenario: dict | None = None,
) -> VerificationReport:
    """Quantile-based Taylor expansion of order ``n``.

    ``lhs = E[(g(1) - g(U)) q(U)]`` and
    ``rhs = sum_{k<n} E[g^(k)(U) (1-U)^k q(U)] / k!
    + E[g^(n)(X^L) (1-X^L)^(n-1)] E[X] / (n-1)!``.
    ``factorials=False`` drops the ``1/k!`` on the summed terms, which is the
    uncorrected form of the expansion; it is kept for comparison only.
    """
    tol_quad, tol_identity = _resolve_tols(tol_quad, tol_identity)
    if int(n) != n or n < 1:
        raise ValidationError(f"Taylor order must be an integer >= 1, got {n!r}")
    n = int(n)
    gn = g.derivative(n)
    if not X.in_family_d:
        raise DomainError(f"{X.name} is not in family D")
    g1 = g.at_one()
    lhs, lhs_err = integrate_open(lambda u: (g1 - np.asarray(g(u))) * np.asarray(X.quantile_density(u)), tol_quad)
    rhs, rhs_err = 0.0, 0.0
    for k in range(1, n):
        gk = g.derivative(k)
        coef = 1.0 / math.factorial(k) if factorials else 1.0
        v, e = integrate_open(
            lambda u, gk=gk, k=k: np.asarray(gk(u)) * (1.0 - u) ** k * np.asarray(X.quantile_density(u)), tol_quad
        )
        rhs += coef * v
        rhs_err += coef * e
    XL = lorenz(X, tol=tol_quad)
    v, e = integrate_open(lambda x: np.asarray(gn(x)) * (1.0 - x) ** (n - 1) * XL.density(x), tol_quad)
    coef = XL.mass_gap / math.factorial(n - 1)
    rhs += coef * v
    rhs_err += coef * e + abs(v) * XL.mass_gap_error / math.factorial(n - 1)
    scen = scenario or {
        "base_distribution": X.name,
        "construction": {"taylor": {"n": n}},
        "test_function": g.label,
    }
    return VerificationReport(
        lhs, rhs, lhs_err, rhs_err, (("family-D(X)", True),), scen, tol_quad, tol_identity
    )


# ---------------------------------------------------------------------------
# scenarios and Monte Carlo


def _identity_for(scenario) -> _Identity | None:
    num = scenario.numerics
    kw = dict(grid_size=num.grid_size, tol_quad=num.tol_quad, scenario=scenario.raw)
    g = scenario.test_function
    p = scenario.params
    if scenario.kind == "mvt":
        return _mvt_identity(p["lower"], p["upper"], g, **kw)
    if scenario.kind == "theorem1":
        return _theorem1_identity(scenario.base, p["h"], p["l"], g, **kw)
    if scenario.kind == "theorem2":
        return _theorem2_identity(scenario.base, p["h"], p["t"], g, **kw)
    if scenario.kind == "lorenz" or (scenario.kind == "taylor" and p["n"] == 1):
        X = scenario.base
        ident = _mvt_identity(make_degenerate_zero(), X, g, **kw)
        ident.checks = [("family-D(X)", X.in_family_d)]
        return ident
    return None


def run_scenario(scenario) -> VerificationReport:
    """Run the verification a parsed :class:`~qmvt.scenario.Scenario` describes.

    Monte Carlo is added when ``numerics.mc_samples`` is positive.
    """
    num = scenario.numerics
    if num.mc_samples:
        return monte_carlo_check(scenario, num.mc_samples, num.seed)
    if scenario.kind == "taylor":
        return verify_taylor(
            scenario.base,
            scenario.test_function,
            scenario.params["n"],
            tol_quad=num.tol_quad,
            tol_identity=num.tol_identity,
            scenario=scenario.raw,
        )
    return _evaluate(_identity_for(scenario), num.tol_quad, num.tol_identity)


def _mc_mean(values: np.ndarray) -> MonteCarloEstimate:
    n = values.size
    est = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return MonteCarloEstimate(est, se, n)


def monte_carlo_check(scenario, samples: int, seed: int) -> VerificationReport:
    """Quadrature report plus Monte Carlo estimates of both sides.

    The left side averages ``(g(1) - g(U)) (q_Y(U) - q_X(U))`` over uniform
    deviates; the right side averages ``g'(Z)`` over bridge samples and
    multiplies by the mass gap.  The two streams come from independent
    Philox generators derived from ``seed``.
    """
    if samples < MIN_MC_SAMPLES:
        raise ValidationError(f"Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {samples}")
    num = scenario.numerics
    if scenario.kind == "taylor" and scenario.params["n"] > 1:
        report = verify_taylor(
            scenario.base,
            scenario.test_function,
            scenario.params["n"],
            tol_quad=num.tol_quad,
            tol_identity=num.tol_identity,
            scenario=scenario.raw,
        )
        return _replace(report, mc_skipped="Taylor expansions of order > 1 have no bridge sampler")
    ident = _identity_for(scenario)
    report = _evaluate(ident, num.tol_quad, num.tol_identity)
    B = ident.bridge
    if B is None:
        return _replace(report, mc_skipped="; ".join(ident.notes) or "no bridge")
    if not B.sampleable:
        return _replace(report, mc_skipped="bridge density is negative (stochastic order fails); sampling refused")
    ss_lhs, ss_rhs = np.random.SeedSequence(seed).spawn(2)
    u = np.random.Generator(np.random.Philox(ss_lhs)).random(samples)
    with np.errstate(all="ignore"):
        lhs_vals = np.asarray(ident.lhs_integrand(u), dtype=float)
    z = B.ppf(np.random.Generator(np.random.Philox(ss_rhs)).random(samples))
    rhs_vals = np.asarray(ident.g.derivative(1)(z), dtype=float) * B.mass_gap
    return _replace(report, mc_lhs=_mc_mean(lhs_vals), mc_rhs=_mc_mean(rhs_vals))


def _replace(report: VerificationReport, **changes) -> VerificationReport:
    from dataclasses import replace

    return replace(report, **changes)
