"""Built-in regression suite and erratum checks for the worked examples.

Each erratum check evaluates a stated formula next to the one derived from
the general definitions and raises a flag when they disagree.  Nothing is
hard-coded as "wrong": a flag is raised only by a numerical discrepancy.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Any

import numpy as np

from .bridge import nbu_bridge
from .distortion import cte_distortion, distort, distorted_mean, dual_power_distortion, power_distortion
from .quadrature import integrate_interval, integrate_open
from .quantile import make_exponential, make_uniform01
from .scenario import parse_scenario
from .testfunctions import monomial
from .verify import VerificationReport, run_scenario, verify_taylor

__all__ = ["ErratumFlag", "SUITE", "SuiteRow", "erratum_flags", "run_suite", "suite_report"]


def _s(base, construction, g, **numerics) -> dict[str, Any]:
    out: dict[str, Any] = {"construction": construction, "test_function": g}
    if base is not None:
        out["base_distribution"] = base
    if numerics:
        out["numerics"] = numerics
    return out


# (label, scenario tree); order is the report order
SUITE: tuple[tuple[str, dict[str, Any]], ...] = (
    ("power pair uniform a=2 b=1", _s("uniform01", {"theorem1": {"h": "power{2}", "l": "power{1}"}}, "monomial{2}")),
    ("power pair uniform a=3 b=1", _s("uniform01", {"theorem1": {"h": "power{3}", "l": "power{1}"}}, "monomial{2}")),
    ("power pair exponential a=2 b=1", _s("exponential{1}", {"theorem1": {"h": "power{2}", "l": "power{1}"}}, "exp")),
    ("power pair scaled uniform c=2", _s("scaled{2,uniform01}", {"theorem1": {"h": "power{2}", "l": "power{1}"}}, "monomial{2}")),
    ("maxima exponential n=1 m=2", _s("exponential{1}", {"theorem1": {"h": "dual_power{1}", "l": "dual_power{2}"}}, "monomial{2}")),
    ("maxima exponential n=2 m=3", _s("exponential{1}", {"theorem1": {"h": "dual_power{2}", "l": "dual_power{3}"}}, "monomial{2}")),
    ("maxima exponential n=1 m=3", _s("exponential{1}", {"theorem1": {"h": "dual_power{1}", "l": "dual_power{3}"}}, "linear{1}")),
    ("cte aged uniform p=0.25 t=0.5", _s("uniform01", {"theorem2": {"h": "cte{0.25}", "t": 0.5}}, "monomial{2}")),
    ("cte aged uniform p=0.5 t=0.5", _s("uniform01", {"theorem2": {"h": "cte{0.5}", "t": 0.5}}, "monomial{2}")),
    ("cte aged uniform p=0.75 t=0.5", _s("uniform01", {"theorem2": {"h": "cte{0.75}", "t": 0.5}}, "monomial{2}")),
    ("distorted uniform dual_power 1 vs 3", _s("uniform01", {"theorem1": {"h": "dual_power{1}", "l": "dual_power{3}"}}, "exp")),
    ("distorted exponential power 3 vs 2", _s("exponential{2}", {"theorem1": {"h": "power{3}", "l": "power{2}"}}, "sin_half_pi")),
    ("aged uniform identity t=0.5", _s("uniform01", {"theorem2": {"h": "identity", "t": 0.5}}, "monomial{1}")),
    ("aged uniform power 2 t=0.3", _s("uniform01", {"theorem2": {"h": "power{2}", "t": 0.3}}, "monomial{2}")),
    ("aged uniform dual_power 2 t=0.25", _s("uniform01", {"theorem2": {"h": "dual_power{2}", "t": 0.25}}, "exp")),
    ("mvt uniform01 vs uniform 2", _s(None, {"mvt": {"lower": "uniform01", "upper": "uniform{2}"}}, "monomial{2}")),
    ("mvt exponential 2 vs 1", _s(None, {"mvt": {"lower": "exponential{2}", "upper": "exponential{1}"}}, "sin_half_pi")),
    ("mvt quantile_power 2 vs uniform01", _s(None, {"mvt": {"lower": "quantile_power{2}", "upper": "uniform01"}}, "monomial{3}")),
    ("taylor uniform u^3 n=1", _s("uniform01", {"taylor": {"n": 1}}, "monomial{3}")),
    ("taylor uniform u^3 n=2", _s("uniform01", {"taylor": {"n": 2}}, "monomial{3}")),
    ("taylor uniform u^3 n=3", _s("uniform01", {"taylor": {"n": 3}}, "monomial{3}")),
    ("taylor exponential u^2 n=2", _s("exponential{1}", {"taylor": {"n": 2}}, "monomial{2}")),
)


@dataclass(frozen=True)
class SuiteRow:
    label: str
    report: VerificationReport
    seconds: float


@dataclass(frozen=True)
class ErratumFlag:
    """A stated formula compared with its derived counterpart.

    ``stated`` and ``derived`` are the two numbers compared; ``raised`` is
    true when they differ by more than ``tolerance``.
    """

    key: str
    description: str
    stated: float
    derived: float
    tolerance: float

    @property
    def raised(self) -> bool:
        return not abs(self.stated - self.derived) <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "description": self.description,
            "stated": self.stated,
            "derived": self.derived,
            "raised": self.raised,
        }


def run_suite(labels: tuple[str, ...] | None = None) -> list[SuiteRow]:
    rows = []
    for label, tree in SUITE:
        if labels is not None and label not in labels:
            continue
        t0 = time.perf_counter()
        report = run_scenario(parse_scenario(tree))
        rows.append(SuiteRow(label, report, time.perf_counter() - t0))
    return rows


def _taylor_factorials() -> ErratumFlag:
    X, g = make_uniform01(), monomial(3)
    stated = verify_taylor(X, g, 3, factorials=False).rhs
    derived = verify_taylor(X, g, 3).lhs
    return ErratumFlag(
        "taylor-factorials",
        "Taylor sum stated without 1/k! on the summed terms (uniform01, u^3, n=3: rhs vs lhs)",
        stated,
        derived,
        1e-8,
    )


def _distorted_pair_mean_order() -> ErratumFlag:
    # stated hypothesis E[X_l] < E[X_h]; with h <= l the derived order is E[X_h] <= E[X_l]
    X = make_uniform01()
    h, l = power_distortion(2), power_distortion(1)
    gap = distorted_mean(X, l) - distorted_mean(X, h)
    stated_sign = -1.0  # E[X_l] - E[X_h] < 0 as stated
    return ErratumFlag(
        "distorted-pair-mean-order",
        "hypothesis stated as E[X_l] < E[X_h] although h <= l forces E[X_h] <= E[X_l] (sign of the gap)",
        stated_sign,
        math.copysign(1.0, gap),
        0.0,
    )


def _power_pair_integral_swap() -> ErratumFlag:
    # stated: E[X_l] = int S^alpha with l(t) = t^beta; uniform base, alpha=2, beta=1
    X = make_uniform01()
    alpha, beta = 2.0, 1.0
    stated = integrate_interval(lambda x: (1.0 - x) ** alpha, 0.0, 1.0).value
    derived = distorted_mean(X, power_distortion(beta))
    return ErratumFlag(
        "power-pair-integral-swap",
        "E[X_l] stated as the integral of S^alpha; l(t)=t^beta gives the integral of S^beta (alpha=2, beta=1)",
        stated,
        derived,
        1e-9,
    )


def _maxima_lhs_simplification() -> ErratumFlag:
    # stated exponential integrand (1/m) / (U^{-1/m} - 1) against q_l(U) for l = dual_power(m)
    X = make_exponential(1.0)
    m, u = 2.0, 0.3
    stated = (1.0 / m) / (u ** (-1.0 / m) - 1.0)
    derived = float(distort(X, dual_power_distortion(m)).quantile_density(u))
    return ErratumFlag(
        "maxima-lhs-simplification",
        "exponential lhs term stated as (1/m)/(U^(-1/m)-1); the quantile density is that divided by lambda*U (m=2, U=0.3)",
        stated,
        derived,
        1e-9,
    )


def _cte_density_sign() -> ErratumFlag:
    p, t = 0.5, 0.5
    stated = integrate_interval(lambda x: 2.0 * (1.0 + (1.0 - p) * (1.0 - x)) / (1.0 + p), 0.0, 1.0).value
    B = nbu_bridge(make_uniform01(), cte_distortion(p), t)
    derived = integrate_open(B.density).value
    return ErratumFlag(
        "cte-density-sign",
        "bridge density stated as 2(1+(1-p)(1-x))/(1+p), which integrates to (3-p)/(1+p); the derived density integrates to 1 (p=0.5)",
        stated,
        derived,
        1e-8,
    )


def _cte_boundary_term() -> ErratumFlag:
    # stated closing identity (1-p) E[g(1)-g(U)] = E[g'(Z)] (1+p)/2, g(u) = u^2
    p, t = 0.5, 0.5
    g = monomial(2)
    B = nbu_bridge(make_uniform01(), cte_distortion(p), t)
    e_gprime = integrate_open(lambda x: np.asarray(g.derivative(1)(x)) * B.density(x)).value
    stated = (1.0 - p) * (g.at_one() - 1.0 / 3.0)
    derived = e_gprime * (1.0 + p) / 2.0
    return ErratumFlag(
        "cte-boundary-term",
        "closing identity (1-p)E[g(1)-g(U)] = E[g'(Z)](1+p)/2 misses the boundary term p*t(g(1)-g(0)) because X_h starts at p (p=0.5, g=u^2)",
        stated,
        derived,
        1e-8,
    )


def erratum_flags() -> list[ErratumFlag]:
    return [
        _taylor_factorials(),
        _distorted_pair_mean_order(),
        _power_pair_integral_swap(),
        _maxima_lhs_simplification(),
        _cte_density_sign(),
        _cte_boundary_term(),
    ]


def suite_report() -> dict[str, Any]:
    """Suite rows and erratum flags as one JSON-ready dict (deterministic: no timings)."""
    rows = run_suite()
    flags = erratum_flags()
    return {
        "scenarios": [
            {
                "label": row.label,
                "verified": row.report.verified,
                "hypotheses_hold": row.report.hypotheses_hold,
                "boundary_term": row.report.boundary_term,
                "report": row.report.to_dict(),
            }
            for row in rows
        ],
        "errata": [f.to_dict() for f in flags],
    }
