"""Quantile-based mean value identities for distorted and NBU random variables.

The package builds quantile representations of nonnegative laws, distorts
them, constructs the bridge densities ``(Q_Y - Q_X) / (E[Y] - E[X])`` on
``(0, 1)`` and checks the associated mean value and Taylor identities by
adaptive quadrature, with an optional Monte Carlo cross-check.
"""

from .bridge import BridgeDistribution, bridge, distorted_bridge, lorenz, nbu_bridge, sample
from .distortion import (
    DistortionFunction,
    compose,
    cte_distortion,
    distort,
    distorted_mean,
    dual_power_distortion,
    identity_distortion,
    pointwise_dominates,
    power_distortion,
)
from .exceptions import (
    ArityError,
    DegenerateBridgeError,
    DivergenceError,
    DomainError,
    HypothesisError,
    QMVTError,
    SamplingRefusedError,
    ValidationError,
)
from .order import OrderCheckResult, is_nbu, st_dominates
from .quadrature import integrate_open
from .quantile import (
    QuantileDistribution,
    make_degenerate_zero,
    make_exponential,
    make_exponential_mixture,
    make_from_quantile,
    make_from_survival,
    make_uniform,
    make_uniform01,
    residual_lifetime,
    scaled,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .testfunctions import TestFunction
from .verify import (
    VerificationReport,
    monte_carlo_check,
    run_scenario,
    verify_mvt,
    verify_taylor,
    verify_theorem1,
    verify_theorem2,
)

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "BridgeDistribution",
    "DegenerateBridgeError",
    "DistortionFunction",
    "DivergenceError",
    "DomainError",
    "HypothesisError",
    "OrderCheckResult",
    "QMVTError",
    "QuantileDistribution",
    "SamplingRefusedError",
    "Scenario",
    "ScenarioError",
    "TestFunction",
    "ValidationError",
    "VerificationReport",
    "bridge",
    "compose",
    "cte_distortion",
    "distort",
    "distorted_bridge",
    "distorted_mean",
    "dual_power_distortion",
    "identity_distortion",
    "integrate_open",
    "is_nbu",
    "load_scenario",
    "lorenz",
    "make_degenerate_zero",
    "make_exponential",
    "make_exponential_mixture",
    "make_from_quantile",
    "make_from_survival",
    "make_uniform",
    "make_uniform01",
    "monte_carlo_check",
    "nbu_bridge",
    "parse_scenario",
    "pointwise_dominates",
    "power_distortion",
    "residual_lifetime",
    "run_scenario",
    "sample",
    "scaled",
    "st_dominates",
    "verify_mvt",
    "verify_taylor",
    "verify_theorem1",
    "verify_theorem2",
]
