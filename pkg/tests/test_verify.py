"""Identity checks: Taylor expansion, mean value identity and its distorted forms."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmvt.distortion import cte_distortion, dual_power_distortion, identity_distortion, power_distortion
from qmvt.exceptions import ArityError, DegenerateBridgeError, DomainError, ValidationError
from qmvt.quantile import make_degenerate_zero, make_exponential, make_from_quantile, make_uniform, make_uniform01, scaled
from qmvt.scenario import parse_scenario
from qmvt.testfunctions import MAX_ORDER, constant, exponential, linear, monomial, sine_half_pi
from qmvt.verify import (
    monte_carlo_check,
    run_scenario,
    verify_mvt,
    verify_taylor,
    verify_theorem1,
    verify_theorem2,
)

REPORT_KEYS = {"lhs", "rhs", "residual_abs", "residual_rel", "lhs_err", "rhs_err", "mc", "hypothesis_checks", "scenario"}
TEST_FUNCTIONS = [monomial(1), monomial(2), monomial(3), monomial(5), exponential(), sine_half_pi()]


class TestTestFunctions:
    @pytest.mark.parametrize("g", TEST_FUNCTIONS, ids=lambda g: g.label)
    def test_derivatives_by_central_difference(self, g):
        u = np.linspace(0.05, 0.95, 19)
        eps = 1e-5
        prev = g.value
        for k in range(1, MAX_ORDER + 1):
            fd = (prev(u + eps) - prev(u - eps)) / (2 * eps)
            np.testing.assert_allclose(g.derivative(k)(u), fd, rtol=1e-6, atol=1e-6)
            prev = g.derivative(k)

    def test_arity(self):
        with pytest.raises(ArityError):
            monomial(2).derivative(MAX_ORDER + 1)

    def test_limit_at_one(self):
        assert sine_half_pi().at_one() == pytest.approx(1.0)
        assert exponential().at_one() == pytest.approx(math.e)

    def test_rejects_fractional_degree(self):
        with pytest.raises(ValidationError):
            monomial(1.5)


class TestTaylor:
    def test_first_order_uniform(self):
        r = verify_taylor(make_uniform01(), monomial(2), 1)
        assert r.lhs == pytest.approx(2 / 3, abs=1e-12)
        assert r.residual_abs <= 1e-8 and r.verified

    def test_third_order_uniform_cubic(self):
        r = verify_taylor(make_uniform01(), monomial(3), 3)
        assert r.lhs == pytest.approx(0.75, abs=1e-12)
        assert r.rhs == pytest.approx(0.75, abs=1e-12)
        assert r.residual_abs <= 1e-8

    def test_without_factorials_fails(self):
        r = verify_taylor(make_uniform01(), monomial(3), 3, factorials=False)
        assert r.rhs == pytest.approx(1.0, abs=1e-12)
        assert r.residual_abs >= 0.2 and not r.verified

    def test_exponential_second_order(self):
        r = verify_taylor(make_exponential(1.0), monomial(2), 2)
        assert r.lhs == pytest.approx(1.5, abs=1e-9)
        assert r.residual_abs <= 1e-8

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_constant_g(self, n):
        r = verify_taylor(make_exponential(2.0), constant(3.0), n)
        assert r.lhs == 0.0 and abs(r.rhs) <= 1e-15

    def test_missing_derivative(self):
        with pytest.raises(ArityError):
            verify_taylor(make_uniform01(), monomial(2), MAX_ORDER + 1)

    def test_requires_family_d(self):
        shifted = make_from_quantile(lambda u: np.asarray(u, float) + 1.0, lambda u: np.ones_like(np.asarray(u, float)))
        with pytest.raises(DomainError):
            verify_taylor(shifted, monomial(2), 2)

    @pytest.mark.parametrize("g", TEST_FUNCTIONS, ids=lambda g: g.label)
    @pytest.mark.parametrize("X", [make_uniform01(), make_exponential(1.0), make_uniform(3.0)], ids=lambda X: X.name)
    def test_first_order_is_mvt_with_point_mass(self, X, g):
        a = verify_taylor(X, g, 1)
        b = verify_mvt(make_degenerate_zero(), X, g)
        assert a.lhs == pytest.approx(b.lhs, abs=1e-12)
        assert a.rhs == pytest.approx(b.rhs, abs=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_all_orders_exponential(self, n):
        assert verify_taylor(make_exponential(1.0), sine_half_pi(), n).residual_abs <= 1e-8


class TestMVT:
    def test_linear_pair(self):
        r = verify_mvt(make_uniform01(), make_uniform(2.0), monomial(2))
        assert r.lhs == pytest.approx(2 / 3, abs=1e-12)
        assert r.rhs == pytest.approx(2 / 3, abs=1e-12)
        assert r.verified and r.hypotheses_hold

    def test_identical_laws(self):
        U = make_uniform01()
        r = verify_mvt(U, U, monomial(2))
        assert r.lhs == 0.0 and r.rhs == 0.0 and r.verified
        assert dict(r.hypothesis_checks)["mass-gap"] is False

    def test_constant_g(self):
        r = verify_mvt(make_uniform01(), make_exponential(0.5), constant(1.0))
        assert r.lhs == 0.0 and r.rhs == 0.0

    def test_diagnostic_mode_order_violation(self):
        X = make_from_quantile(lambda u: 2.0 * np.asarray(u, float) ** 4, lambda u: 8.0 * np.asarray(u, float) ** 3)
        r = verify_mvt(X, make_uniform01(), monomial(2))
        checks = dict(r.hypothesis_checks)
        assert checks["st-order"] is False and checks["mass-gap"] is True
        # the identity itself needs only Q_X(0) = Q_Y(0), so it still balances
        assert r.verified

    def test_diagnostic_mode_reversed_pair(self):
        r = verify_mvt(make_uniform(2.0), make_uniform01(), monomial(2))
        assert not r.hypotheses_hold
        assert r.lhs == pytest.approx(-2 / 3, abs=1e-12) and r.residual_abs <= 1e-12

    def test_scale_equivariance(self):
        U = make_uniform01()
        h, l = power_distortion(2.0), power_distortion(1.0)
        base = verify_theorem1(U, h, l, monomial(2))
        twice = verify_theorem1(scaled(U, 2.0), h, l, monomial(2))
        assert twice.lhs == pytest.approx(2 * base.lhs, rel=1e-10)
        assert twice.rhs == pytest.approx(2 * base.rhs, rel=1e-10)
        assert twice.residual_abs <= 1e-6


class TestDistortedPair:
    def test_power_pair_linear_g(self):
        r = verify_theorem1(make_uniform01(), power_distortion(2.0), power_distortion(1.0), monomial(1))
        assert r.rhs == pytest.approx(1 / 6, abs=1e-10)
        assert r.residual_abs <= 1e-8 and r.verified

    def test_harmonic_gap(self):
        r = verify_theorem1(make_exponential(1.0), dual_power_distortion(1.0), dual_power_distortion(3.0), linear(1.0))
        assert r.rhs == pytest.approx(5 / 6, abs=1e-9)
        assert abs(r.lhs - 5 / 6) <= 1e-7

    def test_two_lhs_routes(self):
        for h, l in [(power_distortion(3.0), power_distortion(1.5)), (dual_power_distortion(1.5), dual_power_distortion(4.0))]:
            r = verify_theorem1(make_exponential(1.0), h, l, exponential())
            assert abs(r.lhs - r.lhs_alt) <= 2 * r.tol_quad

    def test_identical_distortions(self):
        r = verify_theorem1(make_uniform01(), power_distortion(2.0), power_distortion(2.0), monomial(2))
        assert r.lhs == 0.0 and r.rhs == 0.0

    def test_reversed_dominance_recorded(self):
        r = verify_theorem1(make_uniform01(), power_distortion(1.0), power_distortion(2.0), monomial(2))
        checks = dict(r.hypothesis_checks)
        assert checks["dominance"] is False and checks["mass-gap"] is False


class TestAgedPair:
    def test_identity_distortion(self):
        r = verify_theorem2(make_uniform01(), identity_distortion(), 0.5, monomial(1))
        assert r.lhs == pytest.approx(0.25, abs=1e-12)
        assert r.rhs == pytest.approx(0.25, abs=1e-12)
        assert r.verified and r.hypotheses_hold

    def test_memoryless(self):
        with pytest.raises(DegenerateBridgeError):
            verify_theorem2(make_exponential(1.0), power_distortion(2.0), 0.5, monomial(2))

    @pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
    def test_cte_boundary_term(self, p):
        # uniform base, t = 0.5, g = u^2: lhs = t (1-p) 2/3; rhs oracle built below
        t = 0.5
        r = verify_theorem2(make_uniform01(), cte_distortion(p), t, monomial(2))
        lhs_oracle = t * (1 - p) * (2 / 3)
        # E[g'(Z)] for density 2(1-(1-p)(1-x))/(1+p): int 2x * density dx, times gap t(1+p)/2
        e_gprime = 2 * (2 / (1 + p)) * (1 / 2 - (1 - p) * (1 / 2 - 1 / 3))
        rhs_oracle = e_gprime * t * (1 + p) / 2
        assert r.lhs == pytest.approx(lhs_oracle, abs=1e-12)
        assert r.rhs == pytest.approx(rhs_oracle, abs=1e-9)
        assert r.boundary_term == pytest.approx(p * t, abs=1e-12)
        assert r.lhs + r.boundary_term == pytest.approx(r.rhs, abs=1e-9)
        checks = dict(r.hypothesis_checks)
        assert checks["NBU"] and not checks["family-D(X_h)"]
        assert not r.verified

    def test_cte_half_values(self):
        r = verify_theorem2(make_uniform01(), cte_distortion(0.5), 0.5, monomial(2))
        assert r.lhs == pytest.approx(1 / 6, abs=1e-12)
        assert r.rhs == pytest.approx(5 / 12, abs=1e-9)

    def test_nbu_failure_is_diagnostic(self):
        from qmvt.quantile import make_exponential_mixture

        X = make_exponential_mixture([0.5, 0.5], [1.0, 3.0])
        r = verify_theorem2(X, identity_distortion(), 1.0, monomial(2))
        assert dict(r.hypothesis_checks)["NBU"] is False
        assert math.isfinite(r.lhs) and math.isfinite(r.rhs)


class TestReport:
    def test_json_fields(self):
        r = verify_mvt(make_uniform01(), make_uniform(2.0), monomial(2))
        d = json.loads(r.to_json())
        assert set(d) == REPORT_KEYS
        assert d["mc"] is None
        assert all(set(c) == {"name", "pass"} for c in d["hypothesis_checks"])

    def test_residuals(self):
        r = verify_theorem1(make_exponential(1.0), dual_power_distortion(2.0), dual_power_distortion(3.0), monomial(2))
        assert r.residual_abs == abs(r.lhs - r.rhs)
        assert r.residual_rel == r.residual_abs / max(abs(r.lhs), abs(r.rhs), 1e-300)

    def test_non_finite_serialized_as_null(self):
        from dataclasses import replace

        r = replace(verify_mvt(make_uniform01(), make_uniform(2.0), monomial(2)), rhs=math.inf)
        assert json.loads(r.to_json())["rhs"] is None


def _scenario(**numerics):
    tree = {
        "base_distribution": "uniform01",
        "construction": {"theorem1": {"h": "power{2}", "l": "power{1}"}},
        "test_function": "monomial{2}",
    }
    if numerics:
        tree["numerics"] = numerics
    return parse_scenario(tree)


class TestMonteCarlo:
    def test_agrees(self):
        r = monte_carlo_check(_scenario(), 20_000, 11)
        assert r.mc_agrees
        assert r.mc_lhs.samples == 20_000 and r.mc_lhs.stderr > 0

    def test_too_few_samples(self):
        with pytest.raises(ValidationError):
            monte_carlo_check(_scenario(), 0, 1)

    def test_constant_derivative_has_zero_variance(self):
        tree = {"construction": {"mvt": {"lower": "uniform01", "upper": "uniform{2}"}}, "test_function": "linear{2}"}
        r = monte_carlo_check(parse_scenario(tree), 500, 3)
        assert r.mc_rhs.stderr == 0.0
        assert r.mc_rhs.estimate == pytest.approx(2.0 * 0.5, abs=1e-15)

    def test_reproducible_json(self):
        a = monte_carlo_check(_scenario(), 5_000, 42).to_json()
        b = monte_carlo_check(_scenario(), 5_000, 42).to_json()
        assert a == b

    def test_refused_sampling_is_recorded(self):
        tree = {"construction": {"mvt": {"lower": "quantile_power{0.5}", "upper": "uniform{1.2}"}},
                "test_function": "monomial{2}"}
        r = monte_carlo_check(parse_scenario(tree), 1000, 0)
        assert r.mc_skipped is not None and r.mc_lhs is None
        assert "skipped" in json.loads(r.to_json())["mc"]

    def test_run_scenario_uses_numerics(self):
        r = run_scenario(_scenario(mc_samples=2_000, seed=5))
        assert r.mc_lhs is not None and r.mc_lhs.samples == 2_000

    def test_taylor_skipped(self):
        tree = {"base_distribution": "uniform01", "construction": {"taylor": {"n": 2}}, "test_function": "monomial{3}"}
        r = monte_carlo_check(parse_scenario(tree), 1000, 0)
        assert r.mc_skipped and r.verified


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(1.1, 6.0), beta=st.floats(0.2, 1.0), g=st.sampled_from(TEST_FUNCTIONS))
def test_power_pairs_verify(alpha, beta, g):
    r = verify_theorem1(make_uniform01(), power_distortion(alpha), power_distortion(beta), g)
    assert r.hypotheses_hold
    assert r.residual_abs <= 1e-6


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.05, 0.9), m=st.floats(1.0, 4.0))
def test_theorem2_uniform_dual_power(t, m):
    r = verify_theorem2(make_uniform01(), dual_power_distortion(m), t, exponential())
    assert r.hypotheses_hold
    assert r.residual_abs <= 1e-6 and r.boundary_term == pytest.approx(0.0, abs=1e-12)
