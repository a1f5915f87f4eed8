"""Acceptance criteria 1-8.

Each test logs a single ``PASS``/``FAIL criterion N`` line (collected in the
terminal summary) and then asserts the same condition.  Tolerances are the
contractual ones; nothing here is loosened to make a check pass.

Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from qmvt.bridge import distorted_bridge, lorenz, nbu_bridge
from qmvt.cli import build_bridge
from qmvt.distortion import (
    compose,
    cte_distortion,
    distort,
    distorted_mean,
    dual_power_distortion,
    identity_distortion,
    pointwise_dominates,
    power_distortion,
)
from qmvt.order import is_nbu, nbu_excess, st_dominates
from qmvt.quadrature import integrate_interval, integrate_open
from qmvt.quantile import make_exponential, make_exponential_mixture, make_uniform01
from qmvt.scenario import parse_scenario
from qmvt.suite import SUITE, run_suite
from qmvt.testfunctions import monomial
from qmvt.verify import monte_carlo_check, verify_taylor

GRID100 = (np.arange(100) + 0.5) / 100


@pytest.fixture(autouse=True)
def _pinned_tolerance(monkeypatch):
    monkeypatch.setenv("QMVT_TOL_QUAD", "1e-9")


def _harmonic(n):
    return math.fsum(1.0 / k for k in range(1, n + 1))


def test_criterion_1_uniform_power_pair(record):
    t0 = time.perf_counter()
    X, alpha, beta = make_uniform01(), 2.0, 1.0
    h, l = power_distortion(alpha), power_distortion(beta)
    mh, ml = distorted_mean(X, h), distorted_mean(X, l)
    B = distorted_bridge(X, h, l)
    dens_err = float(np.max(np.abs(B.density(GRID100) - 6.0 * (np.sqrt(1 - GRID100) - (1 - GRID100)))))
    elapsed = time.perf_counter() - t0
    gap_oracle = (alpha - beta) / ((alpha + 1) * (beta + 1))
    errs = (abs(mh - 1 / 3), abs(ml - 1 / 2), abs(B.mass_gap - gap_oracle), abs(gap_oracle - 1 / 6))
    ok = max(errs) <= 1e-9 and dens_err <= 1e-8 and elapsed < 1.0
    record(1, ok, f"mean/gap err {max(errs):.1e} (<=1e-9), density err {dens_err:.1e} (<=1e-8), {elapsed:.3f}s (<1s)")
    assert ok


def test_criterion_2_exponential_maxima(record):
    t0 = time.perf_counter()
    E = make_exponential(1.0)
    mean_err = max(abs(distorted_mean(E, dual_power_distortion(n)) - _harmonic(n)) for n in range(1, 7))
    dens_err = 0.0
    for n, m in ((1, 2), (2, 3)):
        B = distorted_bridge(E, dual_power_distortion(n), dual_power_distortion(m))
        x = GRID100
        ref = np.log((1 - x ** (1 / n)) / (1 - x ** (1 / m))) / (_harmonic(m) - _harmonic(n))
        dens_err = max(dens_err, float(np.max(np.abs(B.density(x) - ref))))
    elapsed = time.perf_counter() - t0
    ok = mean_err <= 1e-8 and dens_err <= 1e-7 and elapsed < 2.0
    record(2, ok, f"H_n err {mean_err:.1e} (<=1e-8), density err {dens_err:.1e} (<=1e-7), {elapsed:.3f}s (<2s)")
    assert ok


def test_criterion_3_suite_residuals(record):
    t0 = time.perf_counter()
    rows = [r for r in run_suite() if not r.label.startswith("taylor")]
    elapsed = time.perf_counter() - t0
    held = [r for r in rows if r.report.hypotheses_hold]
    worst = max(r.report.residual_abs for r in held)
    ok = len(held) >= 12 and worst <= 1e-6 and elapsed < 60.0
    record(3, ok, f"{len(held)} of {len(rows)} scenarios satisfy hypotheses (>=12), "
                  f"max residual {worst:.1e} (<=1e-6), {elapsed:.2f}s (<60s)")
    assert ok


def test_criterion_4_taylor(record):
    # direct oracles: int (1 - u^3) du = 3/4; int (1 - u^2)/(1 - u) du = int (1 + u) du = 3/2
    a = verify_taylor(make_uniform01(), monomial(3), 3)
    b = verify_taylor(make_exponential(1.0), monomial(2), 2)
    stated = verify_taylor(make_uniform01(), monomial(3), 3, factorials=False)
    oracle_err = max(abs(a.lhs - 0.75), abs(b.lhs - 1.5))
    ok = a.residual_abs <= 1e-8 and b.residual_abs <= 1e-8 and oracle_err <= 1e-8 and stated.residual_abs >= 0.2
    record(4, ok, f"residuals {a.residual_abs:.1e}, {b.residual_abs:.1e} (<=1e-8), lhs oracle err {oracle_err:.1e}; "
                  f"without 1/k! misses by {stated.residual_abs:.4f} (>=0.2)")
    assert ok


def _all_bridges():
    out = {}
    for label, tree in SUITE:
        if not label.startswith("taylor"):
            out[label] = build_bridge(parse_scenario(tree))
    for name, X in (("uniform01", make_uniform01()), ("exponential{1}", make_exponential(1.0))):
        out[f"lorenz {name}"] = lorenz(X)
    for p in (0.25, 0.5, 0.75):
        out[f"cte p={p} t=0.5"] = nbu_bridge(make_uniform01(), cte_distortion(p), 0.5)
    return out


def test_criterion_5_normalization(record):
    bridges = _all_bridges()
    worst = max(abs(integrate_open(B.density).value - 1.0) for B in bridges.values())
    stated_err, stated_half = 0.0, None
    for p in (0.25, 0.5, 0.75):
        v = integrate_interval(lambda x: 2.0 * (1.0 + (1.0 - p) * (1.0 - x)) / (1.0 + p), 0.0, 1.0).value
        stated_err = max(stated_err, abs(v - (3 - p) / (1 + p)))
        if p == 0.5:
            stated_half = v
    ok = worst <= 1e-8 and stated_err <= 1e-8 and abs(stated_half - 1.0) > 1e-8
    record(5, ok, f"{len(bridges)} bridges, max |integral - 1| {worst:.1e} (<=1e-8); stated cte density "
                  f"integrates to {stated_half:.10f} = (3-p)/(1+p) at p=0.5, not 1")
    assert ok


PAIRS = [
    (power_distortion(2.0), power_distortion(1.0)),
    (power_distortion(1.0), power_distortion(2.0)),
    (power_distortion(3.0), power_distortion(2.0)),
    (dual_power_distortion(1.0), dual_power_distortion(2.0)),
    (dual_power_distortion(3.0), dual_power_distortion(2.0)),
    (cte_distortion(0.25), cte_distortion(0.5)),
    (identity_distortion(), cte_distortion(0.5)),
    (power_distortion(2.0), dual_power_distortion(2.0)),
    (power_distortion(0.5), dual_power_distortion(2.0)),
    (dual_power_distortion(2.0), power_distortion(0.5)),
    (compose(power_distortion(2.0), dual_power_distortion(3.0)), identity_distortion()),
]
BASES = [make_uniform01(), make_exponential(1.0), make_exponential_mixture([0.5, 0.5], [1.0, 3.0])]


def test_criterion_6_dominance_matches_order(record):
    mismatches, dominated = [], 0
    for h, l in PAIRS:
        dom = pointwise_dominates(h, l)
        dominated += dom
        for X in BASES:
            if st_dominates(distort(X, h), distort(X, l)).holds != dom:
                mismatches.append(f"{h.label}/{l.label}/{X.name}")
    ok = len(PAIRS) >= 6 and len(BASES) == 3 and not mismatches and 0 < dominated < len(PAIRS)
    record(6, ok, f"{len(PAIRS)} pairs x {len(BASES)} bases ({dominated} dominated pairs), "
                  f"{len(mismatches)} disagreements{': ' + ', '.join(mismatches) if mismatches else ''}")
    assert ok


def test_criterion_7_nbu(record):
    e = is_nbu(make_exponential(1.0))
    u = is_nbu(make_uniform01())
    M = make_exponential_mixture([0.5, 0.5], [1.0, 3.0])
    m = is_nbu(M, extra_points=[1.0])
    at_11 = float(nbu_excess(M, 1.0, 1.0))
    ok = e.holds and e.worst_violation <= 1e-12 and u.holds and not m.holds and at_11 >= 0.02 and m.worst_violation >= 0.02
    record(7, ok, f"exponential violation {e.worst_violation:.1e} (<=1e-12), uniform holds={u.holds}, "
                  f"mixture excess at (1,1) {at_11:.4f} (>=0.02), worst {m.worst_violation:.4f}")
    assert ok


MC_SCENARIOS = {
    "uniform power 2 vs 1, g=u^2": {
        "base_distribution": "uniform01",
        "construction": {"theorem1": {"h": "power{2}", "l": "power{1}"}},
        "test_function": "monomial{2}",
    },
    "exponential power 2 vs 1, g=exp": {
        "base_distribution": "exponential{1}",
        "construction": {"theorem1": {"h": "power{2}", "l": "power{1}"}},
        "test_function": "exp",
    },
    "uniform01 vs uniform{2}, g=u^2": {
        "construction": {"mvt": {"lower": "uniform01", "upper": "uniform{2}"}},
        "test_function": "monomial{2}",
    },
}


def test_criterion_8_monte_carlo(record):
    samples, seed = 1_000_000, 20240601
    worst_z, reproducible, notes = 0.0, True, []
    for name, tree in MC_SCENARIOS.items():
        s = parse_scenario(tree)
        r = monte_carlo_check(s, samples, seed)
        z_lhs = abs(r.mc_lhs.estimate - r.lhs) / r.mc_lhs.stderr
        z_rhs = abs(r.mc_rhs.estimate - r.rhs) / r.mc_rhs.stderr
        worst_z = max(worst_z, z_lhs, z_rhs)
        same = r.to_json() == monte_carlo_check(s, samples, seed).to_json()
        reproducible &= same
        notes.append(f"{name}: z={z_lhs:.2f}/{z_rhs:.2f}")
    ok = worst_z <= 4.0 and reproducible
    record(8, ok, f"10^6 samples, worst |MC - quadrature| {worst_z:.2f} se (<=4), "
                  f"byte-identical rerun={reproducible}; " + "; ".join(notes))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-rN"]))
