"""Quadrature against Monte Carlo, and the same runs through the CLI.

Both sides of the identity are expectations: the left over a uniform U, the
right over the bridge variable Z.  Averaging over 10^6 draws should land
within a few standard errors of the quadrature values, and a fixed seed must
reproduce the report byte for byte.
"""

import pathlib
import subprocess
import sys

import qmvt

HERE = pathlib.Path(__file__).resolve().parent / "scenarios"

s = qmvt.load_scenario(HERE / "mvt_mc.json")
r = qmvt.monte_carlo_check(s, 1_000_000, seed=7)
for side, quad, mc in (("lhs", r.lhs, r.mc_lhs), ("rhs", r.rhs, r.mc_rhs)):
    print(f"{side}: quadrature {quad:.8f}  MC {mc.estimate:.8f} +- {mc.stderr:.1e}  "
          f"({abs(mc.estimate - quad) / mc.stderr:.2f} se)")
print("agrees within 4 se:", r.mc_agrees)
print("rerun identical:   ", r.to_json() == qmvt.monte_carlo_check(s, 1_000_000, seed=7).to_json())

print("\nCLI exit codes (0 verified, 1 identity failure, 2 hypothesis failure, 3 input error):")
for path in sorted(HERE.glob("*.json")) + [HERE / "missing.json"]:
    proc = subprocess.run([sys.executable, "-m", "qmvt", "verify", str(path)], capture_output=True, text=True)
    print(f"  {path.name:20s} -> {proc.returncode}")
