"""Expected maxima of exponential samples.

With h(t) = 1 - (1-t)^n the distorted variable is the maximum of n
independent exponential(1) lifetimes, so its mean is the harmonic number H_n.
The bridge between the n- and m-maxima has density
ln((1 - x^(1/n)) / (1 - x^(1/m))) / (H_m - H_n).
"""

import math

import numpy as np

import qmvt
from qmvt.testfunctions import monomial

E = qmvt.make_exponential(1.0)

print(" n   E[M_n] by quadrature   H_n")
for n in range(1, 7):
    H = math.fsum(1 / k for k in range(1, n + 1))
    print(f" {n}   {qmvt.distorted_mean(E, qmvt.dual_power_distortion(n)):.15f}      {H:.15f}")

for n, m in ((1, 2), (2, 3)):
    Z = qmvt.distorted_bridge(E, qmvt.dual_power_distortion(n), qmvt.dual_power_distortion(m))
    x = np.linspace(0.05, 0.95, 7)
    Hn, Hm = (math.fsum(1 / k for k in range(1, j + 1)) for j in (n, m))
    ref = np.log((1 - x ** (1 / n)) / (1 - x ** (1 / m))) / (Hm - Hn)
    print(f"\nbridge n={n}, m={m}: max |density - closed form| = {np.max(np.abs(Z.density(x) - ref)):.1e}")
    draws = qmvt.sample(Z, 200_000, seed=1)
    print(f"  sample mean {draws.mean():.4f} vs exact mean {Z.mean():.4f}")

    r = qmvt.verify_theorem1(E, qmvt.dual_power_distortion(n), qmvt.dual_power_distortion(m), monomial(2))
    print(f"  identity with g=u^2: residual {r.residual_abs:.1e}, two lhs routes agree: {r.lhs_routes_agree}")
