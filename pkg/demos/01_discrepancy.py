"""The discrepancy Delta between a chaos and its target, computed two ways."""
import numpy as np

from w2chaos import ChaosCoefficients, TargetSpec, cumulants_from_coefficients, delta, theta_coefficients
from w2chaos.applications.ustat import UStatSpec, ustat_coefficients, ustat_reference, ustat_target

# Q(x) = x^2 (x - 1)^2 for the single target root 1
print("theta for target (1):", theta_coefficients(TargetSpec([1.0])).thetas[2:])

# two roots: the polynomial has degree 2q + 2 = 6
t = TargetSpec([0.6, -0.8])
print("theta for target (0.6, -0.8):", np.round(theta_coefficients(t).thetas[2:], 6))

# Delta sums Q over the coefficients; the same number comes out of the cumulants
c = ChaosCoefficients([0.55, -0.7, 0.3, 0.1])
print("Delta via roots     :", delta(c, t, "roots"))
print("Delta via cumulants :", delta(c, t, "cumulants"))

# coefficients that sit on target roots (or at 0) give exactly zero
print("Delta on the roots  :", delta(ChaosCoefficients([0.6, -0.8, 0.0, 0.6]), t, "roots"))

# U-statistic with kernel a x y: Delta = a^4 n^2 / (n-1)^3
for n in (10, 100, 1000):
    spec = UStatSpec(n, 1.0)
    cn = ustat_coefficients(spec)
    ref = ustat_reference(spec)
    k = cumulants_from_coefficients(cn, 4)
    print(f"n={n:5d}  kappa4={k[4]:.6f} (closed form {ref.kappa4:.6f})  "
          f"Delta={delta(cn, ustat_target(spec)):.3e} (closed form {ref.delta:.3e})")
