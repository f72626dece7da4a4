"""Permutation distance and the fully computed bound d_sigma <= C_x sqrt(Delta)."""
import numpy as np

from w2chaos import ChaosCoefficients, TargetSpec
from w2chaos.matching import bound_constants, certified_upper_bound, d_sigma, rational_independence_probe

x = np.array([1.0, -0.37])
x /= np.linalg.norm(x)
print("target:", x)
print("probe on squares:", rational_independence_probe(x**2, 50))

k = bound_constants(x)
print(f"delta_x={k.delta_x:.4f} eta={k.eta:.4f} kappa={k.kappa_const:.4f} alpha_x={k.alpha_x:.4f}")
print(f"C_x={k.C_x:.3f}  C~_x={k.C_tilde_x:.3f}  E={k.adherence_set}")

# move away from the target and watch both sides
rng = np.random.default_rng(1)
for eps in (0.3, 0.1, 0.03, 0.01):
    y = np.concatenate([x + eps * rng.normal(size=2), eps * rng.normal(size=2)])
    y /= np.linalg.norm(y)
    b = certified_upper_bound(TargetSpec(x), ChaosCoefficients(y, convention="unit"))
    print(f"eps={eps:5.2f}  d_sigma={d_sigma(x, y).distance:.4f}  bound={b.value:.4f}  "
          f"sqrt(Delta)={np.sqrt(b.delta):.4f}  branch={b.branch}")

# a dependent target: (1/sqrt2, -1/sqrt2) has a larger adherence set
xd = np.array([1, -1]) / np.sqrt(2)
kd = bound_constants(xd)
print("dependent target E:", kd.adherence_set)
y = np.array([1, 1]) / np.sqrt(2)
b = certified_upper_bound(TargetSpec(xd), ChaosCoefficients(y, convention="unit"))
print(f"same Delta={b.delta}, but d_sigma={d_sigma(xd, y).distance:.4f} <= {b.value:.3f} ({b.branch})")
