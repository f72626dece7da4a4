"""Rosenblatt cumulants near the critical exponent, and the variance-gamma bridge."""
import numpy as np

from w2chaos.applications import rosenblatt, vg

rho = 0.5
for g1 in (-0.6, -0.55, -0.52, -0.505):
    p = rosenblatt.RosenblattParams(g1, rho)
    k2, _ = rosenblatt.rosenblatt_cumulant(p, 2)
    k3, e3 = rosenblatt.rosenblatt_cumulant(p, 3)
    print(f"gamma1={g1:+.3f} gamma2={p.gamma2:+.3f}  A={rosenblatt.rosenblatt_A(p):.4f}  "
          f"kappa2={k2:.12f}  kappa3={k3:.6f} (+-{e3:.1e})")
print("limit kappa3:", rosenblatt.y_rho_cumulant(rho, 3))

# chi-square pair as a variance-gamma law
p = vg.vg_from_chi_pair(0.5, 0.5)
print(p, "normalization", vg.vg_normalization(p))
v = vg.sample_chi_pair(0.7, 0.3, 1_000_000, seed=1).values
q = vg.vg_from_chi_pair(0.7, 0.3)
print(f"sampled mean {v.mean():+.4f} vs {q.mean():+.4f}, variance {v.var():.4f} vs {q.variance():.4f}")
xs = np.array([-1.0, 0.5, 2.0])
print("density at", xs, vg.vg_density(q, xs))
