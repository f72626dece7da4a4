"""Quadratic forms built from a finite-rank kernel sampled on i/n."""
from w2chaos.applications import qform
from w2chaos.applications.sweep import GOLDEN_LAMBDAS, fit_slope

for basis in ("trig", "cos"):
    k = qform.KernelSpec(GOLDEN_LAMBDAS, basis)
    ns, inner, tau = [], [], []
    for n in (32, 64, 128, 256, 512, 1024):
        _, At = qform.qform_matrix(k, n)
        g = qform.qform_bound(At, k.target())
        ns.append(n)
        inner.append(g.majorant)
        tau.append(qform.tau_n(At))
        print(f"{basis:5s} n={n:5d}  bracket={g.value:.3e}  majorant={g.majorant:.3e}  n*tau_n={n * tau[-1]:.3f}")
    try:
        print(f"{basis}: majorant slope {fit_slope(ns, inner).slope:+.3f}")
    except ValueError:
        print(f"{basis}: majorant is at round-off level, no slope")

# the trig basis is exactly orthogonal on the grid i/n, so its traces match the
# target up to rounding; the cosine basis on [0, 1] with pi m x is not
