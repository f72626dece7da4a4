"""Rates for the degenerate U-statistic n U_n with kernel a x y.

sqrt(Delta) = n / (n-1)^(3/2) only reaches its n^(-1/2) slope slowly, and
the W2 distance itself decays faster, close to n^(-2/3) on this range.
"""
import numpy as np

from w2chaos.applications.sweep import rate_sweep

table = rate_sweep("ustat", [10, 32, 100, 316, 1000], a=1.0, samples=100_000, seed=7)
print(table.to_csv())

n = table.column("n")
sd = table.column("sqrt_delta")
print("local slopes of sqrt(Delta):", np.round(np.diff(np.log(sd)) / np.diff(np.log(n)), 3))
w = table.column("w2_hat")
print("local slopes of empirical W2:", np.round(np.diff(np.log(w)) / np.diff(np.log(n)), 3))
