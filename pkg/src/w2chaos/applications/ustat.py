"""Degenerate U-statistic n U_n with kernel h(x, y) = a x y.

n U_n = (2a/(n-1)) sum_{i<j} Z_i Z_j is the quadratic form of the matrix with
zero diagonal and off-diagonal a/(n-1), whose spectrum is a (once) and
-a/(n-1) (n-1 times).

The kappa_4 and Delta closed forms below come from that spectrum.  Forms
with n(n-2)(n-3) and n(n-3) in the numerator do not match it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chaos_model import ChaosCoefficients, TargetSpec


@dataclass(frozen=True)
class UStatSpec:
    n: int
    a: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError("n must be an integer >= 3")
        if self.a == 0 or not np.isfinite(self.a):
            raise ValueError("a must be a nonzero finite real")


@dataclass(frozen=True)
class UStatReference:
    kappa2: float
    kappa3: float
    kappa4: float
    delta: float


def ustat_coefficients(spec: UStatSpec) -> ChaosCoefficients:
    n, a = spec.n, float(spec.a)
    return ChaosCoefficients(np.concatenate([[a], np.full(n - 1, -a / (n - 1))]))


def ustat_matrix(spec: UStatSpec) -> np.ndarray:
    n = spec.n
    m = np.full((n, n), spec.a / (n - 1))
    np.fill_diagonal(m, 0.0)
    return m


def ustat_target(spec: UStatSpec) -> TargetSpec:
    """Limit a (Z**2 - 1), stored in the raw convention."""
    return TargetSpec([spec.a], convention="raw")


def ustat_reference(spec: UStatSpec) -> UStatReference:
    n, a = spec.n, float(spec.a)
    m = n - 1
    return UStatReference(
        kappa2=2 * a**2 * n / m,
        kappa3=8 * a**3 * n * (n - 2) / m**2,
        kappa4=48 * a**4 * (m**3 + 1) / m**3,
        delta=a**4 * n**2 / m**3,
    )
