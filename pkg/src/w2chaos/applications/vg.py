"""Variance-gamma laws and their link with two-term chi-square combinations.

alpha1 (Z_1**2 - 1) - alpha2 (Z_2**2 - 1) with alpha1, alpha2 > 0 is
VG(1, alpha1 - alpha2, 2 sqrt(alpha1 alpha2), alpha2 - alpha1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from ..chaos_model import ChaosCoefficients, TargetSpec, delta_via_roots, cumulants_from_coefficients
from ..errors import DomainError
from ..transport import SampleBatch, sample_chaos


@dataclass(frozen=True)
class VGParams:
    r: float
    theta: float
    sigma: float
    mu: float

    def __post_init__(self):
        if not (self.r > 0 and self.sigma > 0):
            raise DomainError("VG needs r > 0 and sigma > 0")

    def mean(self) -> float:
        return self.mu + self.r * self.theta

    def variance(self) -> float:
        return self.r * (self.sigma**2 + 2 * self.theta**2)


def vg_from_chi_pair(alpha1: float, alpha2: float) -> VGParams:
    if not (alpha1 > 0 and alpha2 > 0):
        raise ValueError("both coefficients must be positive")
    return VGParams(1.0, alpha1 - alpha2, 2 * math.sqrt(alpha1 * alpha2), alpha2 - alpha1)


def log_scaled_bessel_k(nu: float, z: float, rtol: float = 1e-10) -> float:
    """log(exp(z) K_nu(z)) from int_0^inf exp(-z (cosh t - 1)) cosh(nu t) dt.

    The range is cut where the integrand falls below exp(-60) relative to
    its value at t = 0 (for |nu| <= z the integrand is maximal there).
    """
    if z <= 0:
        raise DomainError("K_nu needs z > 0")
    nu = abs(nu)
    f = lambda t: math.exp(-z * (math.cosh(t) - 1) + nu * t) * (1 + math.exp(-2 * nu * t)) / 2  # noqa: E731
    T = 1.0
    while -z * (math.cosh(T) - 1) + nu * T > -60 or T < 1:
        T *= 1.5
    # the peak of the integrand sits at sinh(t) = nu / z
    peak = math.asinh(nu / z)
    pts = [peak] if 0 < peak < T else None
    val, _ = quad(f, 0, T, epsabs=0, epsrel=rtol, limit=200, points=pts)
    return math.log(val)


def bessel_k(nu: float, z: float) -> float:
    return math.exp(log_scaled_bessel_k(nu, z) - z)


def vg_density(params: VGParams, x):
    """VG density at x, with y = x - mu and c = sqrt(theta**2 + sigma**2):

    p = exp(theta y / sigma**2) / (sigma sqrt(pi) Gamma(r/2))
        * (|y| / (2 c))**((r-1)/2) * K_{(r-1)/2}(c |y| / sigma**2)
    """
    r, th, s, mu = params.r, params.theta, params.sigma, params.mu
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    c = math.sqrt(th * th + s * s)
    nu = (r - 1) / 2
    out = np.empty(xs.size)
    for i, xv in enumerate(xs):
        y = xv - mu
        if y == 0:
            if r <= 1:
                raise DomainError("density is singular at x = mu when r <= 1")
            # K_nu(z) ~ Gamma(nu) (z/2)**(-nu) / 2 as z -> 0
            out[i] = math.exp(gammaln(nu) - gammaln(r / 2) + nu * math.log(s * s / (c * c))) \
                / (2 * s * math.sqrt(math.pi))
            continue
        z = c * abs(y) / (s * s)
        logp = (th * y / (s * s) - math.log(s * math.sqrt(math.pi)) - gammaln(r / 2)
                + nu * math.log(abs(y) / (2 * c)) + log_scaled_bessel_k(nu, z) - z)
        out[i] = math.exp(logp)
    return float(out[0]) if scalar else out


def vg_normalization(params: VGParams) -> float:
    """int p over the real line, split at mu where the density may be singular."""
    f = lambda t: vg_density(params, t)  # noqa: E731
    mu = params.mu
    left, _ = quad(f, -np.inf, mu, epsabs=1e-12, epsrel=1e-10, limit=400)
    right, _ = quad(f, mu, np.inf, epsabs=1e-12, epsrel=1e-10, limit=400)
    return left + right


def chi_pair_coefficients(alpha1: float, alpha2: float) -> ChaosCoefficients:
    """alpha1 (Z_1**2 - 1) - alpha2 (Z_2**2 - 1)."""
    return ChaosCoefficients([alpha1, -alpha2])


def sample_chi_pair(alpha1: float, alpha2: float, N: int, seed: int = 0) -> SampleBatch:
    return sample_chaos(chi_pair_coefficients(alpha1, alpha2), N, seed)


def gaunt_bound_term(coeffs: ChaosCoefficients, target: TargetSpec | None = None) -> float:
    """sqrt(Delta + kappa_3**2 / 4); the multiplying constant stays symbolic.

    The default target is the symmetric pair (1/2, -1/2).
    """
    if target is None:
        target = TargetSpec([0.5, -0.5], convention="raw")
    d = delta_via_roots(coeffs, target)
    k3 = cumulants_from_coefficients(coeffs, 3)[3]
    return math.sqrt(d + 0.25 * k3 * k3)
