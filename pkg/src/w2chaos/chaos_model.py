"""Coefficient sequences, cumulants, the Q polynomial and the Delta discrepancy.

A law in the second chaos is F = sum_k alpha_k W_k with i.i.d. centered noise
W_k.  Cumulants are additive, so kappa_r(F) = kappa_r(W) * sum_k alpha_k**r,
and the discrepancy Delta = sum_k Q(alpha_k) can be evaluated either from the
coefficients directly or from cumulants through the expanded coefficients of Q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidTargetError, NumericalStabilityError

UNIT_TOL = 1e-10
DISTINCT_TOL = 1e-9
SYMMETRY_TOL = 1e-12


def _chi2_cumulant(r: int) -> float:
    return 2.0 ** (r - 1) * math.factorial(r - 1)


@dataclass(frozen=True)
class BaseNoise:
    """Law of the i.i.d. summands W_k.

    ``kind`` is "chi2_centered" (W = scale * (Z**2 - 1), cumulants of every
    order available in closed form) or "custom" (a finite list of cumulants
    kappa_2, kappa_3, ...).  ``sampler`` names the simulation recipe used by
    the transport module, or None when the law can only be handled through
    its cumulants.
    """

    kind: str = "chi2_centered"
    scale: float = 1.0
    custom_cumulants: tuple[float, ...] = ()
    sampler: str | None = "chi2"

    def __post_init__(self):
        if self.kind not in ("chi2_centered", "custom"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValueError("noise scale must be positive")
        if self.kind == "custom":
            cums = tuple(float(c) for c in self.custom_cumulants)
            object.__setattr__(self, "custom_cumulants", cums)
            if not cums or cums[0] <= 0:
                raise ValueError("kappa_2 of the noise must be positive")
            if not all(np.isfinite(cums)):
                raise ValueError("noise cumulants must be finite")

    @classmethod
    def chi2(cls) -> "BaseNoise":
        """W = Z**2 - 1, variance 2."""
        return cls()

    @classmethod
    def chi2_unit(cls) -> "BaseNoise":
        """W = (Z**2 - 1)/sqrt(2), variance 1."""
        return cls(kind="chi2_centered", scale=1 / math.sqrt(2))

    @classmethod
    def custom(cls, cumulants: Sequence[float], sampler: str | None = None) -> "BaseNoise":
        return cls(kind="custom", custom_cumulants=tuple(cumulants), sampler=sampler)

    @property
    def max_order(self) -> float:
        if self.kind == "chi2_centered":
            return math.inf
        return len(self.custom_cumulants) + 1

    def cumulant(self, r: int) -> float:
        if r < 2:
            raise ValueError("cumulant order must be >= 2")
        if self.kind == "chi2_centered":
            return self.scale**r * _chi2_cumulant(r)
        if r > self.max_order:
            raise ValueError(f"noise cumulant of order {r} not provided")
        return self.custom_cumulants[r - 2]

    def cumulants(self, R: int) -> np.ndarray:
        """kappa_2(W) .. kappa_R(W)."""
        return np.array([self.cumulant(r) for r in range(2, R + 1)])

    def check_nonvanishing(self, R: int) -> None:
        vals = self.cumulants(R)
        if np.any(vals == 0):
            r = int(np.flatnonzero(vals == 0)[0]) + 2
            raise ValueError(f"noise cumulant of order {r} vanishes")


CHI2 = BaseNoise.chi2()


def _as_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChaosCoefficients:
    """F = sum_k alphas[k] * W_k.

    ``convention`` is "raw" (any square-summable list) or "unit" (sum of
    squares equal to 1 within 1e-10).  Coefficients are never rescaled
    behind the caller's back.
    """

    alphas: np.ndarray
    noise: BaseNoise = CHI2
    convention: str = "raw"

    def __post_init__(self):
        a = _as_vector(self.alphas)
        object.__setattr__(self, "alphas", a)
        if a.size == 0:
            raise ValueError("coefficient list is empty")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        if self.convention not in ("raw", "unit"):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.convention == "unit" and abs(np.sum(a * a) - 1) > UNIT_TOL:
            raise ValueError("unit convention requires sum of squares 1")

    @property
    def norm2(self) -> float:
        return float(np.sum(self.alphas**2))

    def variance(self) -> float:
        return self.noise.cumulant(2) * self.norm2


@dataclass(frozen=True, eq=False)
class TargetSpec:
    """Limit law F_inf = sum_i alphas[i] W_i with q distinct nonzero entries."""

    alphas: np.ndarray
    noise: BaseNoise = CHI2
    convention: str = "unit"

    def __post_init__(self):
        a = _as_vector(self.alphas)
        object.__setattr__(self, "alphas", a)
        if a.size == 0:
            raise InvalidTargetError("target needs at least one coefficient")
        if not np.all(np.isfinite(a)):
            raise InvalidTargetError("target coefficients must be finite")
        if np.any(np.abs(a) <= DISTINCT_TOL):
            raise InvalidTargetError("target coefficients must be nonzero")
        s = np.sort(a)
        if a.size > 1 and np.min(np.diff(s)) <= DISTINCT_TOL:
            raise InvalidTargetError("target coefficients must be pairwise distinct")
        if self.convention not in ("raw", "unit"):
            raise InvalidTargetError(f"unknown convention {self.convention!r}")
        if self.convention == "unit" and abs(np.sum(a * a) - 1) > UNIT_TOL:
            raise InvalidTargetError("target must lie on the unit sphere")

    @property
    def q(self) -> int:
        return int(self.alphas.size)

    def as_coefficients(self) -> ChaosCoefficients:
        return ChaosCoefficients(self.alphas, self.noise, self.convention)


@dataclass(frozen=True, eq=False)
class QPolynomial:
    """Q(x) = x**2 * prod_i (x - roots_i)**2 in ascending powers.

    ``thetas[r]`` is the coefficient of x**r, so thetas[0] = thetas[1] = 0 and
    thetas[2q+2] = 1.
    """

    thetas: np.ndarray
    roots: np.ndarray

    @property
    def degree(self) -> int:
        return self.thetas.size - 1

    def theta(self, r: int) -> float:
        return float(self.thetas[r])

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.thetas)

    def from_roots(self, x):
        x = np.asarray(x, dtype=float)
        out = x * x
        for r in self.roots[1:]:
            out = out * (x - r) ** 2
        return out


@dataclass(frozen=True, eq=False)
class CumulantVector:
    """kappa_2 .. kappa_R stored so that ``values[r - 2]`` is kappa_r."""

    values: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.values)
        object.__setattr__(self, "values", v)
        if v.size == 0 or not v[0] > 0:
            raise ValueError("kappa_2 must be positive")

    @property
    def R(self) -> int:
        return self.values.size + 1

    def __getitem__(self, r: int) -> float:
        if not 2 <= r <= self.R:
            raise KeyError(r)
        return float(self.values[r - 2])


def theta_coefficients(target: TargetSpec) -> QPolynomial:
    """Expand Q for the target by convolving linear factors and squaring."""
    p = np.array([0.0, 1.0])  # the factor x
    for r in target.alphas:
        p = np.convolve(p, [-r, 1.0])
    thetas = np.convolve(p, p)
    thetas[:2] = 0.0
    thetas[-1] = 1.0
    thetas.setflags(write=False)
    roots = _as_vector(np.concatenate([[0.0], target.alphas]))
    return QPolynomial(thetas, roots)


def power_sums(alphas, R: int) -> np.ndarray:
    """sum_k alphas**r for r = 2..R."""
    a = np.asarray(alphas, dtype=float)
    powers = a[None, :] ** np.arange(2, R + 1)[:, None]
    return powers.sum(axis=1)


def cumulants_from_coefficients(coeffs: ChaosCoefficients, R: int) -> CumulantVector:
    if R < 2:
        raise ValueError("order R must be >= 2")
    if R > coeffs.noise.max_order:
        raise ValueError(f"noise cumulants only known up to order {coeffs.noise.max_order}")
    return CumulantVector(coeffs.noise.cumulants(R) * power_sums(coeffs.alphas, R))


def _same_noise(coeffs: ChaosCoefficients, target: TargetSpec) -> None:
    if coeffs.noise != target.noise:
        raise ValueError("coefficients and target use different noise models")


def delta_via_roots(coeffs: ChaosCoefficients, target: TargetSpec) -> float:
    """Delta = sum_k alpha_k**2 prod_r (alpha_k - alpha_inf_r)**2."""
    _same_noise(coeffs, target)
    a = coeffs.alphas
    diffs = a[:, None] - target.alphas[None, :]
    return float(np.sum(a * a * np.prod(diffs * diffs, axis=1)))


def delta_via_cumulants(kappas: CumulantVector, noise: BaseNoise, theta: QPolynomial) -> float:
    """Delta = sum_r Theta_r kappa_r(F) / kappa_r(W)."""
    R = theta.degree
    if kappas.R < R:
        raise ValueError(f"need cumulants up to order {R}, got {kappas.R}")
    noise.check_nonvanishing(R)
    ratios = kappas.values[: R - 1] / noise.cumulants(R)
    return float(np.dot(theta.thetas[2:], ratios))


def delta(coeffs: ChaosCoefficients, target: TargetSpec, route: str = "roots") -> float:
    if route == "roots":
        return delta_via_roots(coeffs, target)
    if route == "cumulants":
        _same_noise(coeffs, target)
        theta = theta_coefficients(target)
        kap = cumulants_from_coefficients(coeffs, theta.degree)
        return delta_via_cumulants(kap, coeffs.noise, theta)
    raise ValueError(f"unknown route {route!r}")


def cumulant_gap_sum(coeffs: ChaosCoefficients, target: TargetSpec, up_to: int) -> float:
    """sum_{r=2}^{up_to} |kappa_r(F) - kappa_r(F_inf)|, with up_to <= q + 1."""
    _same_noise(coeffs, target)
    if up_to > target.q + 1:
        raise ValueError("up_to must not exceed q + 1")
    if up_to < 2:
        return 0.0
    kn = cumulants_from_coefficients(coeffs, up_to).values
    ki = cumulants_from_coefficients(target.as_coefficients(), up_to).values
    return float(np.sum(np.abs(kn - ki)))


def _check_symmetric(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric")
    return a


def jacobi_eigenvalues(matrix, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Stops once the off-diagonal Frobenius norm is below ``tol`` times the full
    norm.
    """
    a = np.array(_check_symmetric(matrix), dtype=float, copy=True)
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0:
        return np.diag(a).copy()
    mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.linalg.norm(a[mask]) <= tol * scale:
            return np.diag(a).copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * max(abs(diff), 1e-300) or abs(diff) > 1e150 * abs(apq):
                    t = apq / diff  # theta too large to square
                else:
                    theta = diff / (2 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.hypot(t, 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
    raise NumericalStabilityError("Jacobi iteration did not converge")


JACOBI_MAX_N = 32


def eigenvalues(matrix, method: str = "auto") -> np.ndarray:
    a = _check_symmetric(matrix)
    if method == "auto":
        method = "jacobi" if a.shape[0] <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        return jacobi_eigenvalues(a)
    if method == "lapack":
        return np.linalg.eigvalsh(a)
    raise ValueError(f"unknown eigen method {method!r}")


def quadratic_form_coefficients(matrix, noise: BaseNoise = CHI2, method: str = "auto") -> ChaosCoefficients:
    """Eigenvalues of a symmetric matrix, sorted by decreasing absolute value."""
    lam = eigenvalues(matrix, method)
    order = np.lexsort((-lam, -np.abs(lam)))
    return ChaosCoefficients(lam[order], noise)


def trace_powers(matrix, R: int, method: str = "auto") -> np.ndarray:
    """Tr(A**r) for r = 2..R, from the eigenvalues."""
    if R < 2:
        raise ValueError("order R must be >= 2")
    return power_sums(eigenvalues(matrix, method), R)


def trace_powers_direct(matrix, R: int) -> np.ndarray:
    """Tr(A**r) for r = 2..R by repeated multiplication."""
    if R < 2:
        raise ValueError("order R must be >= 2")
    a = _check_symmetric(matrix)
    out = []
    p = a @ a
    for _ in range(2, R + 1):
        out.append(np.trace(p))
        p = p @ a
    return np.array(out)
