"""Quadratic forms built from a finite-rank kernel sampled on the grid i/n.

A_n[i, j] = K(i/n, j/n)/n with K(x, y) = sum_m lambda_m e_m(x) e_m(y), then
Frobenius-normalized.  The limit law is sum_m lt_m (Z_m**2 - 1) with
lt = lambda/||lambda||.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ..chaos_model import TargetSpec, theta_coefficients, trace_powers, trace_powers_direct

ORTHO_TOL = 1e-6


def _monomial_coefficients(q: int) -> np.ndarray:
    # Gram matrix of x, x**2, ..., x**q in L2(0, 1) is the Hilbert-type 1/(i+j+1)
    i = np.arange(1, q + 1)
    G = 1.0 / (i[:, None] + i[None, :] + 1)
    L = np.linalg.cholesky(G)
    return np.linalg.inv(L)  # row m holds the monomial weights of e_m


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """K(x, y) = sum_m lambdas[m] e_m(x) e_m(y).

    basis: "trig" (sqrt(2) cos(2 pi m x)), "cos" (sqrt(2) cos(pi m x)),
    "monomial" (orthonormalized x, x**2, ..., x**q) or "table" (columns of
    ``table`` on the uniform grid ``grid``, linearly interpolated).
    ``alpha`` records the Hoelder exponent of the basis.
    """

    lambdas: tuple[float, ...]
    basis: str = "trig"
    alpha: float = 1.0
    grid: np.ndarray | None = None
    table: np.ndarray | None = None
    _mono: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if not lam or any(v == 0 for v in lam):
            raise ValueError("lambdas must be nonzero")
        if len(set(lam)) != len(lam):
            raise ValueError("lambdas must be distinct")
        if self.basis not in ("trig", "cos", "monomial", "table"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.basis == "table":
            if self.grid is None or self.table is None:
                raise ValueError("table basis needs grid and table")
            tab = np.asarray(self.table, dtype=float)
            if tab.ndim != 2 or tab.shape[1] != self.q:
                raise ValueError("table needs one column per lambda")
        if self.basis == "monomial":
            object.__setattr__(self, "_mono", _monomial_coefficients(self.q))
        x = (np.arange(10_000) + 0.5) / 10_000
        E = self.evaluate(x)
        gram = E.T @ E / x.size
        if np.max(np.abs(gram - np.eye(self.q))) > ORTHO_TOL:
            raise ValueError("basis functions are not orthonormal on [0, 1]")

    @property
    def q(self) -> int:
        return len(self.lambdas)

    def evaluate(self, x) -> np.ndarray:
        """Matrix with e_m(x_i) in row i, column m."""
        x = np.asarray(x, dtype=float)
        m = np.arange(1, self.q + 1)
        if self.basis == "trig":
            return math.sqrt(2) * np.cos(2 * np.pi * x[:, None] * m)
        if self.basis == "cos":
            return math.sqrt(2) * np.cos(np.pi * x[:, None] * m)
        if self.basis == "monomial":
            return (x[:, None] ** m) @ self._mono.T
        tab = np.asarray(self.table, dtype=float)
        return np.column_stack([np.interp(x, self.grid, tab[:, k]) for k in range(self.q)])

    def target(self) -> TargetSpec:
        lam = np.array(self.lambdas)
        return TargetSpec(lam / np.linalg.norm(lam))


def read_kernel_csv(path, lambdas, alpha: float = 1.0) -> KernelSpec:
    """Basis table with header x,e_1,...,e_q on a uniform grid."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [h.strip() for h in rows[0]]
    q = len(header) - 1
    if header[0] != "x" or header[1:] != [f"e_{m}" for m in range(1, q + 1)]:
        raise ValueError("kernel CSV header must be x,e_1,...,e_q")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    x = data[:, 0]
    steps = np.diff(x)
    if x.size < 2 or np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(1.0, abs(steps[0])):
        raise ValueError("kernel CSV grid must be uniform and increasing")
    if len(lambdas) != q:
        raise ValueError(f"need {q} lambdas for this table")
    return KernelSpec(tuple(lambdas), "table", alpha, x, data[:, 1:])


def qform_matrix(kernel: KernelSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(A_n, A_n / ||A_n||_F)."""
    if n < kernel.q:
        raise ValueError("n must be >= q")
    x = np.arange(1, n + 1) / n
    E = kernel.evaluate(x)
    A = (E * np.array(kernel.lambdas)) @ E.T / n
    A = (A + A.T) / 2
    return A, A / np.linalg.norm(A)


@dataclass(frozen=True)
class GBoundResult:
    """Bracket of the quadratic-form bound; the outer constant C is symbolic.

    value = sqrt(max(inner, 0)) + cumulant_term with
    inner = sum_r Theta_r d_r and d_r = Tr(At**r) - sum_m lt_m**r.
    majorant replaces inner by sum_r |Theta_r| |d_r|.
    """

    value: float
    inner: float
    cumulant_term: float
    majorant: float
    clamped: bool
    trace_gaps: tuple[float, ...]
    symbolic: tuple[str, ...] = ("C",)


def qform_bound(normalized, target: TargetSpec, route: str = "eigen") -> GBoundResult:
    theta = theta_coefficients(target)
    R = theta.degree
    if route == "eigen":
        tr = trace_powers(normalized, R)
    elif route == "power":
        tr = trace_powers_direct(normalized, R)
    else:
        raise ValueError(f"unknown route {route!r}")
    lt = target.alphas
    d = tr - (lt[None, :] ** np.arange(2, R + 1)[:, None]).sum(axis=1)
    th = theta.thetas[2:]
    inner = float(np.dot(th, d))
    q = target.q
    c = np.array([2.0 ** (r - 1) * math.factorial(r - 1) for r in range(2, q + 2)])
    cum = float(np.sum(c * np.abs(d[:q])))
    value = math.sqrt(max(inner, 0.0)) + cum
    major = math.sqrt(float(np.dot(np.abs(th), np.abs(d)))) + cum
    return GBoundResult(value, inner, cum, major, inner < 0, tuple(float(v) for v in d))


def tau_n(normalized) -> float:
    """max_i sum_j a_ij**2."""
    a = np.asarray(normalized, dtype=float)
    return float(np.max(np.sum(a * a, axis=1)))
