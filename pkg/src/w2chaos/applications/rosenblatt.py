"""Cumulants of the generalized Rosenblatt variable Z_{g1,g2} and its chi-square limit.

kappa_m(Z) = (1/2) (m-1)! A**m C_m with

C_m = sum_{sigma in {1,2}^m} int_{(0,1)^m} prod_j k_j(s_j, s_{j-1}),
k_j = |s_j - s_{j-1}|**e_j * (B(g[sigma'_{j-1}] + 1, -e_j) if s_j > s_{j-1}
                               else B(g[sigma_j] + 1, -e_j)),
e_j = g[sigma_j] + g[sigma'_{j-1}] + 1,

where sigma' swaps the labels 1 and 2 and indices are cyclic (s_0 = s_m).

Quadrature route: split (0,1)^m by the rank order of the s_j.  On one
ordering write the sorted points as t_1 + partial sums of gaps w p with p on
the (m-2)-simplex.  Each factor is (w * span_j(p))**e_j, the translation t_1
contributes (1 - w), and the radial integral is exactly
1/((S+m-1)(S+m)) with S = sum_j e_j.  What is left is a smooth-but-singular
integral over the simplex, done with graded Gauss-Legendre in stick-breaking
coordinates.

Monte Carlo route: the sum over sigma of the cyclic product equals the
trace of a product of 2x2 matrices M_j[a, b] = k_j(sigma_j = a, sigma_{j-1} = b).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import beta, betaln

from ..chaos_model import TargetSpec
from ..errors import DomainError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RosenblattParams:
    """gamma1 in (-1, -1/2), rho in (0, 1); gamma2 = (gamma1 + 1/2)/rho - 1/2."""

    gamma1: float
    rho: float

    def __post_init__(self):
        if not -1 < self.gamma1 < -0.5:
            raise DomainError("gamma1 must lie in (-1, -1/2)")
        if not 0 < self.rho < 1:
            raise DomainError("rho must lie in (0, 1)")
        g2 = self.gamma2
        if not -1 < g2 < -0.5:
            raise DomainError("derived gamma2 leaves (-1, -1/2)")
        if self.gamma1 + g2 <= -1.5:
            raise DomainError("gamma1 + gamma2 must exceed -3/2")

    @property
    def gamma2(self) -> float:
        return (self.gamma1 + 0.5) / self.rho - 0.5

    @property
    def eps(self) -> float:
        return -self.gamma1 - 0.5

    @property
    def gammas(self) -> tuple[float, float]:
        return self.gamma1, self.gamma2


def _betaln_checked(a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise DomainError(f"Beta arguments must be positive, got ({a}, {b})")
    return float(betaln(a, b))


def rosenblatt_A(params: RosenblattParams) -> float:
    g1, g2 = params.gammas
    g = g1 + g2
    num = (g + 2) * (2 * g + 3)
    t1 = _betaln_checked(g1 + 1, -g - 1) + _betaln_checked(g2 + 1, -g - 1)
    t2 = _betaln_checked(g1 + 1, -2 * g1 - 1) + _betaln_checked(g2 + 1, -2 * g2 - 1)
    hi = max(t1, t2)
    log_den = hi + math.log(math.exp(t1 - hi) + math.exp(t2 - hi))
    return math.exp(0.5 * (math.log(num) - log_den))


def _edge_tables(params: RosenblattParams):
    """Exponent e[a, b] and weights for sigma_j = a, sigma_{j-1} = b (labels 0, 1)."""
    g = np.array(params.gammas)
    e = np.empty((2, 2))
    w_up = np.empty((2, 2))
    w_down = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            bp = 1 - b
            e[a, b] = g[a] + g[bp] + 1
            w_up[a, b] = beta(g[bp] + 1, -e[a, b])
            w_down[a, b] = beta(g[a] + 1, -e[a, b])
    return e, w_up, w_down


def _graded_rule(points: int, k: float = 4.0):
    u, wu = np.polynomial.legendre.leggauss(points)
    u = (u + 1) / 2
    wu = wu / 2
    uk, vk = u**k, (1 - u) ** k
    v = uk / (uk + vk)
    dv = k * u ** (k - 1) * (1 - u) ** (k - 1) / (uk + vk) ** 2
    return v, wu * dv


def _simplex_nodes(dim: int, points: int):
    """Nodes on {p >= 0, sum p = 1} in R^(dim+1) with weights for its Lebesgue measure."""
    if dim == 0:
        return np.ones((1, 1)), np.ones(1)
    v, w = _graded_rule(points)
    grids = np.meshgrid(*([v] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    V = np.stack([gr.ravel() for gr in grids], axis=1)
    W = np.prod(np.stack([gr.ravel() for gr in wgrids], axis=1), axis=1)
    P = np.empty((V.shape[0], dim + 1))
    rest = np.ones(V.shape[0])
    for i in range(dim):
        P[:, i] = rest * V[:, i]
        W = W * rest  # d p_i / d v_i = prod_{k<i} (1 - v_k)
        rest = rest * (1 - V[:, i])
    P[:, dim] = rest
    return P, W


def _quadrature_Cm(params: RosenblattParams, m: int, points: int) -> float:
    e_tab, w_up, w_down = _edge_tables(params)
    sigmas = np.array(list(itertools.product((0, 1), repeat=m)))
    cur = sigmas
    prev = np.roll(sigmas, 1, axis=1)  # prev[:, j] = sigma_{j-1}, cyclic
    E = e_tab[cur, prev]  # (2^m, m)
    S = E.sum(axis=1)
    radial = 1.0 / ((S + m - 1) * (S + m))
    P, W = _simplex_nodes(m - 2, points)
    total = 0.0
    for order in itertools.permutations(range(m)):
        rank = np.empty(m, dtype=int)
        rank[list(order)] = np.arange(m)
        r_cur = rank
        r_prev = np.roll(rank, 1)
        up = r_cur > r_prev
        lo = np.minimum(r_cur, r_prev)
        hi = np.maximum(r_cur, r_prev)
        # summing gaps directly avoids cancellation in differences of partial sums
        spans = np.column_stack([P[:, a:b].sum(axis=1) for a, b in zip(lo, hi)])
        weight = np.prod(np.where(up, w_up[cur, prev], w_down[cur, prev]), axis=1)
        if m == 2:
            resid = np.ones(sigmas.shape[0])
        else:
            resid = np.exp(np.log(spans) @ E.T).T @ W
        total += float(np.sum(weight * radial * resid))
    return total


def _mc_Cm(params: RosenblattParams, m: int, N: int, seed: int, chunk: int = 1 << 18):
    e_tab, w_up, w_down = _edge_tables(params)
    acc = []
    for c, start in enumerate(range(0, N, chunk)):
        n = min(chunk, N - start)
        rng = np.random.Generator(np.random.Philox(key=(seed & (2**64 - 1)) | (c << 64)))
        s = rng.random((n, m))
        prod = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
        for j in range(m):
            d = s[:, j] - s[:, j - 1]
            ad = np.abs(d)[:, None, None]
            w = np.where(d[:, None, None] > 0, w_up[None], w_down[None])
            Mj = ad ** e_tab[None] * w
            prod = Mj @ prod
        acc.append(np.trace(prod, axis1=1, axis2=2))
    vals = np.concatenate(acc)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def rosenblatt_Cm(params: RosenblattParams, m: int, scheme: str | None = None,
                  points: int = 64, N: int = 10**7, seed: int = 0) -> tuple[float, float]:
    """(C_m, error estimate).

    Quadrature error: difference to a half-resolution rule, floored at a
    rounding allowance of 64 machine epsilons.  Monte Carlo error: one
    standard error; it is unreliable when some exponent is below -1/2, where
    the integrand has infinite variance.
    """
    if not 2 <= m <= 6:
        raise ValueError("m must be in 2..6")
    if scheme is None:
        scheme = "quadrature" if m <= 4 else "mc"
    if scheme == "quadrature":
        val = _quadrature_Cm(params, m, points)
        coarse = _quadrature_Cm(params, m, max(points // 2, 4)) if m > 2 else val
        return val, max(abs(val - coarse), 64 * EPS * abs(val))
    if scheme == "mc":
        return _mc_Cm(params, m, int(N), seed)
    raise ValueError(f"unknown scheme {scheme!r}")


def rosenblatt_cumulant(params: RosenblattParams, m: int, **kw) -> tuple[float, float]:
    """(kappa_m(Z), error) from A and C_m."""
    A = rosenblatt_A(params)
    C, err = rosenblatt_Cm(params, m, **kw)
    f = 0.5 * math.factorial(m - 1) * A**m
    return f * C, f * err


def y_rho_ab(rho: float) -> tuple[float, float]:
    if not 0 < rho < 1:
        raise DomainError("rho must lie in (0, 1)")
    u = 1 / (rho + 1)
    v = 1 / (2 * math.sqrt(rho))
    d = math.sqrt(2 / (rho + 1) ** 2 + 1 / (2 * rho))
    return (u + v) / d, (u - v) / d


def y_rho_target(rho: float) -> TargetSpec:
    """Y_rho = (a/sqrt2)(Z_1**2 - 1) + (b/sqrt2)(Z_2**2 - 1), raw chi-square coefficients."""
    a, b = y_rho_ab(rho)
    return TargetSpec([a / math.sqrt(2), b / math.sqrt(2)], convention="raw")


def y_rho_cumulant(rho: float, m: int) -> float:
    a, b = y_rho_ab(rho)
    return 2 ** (m / 2 - 1) * (a**m + b**m) * math.factorial(m - 1)
