"""Permutation distance d_sigma on the unit sphere and its certified bounds.

d_sigma(x, y) = min over re-indexings pi of ||x - y_pi||_2.  The bounds
compare d_sigma(x, y) with sqrt(sum_i Q_x(y_i)) through constants that are all
computed here: delta_x, eta, kappa, alpha_x, C_x and C~_x.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .chaos_model import UNIT_TOL, ChaosCoefficients, TargetSpec, delta_via_roots
from .errors import NumericalStabilityError

ADHERENCE_TOL = 1e-9
ENUM_LIMIT = 20_000_000


@dataclass(frozen=True)
class MatchingResult:
    distance: float
    pairing: tuple[tuple[int, int], ...]


def _on_sphere(v: np.ndarray, name: str) -> None:
    if abs(float(np.sum(v * v)) - 1) > UNIT_TOL:
        raise ValueError(f"{name} is not on the unit sphere")


def d_sigma(x, y, require_unit: bool = True) -> MatchingResult:
    """Minimal l2 distance over re-indexings of zero-padded sequences.

    Both lists are padded to len(x) + len(y) so that any entry may be matched
    to an implicit zero, then sorted and paired by rank.  Pairs index into the
    padded lists; indices past the original length refer to padding zeros.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if require_unit:
        _on_sphere(x, "x")
        _on_sphere(y, "y")
    L = x.size + y.size
    xp = np.zeros(L)
    yp = np.zeros(L)
    xp[: x.size] = x
    yp[: y.size] = y
    ox = np.argsort(xp, kind="stable")
    oy = np.argsort(yp, kind="stable")
    gaps = xp[ox] - yp[oy]
    pairing = tuple((int(i), int(j)) for i, j in zip(ox, oy))
    return MatchingResult(float(math.sqrt(np.sum(gaps * gaps))), pairing)


def d_sigma_bruteforce(x, y) -> float:
    """Exhaustive minimum over all permutations; only for short inputs."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    L = x.size + y.size
    xp = np.concatenate([x, np.zeros(L - x.size)])
    yp = np.concatenate([y, np.zeros(L - y.size)])
    best = math.inf
    for perm in itertools.permutations(range(L)):
        best = min(best, float(np.sum((xp - yp[list(perm)]) ** 2)))
    return math.sqrt(best)


def _g_poly(x: np.ndarray):
    """Coefficients of G(t) = prod(t - x_i)**2 + sum_i t**2 prod_{j != i}(t - x_j)**2."""
    P = np.polynomial.polynomial
    full = P.polyfromroots(x)
    g = P.polymul(full, full)
    for i in range(x.size):
        rest = P.polyfromroots(np.delete(x, i))
        g = P.polyadd(g, P.polymul([0, 0, 1], P.polymul(rest, rest)))
    return g


def delta_x_constant(x) -> float:
    """Global minimum of G over the real line.

    G is a sum of squared distances to points of [lo, hi] (the roots and 0), so
    it decreases when t moves toward that bracket; padding by 1 on each side
    and scanning at step 1e-3 locates the basin, which is then refined.
    """
    x = np.asarray(x, dtype=float).ravel()
    g = _g_poly(x)
    ev = lambda t: np.polynomial.polynomial.polyval(t, g)  # noqa: E731
    lo = min(x.min(), 0.0) - 1
    hi = max(x.max(), 0.0) + 1
    grid = np.arange(lo, hi + 1e-3, 1e-3)
    vals = ev(grid)
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(ev, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
    return float(min(res.fun, vals[i]))


def _count_vectors(x2: np.ndarray, cap: float) -> tuple[np.ndarray, np.ndarray]:
    """All nonnegative integer n with sum n_j x2_j <= cap, and their sums."""
    vecs = np.zeros((1, 0), dtype=np.int64)
    sums = np.zeros(1)
    for w in x2:
        counts = np.floor((cap - sums) / w + 1e-12).astype(np.int64) + 1
        total = int(counts.sum())
        if total > ENUM_LIMIT:
            raise NumericalStabilityError("adherence enumeration too large; lower search_cap")
        rep = np.repeat(np.arange(sums.size), counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        vecs = np.column_stack([vecs[rep], offsets])
        sums = sums[rep] + offsets * w
    return vecs, sums


def _eta_kappa(x2: np.ndarray, cap: float):
    vecs, sums = _count_vectors(x2, cap)
    ones = np.all(vecs == 1, axis=1)
    in_e = np.abs(sums - 1) <= ADHERENCE_TOL
    dist = np.where(in_e, 0.0, np.abs(np.sqrt(sums) - 1))
    # anything beyond the cap has sqrt(sum) - 1 >= sqrt(cap) - 1
    beyond = math.sqrt(cap) - 1
    eta = float(min(dist[~ones].min(initial=math.inf), beyond))
    kappa = float(min(dist[~in_e].min(initial=math.inf), beyond))
    adherence = tuple(tuple(int(v) for v in row) for row in vecs[in_e])
    return eta, kappa, tuple(sorted(adherence))


def eta_and_adherence(x, search_cap: float = 4.0):
    """Return (eta, kappa, E) for the squared target entries.

    With search_cap >= 4 every vector beyond the cap is at distance >= 1
    while n = 0 already gives 1, so the enumeration is exact.  Smaller caps are
    checked against a doubled cap and rejected if anything changes.
    """
    x = np.asarray(x, dtype=float).ravel()
    if np.any(x == 0):
        raise ValueError("entries must be nonzero")
    x2 = x * x
    res = _eta_kappa(x2, search_cap)
    if search_cap < 4:
        wider = _eta_kappa(x2, 2 * search_cap)
        if not (math.isclose(res[0], wider[0], abs_tol=1e-12)
                and math.isclose(res[1], wider[1], abs_tol=1e-12) and res[2] == wider[2]):
            raise NumericalStabilityError("adherence constants changed when doubling search_cap")
    return res


def _alpha_search(M: np.ndarray, K: int) -> float:
    """min of ||M k||_inf over integer k != 0 with ||k||_inf <= K.

    k and -k give the same value, so the first coordinate runs over 0..K and
    the rest of the box is enumerated one slice at a time.
    """
    s = M.shape[0]
    if (K + 1) * (2 * K + 1) ** (s - 1) > ENUM_LIMIT:
        raise NumericalStabilityError(f"alpha_x search with K={K} in dimension {s} too large")
    rng = np.arange(-K, K + 1, dtype=float)
    rest = np.stack(np.meshgrid(*([rng] * (s - 1)), indexing="ij"), -1).reshape(-1, s - 1) if s > 1 \
        else np.zeros((1, 0))
    base = rest @ M[:, 1:].T
    best = math.inf
    for k1 in range(K + 1):
        vals = np.max(np.abs(base + k1 * M[:, 0]), axis=1)
        if k1 == 0:
            vals = vals[np.any(rest != 0, axis=1)]
            if vals.size == 0:
                continue
        best = min(best, float(vals.min()))
    return best


def alpha_x_constant(u) -> float:
    """min over integer k != 0 of ||M k||_inf with M = V^T diag(u**2), V_ij = u_i**j.

    If ||M k||_inf <= v then ||k||_inf <= ||M^{-1}||_inf v, so a search over
    ||k||_inf <= K(v) is exhaustive for any attained value v.  Starting from
    the best unit vector, a small search usually lowers v and with it K.  The
    result is re-derived at 2 K as a consistency check when affordable.
    """
    u = np.asarray(u, dtype=float).ravel()
    s = u.size
    if s > 1 and np.min(np.diff(np.sort(u))) <= 1e-12:
        raise ValueError("Vandermonde matrix is singular (duplicate roots)")
    V = np.vander(u, s, increasing=True)
    M = V.T @ np.diag(u * u)
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise ValueError("Vandermonde matrix is singular") from exc
    norm_inv = np.linalg.norm(Minv, np.inf)
    radius = lambda v: max(1, math.ceil(norm_inv * v))  # noqa: E731
    v = float(np.min(np.max(np.abs(M), axis=0)))
    K = radius(v)
    probe = 2
    while probe < K:
        v = min(v, _alpha_search(M, probe))
        K = radius(v)
        probe *= 2
    best = _alpha_search(M, K)
    if (2 * K + 1) * (4 * K + 1) ** (s - 1) <= ENUM_LIMIT:
        if not math.isclose(_alpha_search(M, 2 * K), best, rel_tol=1e-12):
            raise NumericalStabilityError("alpha_x changed when doubling K_max")
    if not best > 0:
        raise NumericalStabilityError("alpha_x search returned zero")
    return best


def delta_p_gap(x, y, p: int) -> float:
    """|sum y_i**p - sum x_i**p|."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(abs(np.sum(y**p) - np.sum(x**p)))


@dataclass(frozen=True)
class BoundConstants:
    delta_x: float
    eta: float
    kappa_const: float
    alpha_x: float
    C_x: float
    C_tilde_x: float
    adherence_set: tuple[tuple[int, ...], ...]

    @property
    def independent(self) -> bool:
        return len(self.adherence_set) == 1


@lru_cache(maxsize=256)
def _constants_cached(x: tuple[float, ...], search_cap: float) -> BoundConstants:
    xv = np.array(x)
    q = xv.size
    dx = delta_x_constant(xv)
    eta, kap, E = eta_and_adherence(xv, search_cap)
    ax = alpha_x_constant(xv)
    gap = eta if eta > 0 else kap
    C = (1 + 2 / gap) * math.sqrt((q + 1) / dx)
    Ckap = (1 + 2 / kap) * math.sqrt((q + 1) / dx)
    Ct = 2 * (q + 1) * Ckap * (1 + 2 / ax)
    return BoundConstants(dx, eta, kap, ax, C, Ct, E)


def bound_constants(x, search_cap: float = 4.0) -> BoundConstants:
    x = np.asarray(x, dtype=float).ravel()
    _on_sphere(x, "target")
    return _constants_cached(tuple(float(v) for v in x), float(search_cap))


@dataclass(frozen=True)
class CertifiedBound:
    """Certified bound on d_sigma and the implied bound on W2.

    Every factor is computed; ``symbolic`` lists factors left unevaluated,
    which is empty here.
    """

    value: float
    w2_bound: float
    branch: str
    delta: float
    constants: BoundConstants
    symbolic: tuple[str, ...] = ()


def _bound_on_sphere(x: np.ndarray, y: np.ndarray, consts: BoundConstants) -> tuple[float, str]:
    # product form so that Q vanishes exactly on the roots
    q_vals = np.prod((y[:, None] - np.concatenate([[0.0], x])[None, :]) ** 2, axis=1)
    sd = math.sqrt(max(float(np.sum(q_vals)), 0.0))
    if consts.independent:
        return consts.C_x * sd, "independent"
    gaps = sum(delta_p_gap(x, y, p) for p in range(3, x.size + 2))
    return consts.C_tilde_x * (sd + gaps), "dependent"


def certified_upper_bound(target: TargetSpec, coeffs: ChaosCoefficients,
                          search_cap: float = 4.0) -> CertifiedBound:
    """C_x sqrt(Delta) when E is the singleton, else C~_x (sqrt(Delta) + sum_p Delta_p)."""
    if target.convention != "unit" or coeffs.convention != "unit":
        raise ValueError("certified bound needs both inputs in the unit convention")
    if target.noise != coeffs.noise:
        raise ValueError("coefficients and target use different noise models")
    consts = bound_constants(target.alphas, search_cap)
    value, branch = _bound_on_sphere(target.alphas, coeffs.alphas, consts)
    d = delta_via_roots(coeffs, target)
    w2 = math.sqrt(target.noise.cumulant(2)) * value
    return CertifiedBound(value, w2, branch, d, consts)


def certified_w2_bound(coeffs: ChaosCoefficients, target: TargetSpec,
                       search_cap: float = 4.0) -> CertifiedBound:
    """W2 bound for inputs in any convention.

    With s = ||alpha_inf||, x = alpha_inf/s and y = alpha_n/s, the triangle
    inequality gives d_sigma(y, x) <= bound(x, y/||y||) + | ||y|| - 1 |, and
    W2 <= sqrt(kappa_2(W)) s d_sigma(y, x).
    """
    if target.noise != coeffs.noise:
        raise ValueError("coefficients and target use different noise models")
    s = float(np.linalg.norm(target.alphas))
    x = target.alphas / s
    y = coeffs.alphas / s
    ny = float(np.linalg.norm(y))
    consts = bound_constants(x, search_cap)
    if ny == 0:
        value, branch = 1.0, "zero"
    else:
        value, branch = _bound_on_sphere(x, y / ny, consts)
        value += abs(ny - 1)
    d = delta_via_roots(coeffs, target)
    w2 = math.sqrt(target.noise.cumulant(2)) * s * value
    return CertifiedBound(value, w2, branch, d, consts)


@dataclass(frozen=True)
class ProbeResult:
    independent: bool
    relation: tuple[int, ...] | None
    M: int


def rational_independence_probe(squares, M: int = 50, tol: float = 1e-9) -> ProbeResult:
    """Search integer m != 0 with ||m||_inf <= M and sum m_j x_j ~ 0.

    The last coordinate is solved for by rounding, so the cost is
    (2M+1)**(q-1).  Among relations found, the one with the smallest sup norm
    is reported, sign-normalized so its first nonzero entry is positive.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    x = np.asarray(squares, dtype=float).ravel()
    q = x.size
    if q < 2:
        return ProbeResult(True, None, M)
    if (2 * M + 1) ** (q - 1) > ENUM_LIMIT:
        raise NumericalStabilityError("probe search space too large")
    rng = np.arange(-M, M + 1)
    prefix = np.stack(np.meshgrid(*([rng] * (q - 1)), indexing="ij"), -1).reshape(-1, q - 1)
    partial = prefix @ x[:-1]
    last = np.rint(-partial / x[-1])
    m = np.column_stack([prefix, last]).astype(np.int64)
    resid = np.abs(partial + last * x[-1])
    scale = np.abs(m) @ np.abs(x)
    ok = (np.abs(last) <= M) & np.any(m != 0, axis=1) & (resid <= tol * scale)
    if not np.any(ok):
        return ProbeResult(True, None, M)
    cand = m[ok]
    norms = np.max(np.abs(cand), axis=1)
    cand = cand[norms == norms.min()]
    first = cand[np.arange(cand.shape[0]), np.argmax(cand != 0, axis=1)]
    cand = cand * np.sign(first)[:, None]
    best = sorted(map(tuple, cand.tolist()), reverse=True)[0]
    return ProbeResult(False, tuple(int(v) for v in best), M)
