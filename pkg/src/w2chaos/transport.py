"""Sampling, W2 estimators and characteristic-function lower bounds.

Random numbers come from numpy's Philox counter-based generator.  Draws are
split into fixed chunks of CHUNK values; the normals feeding coefficient slot k
in chunk c come from the stream keyed by (seed, k, c).  Consequences:

* batches are byte-identical for identical (coefficients, N, seed),
  whatever the number of worker threads;
* two batches drawn with the same seed share the noise W_k slot by slot
  (common random numbers), which makes differences of nearby laws cheap to
  estimate.  Use distinct seeds for independent batches.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from .chaos_model import ChaosCoefficients, CumulantVector, TargetSpec, cumulants_from_coefficients
from .errors import DomainError
from .matching import d_sigma

CHUNK = 1 << 16
GENERATOR_ID = "philox4x64/ziggurat"
N_FOLDS = 10


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    seed: int
    generator: str = GENERATOR_ID

    def __len__(self):
        return self.values.size


def _stream(seed: int, slot: int, chunk: int) -> np.random.Generator:
    key = (seed & (2**64 - 1)) | (chunk << 64) | (slot << 96)
    return np.random.Generator(np.random.Philox(key=key))


def _chunk_draws(alphas: np.ndarray, scale: float, seed: int, c: int, m: int) -> np.ndarray:
    acc = np.zeros(m)
    for k, a in enumerate(alphas):
        if a == 0.0:
            continue
        z = _stream(seed, k, c).standard_normal(m)
        acc += (a * scale) * (z * z - 1.0)
    return acc


def sample_chaos(coeffs: ChaosCoefficients, N: int, seed: int = 0, threads: int | None = 1) -> SampleBatch:
    """N i.i.d. draws of sum_k alpha_k W_k."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    noise = coeffs.noise
    if noise.sampler != "chi2" or noise.kind != "chi2_centered":
        raise ValueError(f"no sampler for noise {noise.kind!r}/{noise.sampler!r}")
    starts = list(range(0, N, CHUNK))
    jobs = [(c, min(CHUNK, N - s)) for c, s in enumerate(starts)]
    run = lambda job: _chunk_draws(coeffs.alphas, noise.scale, seed, *job)  # noqa: E731
    if threads == 1 or len(jobs) == 1:
        parts = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, jobs))
    values = np.concatenate(parts)
    values.setflags(write=False)
    return SampleBatch(values, seed)


def _values(b) -> np.ndarray:
    return b.values if isinstance(b, SampleBatch) else np.asarray(b, dtype=float)


def empirical_w2(a, b) -> tuple[float, float]:
    """Quantile-coupling W2 estimate and a 10-fold standard error.

    Folds are contiguous index blocks taken identically from both batches.
    """
    x, y = _values(a), _values(b)
    if x.size != y.size:
        raise ValueError("batches must have equal size")
    est = math.sqrt(np.mean((np.sort(x) - np.sort(y)) ** 2))
    if x.size < 2 * N_FOLDS:
        return est, math.nan
    folds = [math.sqrt(np.mean((np.sort(fx) - np.sort(fy)) ** 2))
             for fx, fy in zip(np.array_split(x, N_FOLDS), np.array_split(y, N_FOLDS))]
    return est, float(np.std(folds, ddof=1) / math.sqrt(N_FOLDS))


def aligned_difference(coeffs_n: ChaosCoefficients, target: TargetSpec) -> np.ndarray:
    """Coefficient differences after the d_sigma-optimal alignment."""
    m = d_sigma(target.alphas, coeffs_n.alphas, require_unit=False)
    L = target.alphas.size + coeffs_n.alphas.size
    x = np.zeros(L)
    y = np.zeros(L)
    x[: target.alphas.size] = target.alphas
    y[: coeffs_n.alphas.size] = coeffs_n.alphas
    return np.array([y[j] - x[i] for i, j in m.pairing])


def coupled_w2_upper(coeffs_n: ChaosCoefficients, target: TargetSpec, N: int, seed: int = 0) -> float:
    """RMS of F_n - F_inf when matched slots share the same W_k.

    Matched pairs (y_j, x_i) use one noise variable, so F_n - F_inf is the
    chaos with the aligned differences as coefficients.
    """
    if coeffs_n.noise != target.noise:
        raise ValueError("coefficients and target use different noise models")
    diff = ChaosCoefficients(aligned_difference(coeffs_n, target), coeffs_n.noise)
    v = sample_chaos(diff, N, seed).values
    return float(math.sqrt(np.mean(v * v)))


def coupled_w2_exact(coeffs_n: ChaosCoefficients, target: TargetSpec) -> float:
    """sqrt(kappa_2(W)) * d_sigma, the mean of the coupled estimator."""
    diff = aligned_difference(coeffs_n, target)
    return float(math.sqrt(coeffs_n.noise.cumulant(2)) * np.linalg.norm(diff))


@dataclass(frozen=True)
class CFPoint:
    t: complex
    phi: complex
    phi_prime: complex


def _effective(coeffs) -> np.ndarray:
    noise = coeffs.noise
    if noise.kind != "chi2_centered":
        raise ValueError("characteristic function available for chi-square noise only")
    return coeffs.alphas * noise.scale


def _strip(eff: np.ndarray) -> float:
    amax = float(np.max(np.abs(eff)))
    return math.inf if amax == 0 else 1 / (2 * amax)


def _phi_and_logderiv(eff: np.ndarray, t: np.ndarray):
    t = np.asarray(t, dtype=complex)
    if np.any(np.abs(t.imag) >= _strip(eff)):
        raise DomainError("t outside the analyticity strip |Im t| < 1/(2 max|alpha|)")
    ta = t[..., None] * eff
    one = 1 - 2j * ta
    phi = np.prod(np.exp(-1j * ta) / np.sqrt(one), axis=-1)
    logd = np.sum(-1j * eff + 1j * eff / one, axis=-1)
    return phi, logd


def char_fn(coeffs, t) -> CFPoint | list[CFPoint]:
    """phi(t) = prod_k exp(-i t a_k) / sqrt(1 - 2 i t a_k), principal branch."""
    eff = _effective(coeffs)
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=complex))
    phi, logd = _phi_and_logderiv(eff, tt)
    pts = [CFPoint(complex(a), complex(p), complex(p * d)) for a, p, d in zip(tt, phi, logd)]
    return pts[0] if scalar else pts


def default_t_grid(anchors=()) -> np.ndarray:
    grid = np.logspace(-2, 3, 200)
    if len(anchors):
        grid = np.union1d(grid, np.abs(np.asarray(anchors, dtype=float)))
    return grid


def cf_lower_bound(coeffs_n, target, t_grid=None, anchors=()) -> float:
    """max over the grid of |phi_n(t) - phi_inf(t)| / |t|, a lower bound on W2."""
    t = default_t_grid(anchors) if t_grid is None else np.union1d(np.asarray(t_grid, float), anchors)
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        raise ValueError("empty t grid")
    if np.any(t == 0):
        raise ValueError("t grid must exclude 0")
    pn, _ = _phi_and_logderiv(_effective(coeffs_n), t)
    pi, _ = _phi_and_logderiv(_effective(target), t)
    return float(np.max(np.abs(pn - pi) / np.abs(t)))


def logderiv_gap_circle(coeffs_n, target, rho: float, n_theta: int = 512) -> float:
    """Trapezoid mean of |phi_inf'/phi_inf - phi_n'/phi_n|**2 on |z| = rho."""
    if not 0 < rho < 0.5:
        raise DomainError("rho must lie in (0, 1/2)")
    if n_theta < 64:
        raise ValueError("n_theta must be >= 64")
    en, ei = _effective(coeffs_n), _effective(target)
    if rho >= min(_strip(en), _strip(ei)):
        raise DomainError("circle leaves the analyticity disc")
    z = rho * np.exp(2j * np.pi * np.arange(n_theta) / n_theta)
    _, ln = _phi_and_logderiv(en, z)
    _, li = _phi_and_logderiv(ei, z)
    return float(np.mean(np.abs(li - ln) ** 2))


@dataclass(frozen=True)
class SeriesGap:
    value: float
    tail_bound: float


def cumulant_series_gap(kappas_n, kappas_inf, rho: float, R: int,
                        s: float = 1.0, v: float = 2.0) -> SeriesGap:
    """sum_{r=2}^R |dkappa_r|**2 rho**(2(r-1)) / (r-1)!**2 and a tail bound.

    For chi-square chaos with max|coefficient| <= s and the two squared
    coefficient masses summing to v, |dkappa_r| <= 2**(r-1) (r-1)! s**(r-2) v,
    so the terms past R sum to at most (v/s)**2 x**(2R) / (1 - x**2) with
    x = 2 s rho.  The defaults s = 1, v = 2 reproduce |kappa_r| <= 2**(r-1) (r-1)!.
    """
    kn = kappas_n.values if isinstance(kappas_n, CumulantVector) else np.asarray(kappas_n, float)
    ki = kappas_inf.values if isinstance(kappas_inf, CumulantVector) else np.asarray(kappas_inf, float)
    if kn.size < R - 1 or ki.size < R - 1:
        raise ValueError(f"need cumulants up to order {R}")
    x = 2 * s * rho
    if not 0 < x < 1:
        raise DomainError("series needs 0 < 2 s rho < 1")
    r = np.arange(2, R + 1)
    fact = np.array([math.factorial(k - 1) for k in r], dtype=float)
    d = kn[: R - 1] - ki[: R - 1]
    value = float(np.sum((d / fact) ** 2 * rho ** (2 * (r - 1))))
    tail = (v / s) ** 2 * x ** (2 * R) / (1 - x * x)
    return SeriesGap(value, float(tail))


def linkdn_pair(coeffs_n, target, rho: float, R: int = 60, n_theta: int = 512):
    """Circle quadrature and cumulant series for the same pair of laws."""
    tc = target.as_coefficients() if isinstance(target, TargetSpec) else target
    en, ei = _effective(coeffs_n), _effective(tc)
    s = float(max(np.max(np.abs(en)), np.max(np.abs(ei))))
    v = float(np.sum(en**2) + np.sum(ei**2))
    kn = cumulants_from_coefficients(coeffs_n, R)
    ki = cumulants_from_coefficients(tc, R)
    series = cumulant_series_gap(kn, ki, rho, R, s=s, v=v)
    circle = logderiv_gap_circle(coeffs_n, tc, rho, n_theta)
    return circle, series


def tail_bound(x):
    return np.exp(-np.asarray(x, dtype=float) / math.e)


@dataclass(frozen=True)
class TailRow:
    x: float
    bound: float
    frequency: float
    ci_low: float
    ci_high: float
    flagged: bool
    note: str = ""


def tail_probe(batch, x_list, confidence: float = 0.95) -> list[TailRow]:
    """Empirical P(|X| > x) with Wilson intervals against exp(-x/e)."""
    v = np.abs(_values(batch))
    n = v.size
    rows = []
    for x in x_list:
        x = float(x)
        b = float(tail_bound(x))
        if x <= math.e:
            rows.append(TailRow(x, b, math.nan, math.nan, math.nan, False, "skipped: x <= e"))
            continue
        k = int(np.count_nonzero(v > x))
        ci = binomtest(k, n).proportion_ci(confidence, method="wilson")
        rows.append(TailRow(x, b, k / n, float(ci.low), float(ci.high), bool(ci.low > b)))
    return rows


def empirical_kolmogorov(a, b) -> float:
    """sup |F_a - F_b| over the pooled sample points."""
    x, y = np.sort(_values(a)), np.sort(_values(b))
    pts = np.concatenate([x, y])
    fa = np.searchsorted(x, pts, side="right") / x.size
    fb = np.searchsorted(y, pts, side="right") / y.size
    return float(np.max(np.abs(fa - fb)))
