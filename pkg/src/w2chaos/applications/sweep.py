"""Rate sweeps over instance families with log-log slope fits."""
from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..chaos_model import ChaosCoefficients, TargetSpec, delta_via_roots, quadratic_form_coefficients
from ..matching import certified_w2_bound
from ..transport import cf_lower_bound, coupled_w2_exact, empirical_w2, sample_chaos
from .qform import KernelSpec, qform_bound, qform_matrix, tau_n
from .rosenblatt import RosenblattParams, rosenblatt_cumulant, y_rho_cumulant
from .ustat import UStatSpec, ustat_coefficients, ustat_target

BASE_COLUMNS = ("n", "delta", "sqrt_delta", "certified_upper", "cf_lower", "w2_hat", "w2_stderr")
FAMILIES = ("ustat", "qform", "lowbound", "rosenblatt")
GOLDEN_LAMBDAS = (1.0, -0.6180339887)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    ci_low: float
    ci_high: float
    points: int


def fit_slope(x, y, level: float = 0.95) -> SlopeFit:
    """Least-squares slope of log y against log x with a t-based interval."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    if ok.sum() < 4:
        raise ValueError("slope fit needs at least 4 finite positive rows")
    res = stats.linregress(np.log(x[ok]), np.log(y[ok]))
    k = int(ok.sum())
    half = stats.t.ppf(0.5 + level / 2, k - 2) * res.stderr
    return SlopeFit(float(res.slope), float(res.slope - half), float(res.slope + half), k)


@dataclass
class RateTable:
    family: str
    x_label: str
    columns: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    slopes: dict[str, SlopeFit | None] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(self.columns) + "\n")
        for r in self.rows:
            out.write(",".join(_fmt(r[c]) for c in self.columns) + "\n")
        for name, fit in self.slopes.items():
            if fit is None:
                out.write(f"# slope,{name},nan,nan,nan\n")
            else:
                out.write(f"# slope,{name},{_fmt(fit.slope)},{_fmt(fit.ci_low)},{_fmt(fit.ci_high)}\n")
        return out.getvalue()

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "x": self.x_label,
            "columns": list(self.columns),
            "rows": [[r[c] for c in self.columns] for r in self.rows],
            "slopes": {k: None if v is None else {"slope": v.slope, "ci": [v.ci_low, v.ci_high]}
                       for k, v in self.slopes.items()},
        }


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _sandwich_row(coeffs: ChaosCoefficients, target: TargetSpec, samples: int, seed: int,
                  anchors=()) -> dict:
    d = delta_via_roots(coeffs, target)
    row = {
        "delta": d,
        "sqrt_delta": math.sqrt(d),
        "certified_upper": certified_w2_bound(coeffs, target).w2_bound,
        "cf_lower": cf_lower_bound(coeffs, target, anchors=anchors),
        "coupled_upper": coupled_w2_exact(coeffs, target),
    }
    if samples > 0:
        # same seed for both batches: shared noise slot by slot
        w, se = empirical_w2(sample_chaos(coeffs, samples, seed),
                             sample_chaos(target.as_coefficients(), samples, seed))
    else:
        w, se = math.nan, math.nan
    row["w2_hat"], row["w2_stderr"] = w, se
    return row


def _ustat_point(n, a=1.0, samples=100_000, seed=0):
    spec = UStatSpec(int(n), a)
    row = _sandwich_row(ustat_coefficients(spec), ustat_target(spec), samples, seed)
    row["n"] = int(n)
    return row


def lowbound_pair(a: float) -> tuple[ChaosCoefficients, TargetSpec]:
    """F_n = sqrt((1-a)/2)(Z_1**2 - 1) + sqrt(a/2)(Z_2**2 - 1) against (1/sqrt2)(Z**2 - 1)."""
    coeffs = ChaosCoefficients([math.sqrt((1 - a) / 2), math.sqrt(a / 2)])
    return coeffs, TargetSpec([1 / math.sqrt(2)], convention="raw")


def _lowbound_point(n, samples=0, seed=0):
    a = 1.0 / n
    coeffs, target = lowbound_pair(a)
    row = _sandwich_row(coeffs, target, samples, seed, anchors=(a ** -0.5,))
    row["n"] = int(n)
    row["a_n"] = a
    return row


def _qform_point(n, kernel: KernelSpec | None = None, samples=20_000, seed=0):
    kernel = kernel or KernelSpec(GOLDEN_LAMBDAS)
    _, At = qform_matrix(kernel, int(n))
    target = kernel.target()
    coeffs = quadratic_form_coefficients(At)
    row = _sandwich_row(ChaosCoefficients(coeffs.alphas), target, samples, seed)
    g = qform_bound(At, target)
    t = tau_n(At)
    row.update(n=int(n), gbound=g.value, gbound_majorant=g.majorant, gbound_clamped=int(g.clamped),
               tau_n=t, n_tau=n * t)
    return row


def _rosenblatt_point(gamma1, rho=0.5, orders=(3,), **kw):
    p = RosenblattParams(float(gamma1), rho)
    row = {"eps": p.eps, "gamma1": p.gamma1, "gamma2": p.gamma2}
    for m in orders:
        k, err = rosenblatt_cumulant(p, m, **kw)
        ky = y_rho_cumulant(rho, m)
        row[f"kappa_{m}"] = k
        row[f"kappa_{m}_limit"] = ky
        row[f"gap_{m}"] = abs(k - ky)
        row[f"err_{m}"] = err
    return row


def rate_sweep(family: str, grid, threads: int | None = None, **settings) -> RateTable:
    """Evaluate one family over the grid and fit log-log slopes.

    ustat: grid of n, settings a, samples, seed.
    lowbound: grid of n with a_n = 1/n and the CF grid anchored at a_n**(-1/2).
    qform: grid of n, settings kernel (KernelSpec), samples, seed.
    rosenblatt: grid of gamma1 values, settings rho, orders, scheme options;
    slopes are taken against eps = -gamma1 - 1/2.
    """
    grid = list(grid)
    if len(grid) < 4:
        raise ValueError("a sweep needs at least 4 grid points")
    point = {"ustat": _ustat_point, "lowbound": _lowbound_point,
             "qform": _qform_point, "rosenblatt": _rosenblatt_point}.get(family)
    if point is None:
        raise ValueError(f"unknown family {family!r}")
    run = lambda g: point(g, **settings)  # noqa: E731
    if threads == 1:
        rows = [run(g) for g in grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(run, grid))

    if family == "rosenblatt":
        orders = settings.get("orders", (3,))
        cols = ("eps", "gamma1", "gamma2") + tuple(
            c for m in orders for c in (f"kappa_{m}", f"kappa_{m}_limit", f"gap_{m}", f"err_{m}"))
        table = RateTable(family, "eps", cols, rows)
        metrics = [f"gap_{m}" for m in orders]
    else:
        extra = {"ustat": ("coupled_upper",), "lowbound": ("coupled_upper", "a_n"),
                 "qform": ("coupled_upper", "gbound", "gbound_majorant", "gbound_clamped", "tau_n", "n_tau")}
        table = RateTable(family, "n", BASE_COLUMNS + extra[family], rows)
        metrics = ["sqrt_delta", "certified_upper", "cf_lower", "coupled_upper", "w2_hat"]
        if family == "qform":
            metrics += ["gbound", "gbound_majorant", "tau_n"]
    xs = table.column(table.x_label)
    for name in metrics:
        try:
            table.slopes[name] = fit_slope(xs, table.column(name))
        except ValueError:
            table.slopes[name] = None
    return table
