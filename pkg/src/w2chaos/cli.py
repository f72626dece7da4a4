"""Command-line front end: ``w2chaos <command> [options]``.

Results go to standard output (or --out) as compact JSON, or CSV for
sweeps; diagnostics go to standard error.  Exit status is 0 on success, 2 on
invalid input and 3 when a numerical self-check aborts.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from . import chaos_model as cm
from . import io
from .applications import qform, rosenblatt, sweep, vg
from .errors import NumericalStabilityError
from .matching import bound_constants, certified_w2_bound, d_sigma, rational_independence_probe
from .transport import (cf_lower_bound, coupled_w2_exact, coupled_w2_upper, empirical_w2, linkdn_pair,
                        sample_chaos)


def _target(args) -> cm.TargetSpec:
    if args.target:
        return io.load_target(args.target)
    if args.alphas:
        return cm.TargetSpec(io.parse_floats(args.alphas), convention="raw")
    raise ValueError("need --target or --alphas")


def _coeffs(args) -> cm.ChaosCoefficients:
    if not args.coeffs:
        raise ValueError("need --coeffs")
    return io.load_coefficients(args.coeffs)


def cmd_theta(args):
    th = cm.theta_coefficients(_target(args))
    return {"theta": th.thetas[2:].tolist()}


def cmd_delta(args):
    c, t = _coeffs(args), _target(args)
    out = {}
    if args.route in ("roots", "both"):
        out["delta_roots"] = cm.delta(c, t, "roots")
    if args.route in ("cumulants", "both"):
        out["delta_cumulants"] = cm.delta(c, t, "cumulants")
    return out


def cmd_dsigma(args):
    c, t = _coeffs(args), _target(args)
    m = d_sigma(t.alphas, c.alphas)
    return {"distance": m.distance, "pairing": [list(p) for p in m.pairing]}


def cmd_constants(args):
    t = _target(args)
    k = bound_constants(t.alphas, args.search_cap)
    probe = rational_independence_probe(t.alphas**2, 50)
    return {
        "delta_x": k.delta_x, "eta": k.eta, "kappa": k.kappa_const, "alpha_x": k.alpha_x,
        "C_x": k.C_x, "C_tilde_x": k.C_tilde_x,
        "adherence_set": [list(v) for v in k.adherence_set],
        "independent": k.independent,
        "probe": {"independent": probe.independent, "relation": probe.relation, "M": probe.M},
    }


def cmd_w2(args):
    c, t = _coeffs(args), _target(args)
    grid, anchors = (None, []) if args.t_grid is None else io.parse_t_grid(args.t_grid)
    d = cm.delta(c, t)
    w, se = empirical_w2(sample_chaos(c, args.samples, args.seed, args.threads),
                         sample_chaos(t.as_coefficients(), args.samples, args.seed, args.threads))
    cert = certified_w2_bound(c, t, args.search_cap)
    circle, series = linkdn_pair(c, t, args.rho)
    return {
        "delta": d, "sqrt_delta": math.sqrt(d),
        "cf_lower": cf_lower_bound(c, t, grid, anchors),
        "w2_hat": w, "w2_stderr": se,
        "coupled_upper": coupled_w2_upper(c, t, args.samples, args.seed),
        "coupled_upper_exact": coupled_w2_exact(c, t),
        "certified_upper": cert.w2_bound, "branch": cert.branch, "symbolic": list(cert.symbolic),
        "linkdn": {"rho": args.rho, "circle": circle, "series": series.value, "tail": series.tail_bound},
    }


def cmd_sweep(args):
    fam = args.family
    settings = {}
    if fam == "rosenblatt":
        if not args.gamma1:
            raise ValueError("rosenblatt sweep needs --gamma1 values")
        grid = io.parse_floats(args.gamma1)
        settings.update(rho=args.rho_param, orders=tuple(int(v) for v in io.parse_floats(args.m or "3")))
    else:
        if not args.n:
            raise ValueError("sweep needs --n values")
        grid = [int(v) for v in io.parse_floats(args.n)]
        if fam == "lowbound":
            grid = [float(v) for v in grid]
        settings.update(samples=args.samples, seed=args.seed)
        if fam == "ustat":
            settings["a"] = args.a
        if fam == "qform":
            lam = tuple(io.parse_floats(args.alphas)) if args.alphas else sweep.GOLDEN_LAMBDAS
            settings["kernel"] = (qform.read_kernel_csv(args.kernel, lam) if args.kernel
                                  else qform.KernelSpec(lam))
    table = sweep.rate_sweep(fam, grid, threads=args.threads, **settings)
    if args.format == "json":
        return table.to_json()
    return table.to_csv()


def cmd_rosenblatt(args):
    if args.gamma1 is None:
        raise ValueError("need --gamma1")
    p = rosenblatt.RosenblattParams(float(args.gamma1), args.rho_param)
    orders = [int(v) for v in io.parse_floats(args.m or "2,3")]
    rows = []
    for m in orders:
        kw = {"N": args.samples, "seed": args.seed} if m >= 5 else {}
        k, err = rosenblatt.rosenblatt_cumulant(p, m, **kw)
        lim = rosenblatt.y_rho_cumulant(args.rho_param, m)
        rows.append({"m": m, "kappa": k, "error": err, "limit": lim, "gap": abs(k - lim)})
    return {"gamma1": p.gamma1, "gamma2": p.gamma2, "rho": p.rho, "A": rosenblatt.rosenblatt_A(p),
            "cumulants": rows}


def cmd_vg(args):
    a = io.parse_floats(args.alphas or "0.5,0.5")
    if len(a) != 2:
        raise ValueError("vg needs two coefficients --alphas a1,a2")
    p = vg.vg_from_chi_pair(a[0], a[1])
    xs = p.mu + np.array([-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0])
    out = {"params": asdict(p), "mean": p.mean(), "variance": p.variance(),
           "normalization": vg.vg_normalization(p),
           "density": [[float(x), float(y)] for x, y in zip(xs, vg.vg_density(p, xs))]}
    if args.samples:
        v = vg.sample_chi_pair(a[0], a[1], args.samples, args.seed).values
        out["sampled_mean"] = float(v.mean())
        out["sampled_variance"] = float(v.var(ddof=1))
    return out


COMMANDS = {"theta": cmd_theta, "delta": cmd_delta, "dsigma": cmd_dsigma, "constants": cmd_constants,
            "w2": cmd_w2, "sweep": cmd_sweep, "rosenblatt": cmd_rosenblatt, "vg": cmd_vg}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="w2chaos", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--alphas", help="comma-separated coefficients")
    ap.add_argument("--coeffs", help="coefficient file (JSON or text)")
    ap.add_argument("--target", help="target file (JSON or text)")
    ap.add_argument("--route", choices=("roots", "cumulants", "both"), default="both")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rho", type=float, default=0.1, help="circle radius for the cumulant identity")
    ap.add_argument("--t-grid", dest="t_grid", help="lo:hi:points[,anchor...]")
    ap.add_argument("--family", choices=sweep.FAMILIES, default="ustat")
    ap.add_argument("--n", help="comma-separated sizes")
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--gamma1", help="gamma1 value (or list for sweeps)")
    ap.add_argument("--rho-param", dest="rho_param", type=float, default=0.5)
    ap.add_argument("--m", help="cumulant orders, comma-separated")
    ap.add_argument("--kernel", help="basis table CSV with header x,e_1,...,e_q")
    ap.add_argument("--out", help="write output here instead of standard output")
    ap.add_argument("--format", choices=("json", "csv"), default=None)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--search-cap", dest="search_cap", type=float, default=4.0)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "sweep" else "json"
    if args.format == "csv" and args.command != "sweep":
        print("error: csv output is only available for sweep", file=sys.stderr)
        return 2
    for path in (args.coeffs, args.target, args.kernel):
        if path and not os.path.isfile(path):
            print(f"error: no such file: {path}", file=sys.stderr)
            return 2
    if args.samples < 1:
        print("error: --samples must be >= 1", file=sys.stderr)
        return 2
    try:
        result = COMMANDS[args.command](args)
    except NumericalStabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = result if isinstance(result, str) else io.dumps(result) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
