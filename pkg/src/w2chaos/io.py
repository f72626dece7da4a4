"""Reading coefficient files and formatting machine-readable output."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .chaos_model import BaseNoise, ChaosCoefficients, TargetSpec

NOISE_NAMES = {"chi2_centered": BaseNoise.chi2, "chi2_unit": BaseNoise.chi2_unit}


def parse_noise(spec) -> BaseNoise:
    if spec is None:
        return BaseNoise.chi2()
    if isinstance(spec, str):
        if spec not in NOISE_NAMES:
            raise ValueError(f"unknown noise {spec!r}")
        return NOISE_NAMES[spec]()
    if isinstance(spec, dict) and "cumulants" in spec:
        return BaseNoise.custom(spec["cumulants"], spec.get("sampler"))
    raise ValueError("noise must be a name or an object with 'cumulants'")


def read_coefficient_file(path) -> tuple[np.ndarray, BaseNoise, str]:
    """JSON {"alphas", "noise", "convention"} or plain text with one float per line."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        if "alphas" not in obj:
            raise ValueError(f"{path}: missing 'alphas'")
        alphas = np.array([float(v) for v in obj["alphas"]])
        return alphas, parse_noise(obj.get("noise")), obj.get("convention", "raw")
    vals = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            vals.append(float(line))
    return np.array(vals), BaseNoise.chi2(), "raw"


def load_coefficients(path) -> ChaosCoefficients:
    a, noise, conv = read_coefficient_file(path)
    return ChaosCoefficients(a, noise, conv)


def load_target(path) -> TargetSpec:
    a, noise, conv = read_coefficient_file(path)
    return TargetSpec(a, noise, conv)


def parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def parse_t_grid(text: str) -> tuple[np.ndarray, list[float]]:
    """'lo:hi:points[,anchor...]' -> (log-spaced grid, anchors)."""
    head, *anchors = text.split(",")
    parts = head.split(":")
    if len(parts) != 3:
        raise ValueError("t grid must look like lo:hi:points[,anchor...]")
    lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0 < lo < hi) or pts < 1:
        raise ValueError("t grid needs 0 < lo < hi and points >= 1")
    return np.logspace(math.log10(lo), math.log10(hi), pts), [float(a) for a in anchors if a.strip()]


def clean(obj):
    """Replace non-finite floats by None and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        # JSON has one number type; 1.0 prints as 1
        return int(v) if v.is_integer() and abs(v) < 2**53 else v
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), separators=(",", ":"))
