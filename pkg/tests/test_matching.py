import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from w2chaos.chaos_model import ChaosCoefficients, TargetSpec
from w2chaos.errors import NumericalStabilityError
from w2chaos.matching import (alpha_x_constant, bound_constants, certified_upper_bound, certified_w2_bound,
                              d_sigma, d_sigma_bruteforce, delta_p_gap, delta_x_constant, eta_and_adherence,
                              rational_independence_probe)

SQ2 = math.sqrt(2)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_dsigma_trivial():
    x = unit([0.3, -0.5, 0.8])
    assert d_sigma(x, x).distance == 0
    assert d_sigma([1.0, 0.0], [0.0, 1.0]).distance == 0


def test_dsigma_sign_needs_room_to_pad():
    # (1) vs (-1): best is to match each entry with an implicit zero
    r = d_sigma([1.0], [-1.0])
    assert r.distance == pytest.approx(SQ2)
    assert d_sigma_bruteforce([1.0], [-1.0]) == pytest.approx(SQ2)


def test_dsigma_pairing_reproduces_distance():
    x, y = unit([0.2, -0.9, 0.4]), unit([0.5, 0.5, -0.1, 0.7])
    r = d_sigma(x, y)
    xp = np.concatenate([x, np.zeros(4)])
    yp = np.concatenate([y, np.zeros(3)])
    gap2 = sum((xp[i] - yp[j]) ** 2 for i, j in r.pairing)
    assert math.isclose(r.distance**2, gap2, abs_tol=1e-12)
    assert sorted(i for i, _ in r.pairing) == list(range(7))
    assert sorted(j for _, j in r.pairing) == list(range(7))


def test_dsigma_rejects_off_sphere():
    with pytest.raises(ValueError):
        d_sigma([0.5], [1.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_dsigma_matches_bruteforce(lx, ly, seed):
    rng = np.random.default_rng(seed)
    x, y = unit(rng.normal(size=lx)), unit(rng.normal(size=ly))
    assert d_sigma(x, y).distance == pytest.approx(d_sigma_bruteforce(x, y), abs=1e-12)


def test_delta_x_examples():
    assert delta_x_constant([1.0]) == pytest.approx(0.5, abs=1e-10)
    assert delta_x_constant([1 / SQ2]) == pytest.approx(0.25, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_delta_x_positive_and_below_grid(seed, q):
    rng = np.random.default_rng(seed)
    x = unit(rng.normal(size=q))
    if q > 1 and np.min(np.diff(np.sort(x))) < 1e-2:
        return
    d = delta_x_constant(x)
    assert d > 0
    t = np.linspace(-3, 3, 2001)
    g = np.prod((t[:, None] - x) ** 2, axis=1) + sum(
        t**2 * np.prod((t[:, None] - np.delete(x, i)) ** 2, axis=1) for i in range(q))
    assert d <= g.min() + 1e-12


def test_eta_examples():
    eta, kap, E = eta_and_adherence([1.0])
    assert eta == pytest.approx(SQ2 - 1)
    assert E == ((1,),)
    eta, kap, E = eta_and_adherence([1 / SQ2, -1 / SQ2])
    assert set(E) == {(1, 1), (2, 0), (0, 2)}
    assert eta == 0
    assert kap == pytest.approx(math.sqrt(1.5) - 1)
    x = np.sqrt([1 / SQ2, 1 - 1 / SQ2])
    eta, kap, E = eta_and_adherence(x)
    assert E == ((1, 1),) and eta == kap > 0


def test_eta_small_cap_is_checked():
    # with a cap below 1 nothing is found and the doubling check fires
    with pytest.raises(NumericalStabilityError):
        eta_and_adherence([0.6, 0.8], search_cap=0.3)
    with pytest.raises(ValueError):
        eta_and_adherence([0.0, 1.0])


def test_alpha_x_examples():
    assert alpha_x_constant([1.0]) == 1.0
    a = alpha_x_constant([0.5, -0.5])
    assert a == pytest.approx(0.25)
    with pytest.raises(ValueError):
        alpha_x_constant([0.5, 0.5])


def test_alpha_x_against_wide_search():
    u = np.array([0.8, -0.3, 0.52])
    M = np.vander(u, 3, increasing=True).T @ np.diag(u * u)
    ks = np.stack(np.meshgrid(*([np.arange(-12, 13)] * 3), indexing="ij"), -1).reshape(-1, 3)
    ks = ks[np.any(ks != 0, axis=1)]
    brute = np.min(np.max(np.abs(ks @ M.T), axis=1))
    assert alpha_x_constant(u) == pytest.approx(brute, rel=1e-12)


def test_delta_p_gap_examples():
    x = [0.3, -0.4]
    assert delta_p_gap(x, x, 3) == 0
    assert delta_p_gap(x, x[::-1], 3) == 0
    assert delta_p_gap([1.0], [0.6, 0.8], 3) == pytest.approx(0.272)


def test_certified_constants_single_root():
    k = bound_constants([1.0])
    assert k.C_x == pytest.approx(2 * (3 + 2 * SQ2))
    assert k.independent


def test_certified_zero_at_target():
    t = TargetSpec(unit([0.3, -0.7, 0.5]))
    b = certified_upper_bound(t, t.as_coefficients())
    assert b.value == pytest.approx(0, abs=1e-12)
    assert b.symbolic == ()


def test_certified_dependent_branch():
    t = TargetSpec([1 / SQ2, -1 / SQ2])
    b = certified_upper_bound(t, ChaosCoefficients([1 / SQ2, 1 / SQ2], convention="unit"))
    assert b.branch == "dependent"
    assert b.delta == 0 and b.value > 0
    assert b.value >= d_sigma(t.alphas, [1 / SQ2, 1 / SQ2]).distance


def test_certified_convention_mismatch():
    with pytest.raises(ValueError):
        certified_upper_bound(TargetSpec([1.0]), ChaosCoefficients([1.0]))


def _random_sphere(rng, k):
    return unit(rng.normal(size=k) * rng.uniform(0.1, 1.5, size=k))


@pytest.mark.parametrize("x", [[1.0], unit([1.0, -0.37]), unit([0.9, 0.2, -0.5]), unit([2 ** 0.25, -1.0])])
def test_hilbert_bound_holds(x):
    rng = np.random.default_rng(3)
    t = TargetSpec(x)
    for _ in range(300):
        y = _random_sphere(rng, rng.integers(1, 7))
        b = certified_upper_bound(t, ChaosCoefficients(y, convention="unit"))
        assert d_sigma(x, y).distance <= b.value + 1e-12


def test_scaled_bound_covers_raw_inputs():
    rng = np.random.default_rng(5)
    t = TargetSpec([0.7, -0.2], convention="raw")
    for _ in range(100):
        y = rng.normal(size=rng.integers(1, 5)) * 0.5
        b = certified_w2_bound(ChaosCoefficients(y), t)
        s = np.linalg.norm(t.alphas)
        assert math.sqrt(2) * d_sigma(t.alphas, y, require_unit=False).distance <= b.w2_bound + 1e-12 * s


def test_probe_examples():
    assert rational_independence_probe([0.5, 0.5]).relation == (1, -1)
    assert rational_independence_probe([0.3, 0.7]).relation == (7, -3)
    r = rational_independence_probe([1 / SQ2, 1 - 1 / SQ2], 50)
    assert r.independent and r.relation is None
    assert rational_independence_probe([0.2, 0.3, 0.5]).relation is not None
    with pytest.raises(ValueError):
        rational_independence_probe([0.5, 0.5], 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_alpha_x_tightening_is_exact(seed):
    rng = np.random.default_rng(seed)
    u = unit(rng.uniform(0.2, 1, 2) * rng.choice([-1, 1], 2))
    if abs(u[0] - u[1]) < 0.05:
        return
    M = np.vander(u, 2, increasing=True).T @ np.diag(u * u)
    v0 = np.min(np.max(np.abs(M), axis=0))
    K = max(1, math.ceil(np.linalg.norm(np.linalg.inv(M), np.inf) * v0))
    r = np.arange(-K, K + 1)
    ks = np.stack(np.meshgrid(r, r, indexing="ij"), -1).reshape(-1, 2)
    ks = ks[np.any(ks != 0, axis=1)]
    brute = np.min(np.max(np.abs(ks @ M.T), axis=1))
    assert alpha_x_constant(u) == pytest.approx(brute, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dsigma_metric_properties(seed):
    rng = np.random.default_rng(seed)
    x, y, z = (unit(rng.normal(size=rng.integers(1, 6))) for _ in range(3))
    dxy = d_sigma(x, y).distance
    assert dxy >= 0
    assert dxy == pytest.approx(d_sigma(y, x).distance, abs=1e-14)
    assert dxy <= d_sigma(x, z).distance + d_sigma(z, y).distance + 1e-10
    p, r = rng.permutation(x.size), rng.permutation(y.size)
    assert d_sigma(x[p], y[r]).distance == pytest.approx(dxy, abs=1e-14)
    assert d_sigma(x, np.concatenate([x[p], [0.0, 0.0]])).distance == 0


def test_constants_stable_under_doubling():
    for x in ([1 / SQ2, -1 / SQ2], unit([1.0, -0.37]), unit([0.9, 0.2, -0.5])):
        a, b = eta_and_adherence(x, 4.0), eta_and_adherence(x, 8.0)
        assert a[0] == pytest.approx(b[0]) and a[1] == pytest.approx(b[1]) and a[2] == b[2]


def test_constant_relations():
    for x in ([1 / SQ2, -1 / SQ2], unit([1.0, -0.37]), unit([0.9, 0.2, -0.5])):
        k = bound_constants(x)
        q = len(x)
        assert min(k.delta_x, k.alpha_x, k.C_x, k.C_tilde_x) > 0
        gap = k.eta if k.eta > 0 else k.kappa_const
        assert k.C_x == pytest.approx((1 + 2 / gap) * math.sqrt((q + 1) / k.delta_x))
        ck = (1 + 2 / k.kappa_const) * math.sqrt((q + 1) / k.delta_x)
        assert k.C_tilde_x == pytest.approx(2 * (q + 1) * ck * (1 + 2 / k.alpha_x))
