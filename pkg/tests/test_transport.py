import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from w2chaos.chaos_model import BaseNoise, ChaosCoefficients, TargetSpec, cumulants_from_coefficients
from w2chaos.errors import DomainError
from w2chaos.matching import d_sigma
from w2chaos.transport import (CHUNK, char_fn, coupled_w2_exact, coupled_w2_upper, cf_lower_bound,
                               cumulant_series_gap, empirical_kolmogorov, empirical_w2, linkdn_pair,
                               logderiv_gap_circle, sample_chaos, tail_bound, tail_probe)

SQ2 = math.sqrt(2)


def test_sampler_is_deterministic_and_thread_invariant():
    c = ChaosCoefficients([0.4, -0.3, 0.2])
    a = sample_chaos(c, 3 * CHUNK + 17, seed=9, threads=1)
    b = sample_chaos(c, 3 * CHUNK + 17, seed=9, threads=4)
    np.testing.assert_array_equal(a.values, b.values)
    assert len(a) == 3 * CHUNK + 17
    assert not np.array_equal(a.values, sample_chaos(c, 3 * CHUNK + 17, seed=10).values)


def test_sampler_prefix_stable():
    c = ChaosCoefficients([1.0])
    small = sample_chaos(c, 1000, seed=3).values
    big = sample_chaos(c, CHUNK + 5, seed=3).values
    np.testing.assert_array_equal(small, big[:1000])


def test_sampler_moments():
    c = ChaosCoefficients([0.5, -0.5, 0.3])
    v = sample_chaos(c, 400_000, seed=1).values
    k = cumulants_from_coefficients(c, 3)
    assert abs(v.mean()) < 5 * math.sqrt(k[2] / v.size)
    assert v.var() == pytest.approx(k[2], rel=0.02)
    assert np.mean(v**3) == pytest.approx(k[3], abs=0.05)


def test_sampler_rejects_bad_input():
    c = ChaosCoefficients([1.0])
    with pytest.raises(ValueError):
        sample_chaos(c, 0)
    with pytest.raises(ValueError):
        sample_chaos(c, 10, seed=-1)
    with pytest.raises(ValueError):
        sample_chaos(ChaosCoefficients([1.0], BaseNoise.custom([2.0, 8.0])), 10)


def test_unit_noise_sampler_scale():
    c = ChaosCoefficients([1.0], BaseNoise.chi2_unit())
    assert sample_chaos(c, 200_000, seed=2).values.var() == pytest.approx(1.0, rel=0.02)


def test_empirical_w2_identical_and_shift():
    x = np.random.default_rng(0).normal(size=1000)
    assert empirical_w2(x, x)[0] == 0
    w, se = empirical_w2(x, x + 0.5)
    assert w == pytest.approx(0.5)
    assert se == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        empirical_w2(x, x[:10])
    assert math.isnan(empirical_w2(x[:5], x[:5])[1])


def test_common_random_numbers_cancel_at_target():
    t = TargetSpec([0.6, -0.8])
    s = sample_chaos(t.as_coefficients(), 50_000, seed=4)
    assert empirical_w2(s, sample_chaos(t.as_coefficients(), 50_000, seed=4))[0] == 0


def test_coupled_estimator_matches_exact():
    c, t = ChaosCoefficients([0.7, 0.1, -0.25]), TargetSpec([0.6, -0.3], convention="raw")
    exact = coupled_w2_exact(c, t)
    mc = coupled_w2_upper(c, t, 400_000, seed=5)
    assert mc == pytest.approx(exact, rel=0.02)
    assert exact == pytest.approx(SQ2 * d_sigma(t.alphas, c.alphas, require_unit=False).distance)


def test_empirical_w2_below_coupled():
    c, t = ChaosCoefficients([0.9, 0.2]), TargetSpec([1.0], convention="raw")
    w, se = empirical_w2(sample_chaos(c, 200_000, 1), sample_chaos(t.as_coefficients(), 200_000, 2))
    assert w <= coupled_w2_exact(c, t) + 3 * se + 0.01


# ---------------------------------------------------------------- characteristic function

@pytest.mark.parametrize("a", [0.3, -1.0])
def test_char_fn_modulus(a):
    t = np.linspace(-5, 5, 41)
    phi = np.array([p.phi for p in char_fn(ChaosCoefficients([a]), t)])
    np.testing.assert_allclose(np.abs(phi), (1 + 4 * t * t * a * a) ** -0.25, rtol=1e-13)


def test_char_fn_unit_target_modulus():
    t = np.linspace(0.1, 3, 7)
    phi = np.array([p.phi for p in char_fn(ChaosCoefficients([1 / SQ2]), t)])
    np.testing.assert_allclose(np.abs(phi), (1 + 2 * t * t) ** -0.25, rtol=1e-13)


def test_char_fn_against_sample_mean():
    c = ChaosCoefficients([0.5, -0.4, 0.2])
    v = sample_chaos(c, 400_000, seed=11).values
    for t in (0.3, 1.0, 2.5):
        emp = np.mean(np.exp(1j * t * v))
        assert abs(char_fn(c, t).phi - emp) < 5 / math.sqrt(v.size)


def test_char_fn_derivative_by_differences():
    c = ChaosCoefficients([0.5, -0.4, 0.2])
    h = 1e-5
    for t in (0.2, 1.3):
        fd = (char_fn(c, t + h).phi - char_fn(c, t - h).phi) / (2 * h)
        assert abs(char_fn(c, t).phi_prime - fd) < 1e-8


def test_char_fn_strip():
    c = ChaosCoefficients([0.5])
    char_fn(c, 0.99j)
    with pytest.raises(DomainError):
        char_fn(c, 1.0j)


def test_cf_lower_bound_zero_and_grid_checks():
    t = TargetSpec([0.6, -0.8])
    assert cf_lower_bound(t.as_coefficients(), t) == 0
    with pytest.raises(ValueError):
        cf_lower_bound(t.as_coefficients(), t, t_grid=[0.0, 1.0])


def test_cf_lower_bound_below_coupled():
    c, t = ChaosCoefficients([0.5, 0.45, 0.2]), TargetSpec([0.6, -0.8])
    assert cf_lower_bound(c, t) <= coupled_w2_exact(c, t)


def _lowbound_factor(a):
    return (2 + a) ** -0.25 * abs((1 + 4 * (1 - a) / (a + 2)) ** -0.25 - 1)


@pytest.mark.parametrize("a", [1e-2, 1e-3, 1e-4])
def test_cf_lower_bound_small_a_example(a):
    c = ChaosCoefficients([math.sqrt((1 - a) / 2), math.sqrt(a / 2)])
    t = TargetSpec([1 / SQ2], convention="raw")
    lb = cf_lower_bound(c, t, anchors=(a ** -0.5,))
    assert lb >= _lowbound_factor(a) * a**0.75
    assert lb <= coupled_w2_exact(c, t)


# ---------------------------------------------------------------- cumulant identity on a circle

def test_circle_domain_checks():
    c, t = ChaosCoefficients([0.5]), TargetSpec([1.0], convention="raw")
    with pytest.raises(DomainError):
        logderiv_gap_circle(c, t, 0.5)
    with pytest.raises(DomainError):
        logderiv_gap_circle(ChaosCoefficients([2.0]), t, 0.3)
    with pytest.raises(ValueError):
        logderiv_gap_circle(c, t, 0.1, n_theta=16)


def test_series_tail_bound_defaults():
    g = cumulant_series_gap(np.zeros(9), np.zeros(9), 0.25, 10)
    assert g.value == 0
    assert g.tail_bound == pytest.approx(4 * 0.5**20 / 0.75)
    with pytest.raises(ValueError):
        cumulant_series_gap(np.zeros(3), np.zeros(3), 0.25, 10)
    with pytest.raises(DomainError):
        cumulant_series_gap(np.zeros(9), np.zeros(9), 0.6, 10)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=6), st.lists(st.floats(-1, 1), min_size=1, max_size=4),
       st.floats(0.02, 0.4))
def test_circle_matches_series(an, ai, rho):
    if max(map(abs, an)) < 1e-3 or max(map(abs, ai)) < 1e-3:
        return
    if 2 * rho * max(map(abs, an + ai)) >= 0.9:
        return
    c, t = ChaosCoefficients(an), ChaosCoefficients(ai)
    circle, series = linkdn_pair(c, t, rho, R=60)
    assert abs(circle - series.value) <= series.tail_bound + 1e-12 * max(1.0, circle)


# ---------------------------------------------------------------- tails and Kolmogorov

def test_tail_probe_rows():
    v = sample_chaos(ChaosCoefficients([0.6, -0.8]), 100_000, seed=7)
    rows = tail_probe(v, [1.0, 3.0, 5.0])
    assert rows[0].note.startswith("skipped") and math.isnan(rows[0].frequency)
    for r in rows[1:]:
        assert r.ci_low <= r.frequency <= r.ci_high
        assert r.bound == pytest.approx(float(tail_bound(r.x)))
        assert not r.flagged


def test_tail_probe_flags_heavy_sample():
    rows = tail_probe(np.full(1000, 10.0), [4.0])
    assert rows[0].flagged


def test_empirical_kolmogorov():
    x = np.arange(10.0)
    assert empirical_kolmogorov(x, x) == 0
    assert empirical_kolmogorov(x, x + 100) == 1


# ---------------------------------------------------------------- further reference values

def test_sample_mean_and_third_cumulant():
    c = ChaosCoefficients([1.0])
    v = sample_chaos(c, 1_000_000, seed=21).values
    assert abs(v.mean()) < 4 * math.sqrt(2 / v.size)
    m = v - v.mean()
    assert np.mean(m**3) == pytest.approx(8.0, abs=0.3)


def test_empirical_w2_gaussian_oracle():
    rng = np.random.default_rng(8)
    mu, sig = 0.3, 1.5
    x = rng.standard_normal(200_000)
    y = mu + sig * rng.standard_normal(200_000)
    w, se = empirical_w2(x, y)
    assert abs(w - math.hypot(mu, sig - 1)) < 3 * se + 5e-3


def test_coupled_dominates_empirical():
    rng = np.random.default_rng(12)
    for _ in range(5):
        c = ChaosCoefficients(rng.normal(size=4) * 0.4)
        t = TargetSpec(rng.normal(size=2) * 0.5, convention="raw")
        w, se = empirical_w2(sample_chaos(c, 50_000, 3), sample_chaos(t.as_coefficients(), 50_000, 3))
        assert coupled_w2_upper(c, t, 50_000, 3) >= w - 3 * se
    t = TargetSpec([0.4, -0.2], convention="raw")
    assert coupled_w2_upper(t.as_coefficients(), t, 1000) == 0


def test_char_fn_basic_identities():
    c = ChaosCoefficients([0.5, -0.4, 0.2])
    p0 = char_fn(c, 0.0)
    assert p0.phi == 1 and p0.phi_prime == 0
    t = np.linspace(-20, 20, 81)
    pts = char_fn(c, t)
    neg = char_fn(c, -t)
    for a, b in zip(pts, neg):
        assert abs(a.phi) <= 1 + 1e-15
        assert a.phi == pytest.approx(np.conj(b.phi), abs=1e-15)


def test_series_single_term():
    k = np.zeros(9)
    k2 = k.copy()
    k2[1] = 0.7  # kappa_3
    g = cumulant_series_gap(k2, k, 0.1, 10)
    assert g.value == pytest.approx(0.7**2 * 0.1**4 / 4, rel=1e-14)


def test_circle_on_symmetric_pair():
    c, t = ChaosCoefficients([0.5, 0.5]), ChaosCoefficients([0.5, -0.5])
    circle, series = linkdn_pair(c, t, 0.1)
    assert abs(circle - series.value) <= 1e-6
    same = logderiv_gap_circle(t, t, 0.1)
    assert same == 0
    vals = [logderiv_gap_circle(c, t, r) for r in (0.05, 0.1, 0.2, 0.3)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_tail_bound_values():
    assert float(tail_bound(3.0)) == pytest.approx(0.3317, abs=1e-4)
    assert float(tail_bound(5.0)) == pytest.approx(0.1589, abs=1e-4)
    v = sample_chaos(ChaosCoefficients([1 / SQ2]), 200_000, seed=3)
    assert not tail_probe(v, [4.0])[0].flagged


def test_kolmogorov_normal_shift():
    rng = np.random.default_rng(4)
    x, y = rng.standard_normal(100_000), 1 + rng.standard_normal(100_000)
    assert empirical_kolmogorov(x, y) == pytest.approx(0.3829, abs=0.01)
