import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dilatrix.intervals import Interval, IntervalSet, normalize
from dilatrix.measures import (
    LaplaceDensity,
    PiecewiseDensity,
    SAffineDensity,
    exponential_density,
    extremal_density,
    lp_moment,
    measure_of,
    measure_quad,
    median,
    quantile,
    s_concavity_check,
    s_mean,
    uniform_density,
)


def iset(*pairs):
    return normalize([Interval(a, b) for a, b in pairs])


# ---------------------------------------------------------------------------
# s-affine densities and the extremal family
# ---------------------------------------------------------------------------

def test_extremal_heavy_tail_closed_form():
    mu = extremal_density(-1.0, 2.0, 3.0)
    # density (2+x)^-2 on [-1, inf)
    xs = np.array([-0.5, 0.0, 1.0, 5.0])
    assert np.allclose(mu.pdf(xs), (2 + xs) ** -2.0)
    # total mass one: quadrature to a cut plus the exact tail 1/(2+x)
    body, _ = integrate.quad(mu.pdf, -1, 100, limit=200)
    assert abs(body + 1.0 / 102.0 - 1.0) < 1e-10
    assert abs(mu.Z - 1.0) < 1e-14  # (a+s)^(1/s) = 1 here


def test_extremal_s1_is_uniform():
    mu = extremal_density(1.0, 3.0, 2.0)
    assert mu.support == (-1.0, 3.0)
    assert np.allclose(mu.pdf(np.array([-0.9, 0.0, 2.9])), 0.25)


def test_extremal_shalf_affine_density():
    mu = extremal_density(0.5, 1.0, 1.8)
    xs = np.linspace(-1, 2, 7)
    assert np.allclose(mu.pdf(xs), (1 - 0.5 * xs) / 1.5**2)
    val, _ = integrate.quad(mu.pdf, -1, 2)
    assert abs(val - 1.0) < 1e-12


def test_extremal_parameter_validation():
    with pytest.raises(ValueError):
        extremal_density(0.5, 0.5, 3.0)  # a <= s*t_max
    with pytest.raises(ValueError):
        extremal_density(-2.0, 1.5, 2.0)  # a <= -s
    with pytest.raises(ValueError):
        extremal_density(0.0, 1.0, 2.0)


def test_extremal_normalization_random():
    rng = np.random.default_rng(1)
    for _ in range(50):
        s = float(rng.uniform(-3, 1))
        if abs(s) < 1e-3:
            continue
        t_max = float(rng.uniform(1.2, 6.0))
        a = max(-s, s * t_max) + float(rng.uniform(0.05, 4.0))
        mu = extremal_density(s, a, t_max)
        # Z must equal the closed form (a+s)^(1/s)
        assert math.isclose(mu.Z, (a + s) ** (1.0 / s), rel_tol=1e-12)
        if math.isinf(mu.hi):
            # quadrature to a cut plus the exact power tail integral
            cut = mu.lo + 40.0
            body, _ = integrate.quad(mu.pdf, mu.lo, cut, limit=200)
            tail = ((a - s * cut) / (a + s)) ** (1.0 / s)
            assert abs(body + tail - 1.0) < 1e-8
        else:
            assert abs(mu.measure(iset((mu.lo, mu.hi))) - 1.0) < 1e-12


def test_measure_of_examples():
    expo = exponential_density()
    assert math.isclose(measure_of(expo, iset((0, 1))), 1 - math.exp(-1), rel_tol=1e-14)
    heavy = extremal_density(-1.0, 2.0, 3.0)
    assert math.isclose(1 - measure_of(heavy, iset((-1, 1))), 1 / 3, rel_tol=1e-14)
    assert measure_of(heavy, IntervalSet(())) == 0.0


def test_cdf_consistency():
    for mu in (extremal_density(-1, 2, 3), extremal_density(0.5, 1, 1.8),
               exponential_density(), uniform_density(-1, 1)):
        lo = mu.lo
        xs = np.linspace(lo, lo + 8.0, 60)
        vals = [mu.cdf(x) for x in xs]
        assert vals[0] == 0.0
        assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
        if math.isfinite(mu.hi):
            assert abs(mu.cdf(mu.hi) - 1.0) < 1e-10


def test_closed_form_vs_quadrature():
    rng = np.random.default_rng(2)
    densities = [extremal_density(-1, 2, 3), extremal_density(0.5, 1, 1.8),
                 extremal_density(-0.5, 1.7, 4.0), exponential_density(1.5),
                 uniform_density(-2, 5)]
    for _ in range(100):
        mu = densities[rng.integers(len(densities))]
        hi = mu.hi if math.isfinite(mu.hi) else mu.lo + 30.0
        a, b = np.sort(rng.uniform(mu.lo, hi, 2))
        F = iset((a, b))
        assert abs(mu.measure(F) - measure_quad(mu, F)) < 1e-9


def test_ppf_roundtrip():
    rng = np.random.default_rng(3)
    for mu in (extremal_density(-1, 2, 3), extremal_density(0.25, 1.1, 4.0),
               exponential_density(2.0), uniform_density(0, 1)):
        u = rng.random(200)
        x = mu.ppf(u)
        back = np.array([mu.cdf(v) for v in np.atleast_1d(x)])
        assert np.allclose(back, u, atol=1e-10)


def test_saffine_json_roundtrip():
    mu = extremal_density(-1.0, 2.0, 3.0)
    mu2 = SAffineDensity.from_json(mu.to_json())
    assert mu2 == mu


# ---------------------------------------------------------------------------
# piecewise profiles
# ---------------------------------------------------------------------------

def test_piecewise_curvature_validation():
    # concave log-profile is fine at s = 0
    PiecewiseDensity(s=0.0, xs=(0.0, 1.0, 2.0), hs=(0.0, 1.0, 1.5))
    with pytest.raises(ValueError):
        PiecewiseDensity(s=0.0, xs=(0.0, 1.0, 2.0), hs=(0.0, 1.0, 3.0))
    # s < 0 wants a convex profile of psi^gamma
    PiecewiseDensity(s=-1.0, xs=(0.0, 1.0, 2.0), hs=(2.0, 1.0, 1.5))
    with pytest.raises(ValueError):
        PiecewiseDensity(s=-1.0, xs=(0.0, 1.0, 2.0), hs=(1.0, 2.0, 2.5))


def test_piecewise_matches_saffine_measure():
    # an affine profile is the s-affine density, so quadrature must agree
    # with the closed-form route
    s = 0.5
    mu_exact = extremal_density(s, 1.0, 1.8)
    gamma = s / (1 - s)
    xs = (-1.0, 0.0, 1.0, 2.0)
    hs = tuple((1.0 - 0.5 * x) ** gamma for x in xs)
    mu_pw = PiecewiseDensity(s=s, xs=xs, hs=hs)
    rng = np.random.default_rng(4)
    for _ in range(25):
        a, b = np.sort(rng.uniform(-1, 2, 2))
        F = iset((a, b))
        assert abs(mu_pw.measure(F) - mu_exact.measure(F)) < 1e-9


def test_piecewise_total_mass_and_sampling():
    mu = PiecewiseDensity(s=0.0, xs=(0.0, 0.5, 2.0), hs=(0.0, 0.8, -1.0))
    assert abs(mu.measure(iset((0, 2))) - 1.0) < 1e-10
    draws = mu.sample(20000, seed=9)
    assert draws.min() >= 0.0 and draws.max() <= 2.0
    F = iset((0.0, 0.7))
    emp = float(np.mean((draws >= 0) & (draws <= 0.7)))
    assert abs(emp - mu.measure(F)) < 0.02
    assert np.array_equal(draws, mu.sample(20000, seed=9))


def test_piecewise_json_roundtrip():
    mu = PiecewiseDensity(s=-0.5, xs=(0.0, 1.0, 2.0), hs=(2.0, 1.5, 2.5))
    mu2 = PiecewiseDensity.from_json(mu.to_json())
    assert mu2.xs == mu.xs and mu2.hs == mu.hs and mu2.s == mu.s


# ---------------------------------------------------------------------------
# quantiles and moments
# ---------------------------------------------------------------------------

def test_quantile_identity():
    assert math.isclose(quantile(uniform_density(0, 1), 0.5), 0.5, abs_tol=1e-12)
    assert math.isclose(quantile(exponential_density(), 0.5), math.log(2), rel_tol=1e-12)


def test_quantile_pushforward_abs():
    mu = uniform_density(-1, 1)
    sub = lambda lam: iset((-lam, lam))
    assert math.isclose(quantile(mu, 0.5, sub), 0.5, abs_tol=1e-10)


def test_lp_moment_uniform():
    mu = uniform_density(0, 1)
    sub = lambda lam: iset((0, lam))
    assert math.isclose(lp_moment(mu, sub, 2.0), (1 / 3) ** 0.5, rel_tol=1e-7)
    # integral of x^(-1/2) on [0,1] is 2, so the norm is 2^(1/p) = 1/4
    assert math.isclose(lp_moment(mu, sub, -0.5), 0.25, rel_tol=1e-6)


def test_lp_moment_exponential():
    mu = exponential_density()
    sub = lambda lam: iset((0, lam))
    assert math.isclose(lp_moment(mu, sub, 1.0), 1.0, rel_tol=1e-7)


def test_lp_moment_heavy_tail_divergence():
    mu = extremal_density(-1.0, 2.0, 3.0)  # tail ~ 1/t
    sub = lambda lam: iset((max(-1.0, -lam), lam))
    assert math.isinf(lp_moment(mu, sub, 1.5))  # p >= -1/s = 1 diverges
    val = lp_moment(mu, sub, 0.5)  # p < 1 converges
    assert math.isfinite(val) and val > 0


def test_sampling_statistics():
    mu = uniform_density(0, 1)
    x = mu.sample(10**5, seed=0)
    assert abs(x.mean() - 0.5) < 3 * 0.2887 / math.sqrt(10**5)
    heavy = extremal_density(-1.0, 2.0, 3.0)
    y = heavy.sample(10**5, seed=1)
    emp = float(np.mean((y >= -1) & (y <= 1)))
    assert abs(emp - 2 / 3) < 0.01
    assert np.array_equal(y, extremal_density(-1.0, 2.0, 3.0).sample(10**5, seed=1))


# ---------------------------------------------------------------------------
# s-means
# ---------------------------------------------------------------------------

def test_s_mean_idempotent():
    for s in (-2.0, -1.0, 0.0, 0.5, 1.0):
        assert math.isclose(s_mean(0.7, 0.7, 0.3, s), 0.7, rel_tol=1e-14)


def test_s_mean_zeros():
    assert s_mean(1.0, 0.0, 0.5, 0.0) == 0.0
    assert s_mean(1.0, 0.0, 0.5, -1.0) == 0.0
    assert math.isclose(s_mean(1.0, 0.0, 0.5, 1.0), 0.5, rel_tol=1e-14)


def test_s_mean_reference_values():
    assert math.isclose(s_mean(4, 1, 0.5, 1.0), 2.5, rel_tol=1e-14)
    assert math.isclose(s_mean(4, 1, 0.5, 0.0), 2.0, rel_tol=1e-14)
    assert math.isclose(s_mean(4, 1, 0.5, -1.0), 1.6, rel_tol=1e-14)


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0, 1),
       st.floats(-4, 1), st.floats(-4, 1))
@settings(max_examples=150, deadline=None)
def test_s_mean_monotone_in_s(u, v, lam, s1, s2):
    s1, s2 = min(s1, s2), max(s1, s2)
    assert s_mean(u, v, lam, s1) <= s_mean(u, v, lam, s2) * (1 + 1e-12) + 1e-12


# ---------------------------------------------------------------------------
# s-concavity checker
# ---------------------------------------------------------------------------

def test_s_concavity_extremal_family():
    rep = s_concavity_check(extremal_density(-1.0, 2.0, 3.0), trials=1000, seed=5)
    assert rep.passed and rep.gap >= -1e-9


def test_s_concavity_exponential():
    rep = s_concavity_check(exponential_density(), trials=1000, seed=6)
    assert rep.passed


def test_s_concavity_detects_bimodal():
    # flat bumps on [0,1] and [2,3] with a deep valley: not log-concave
    broken = PiecewiseDensity(
        s=0.0,
        xs=(0.0, 1.0, 1.001, 1.999, 2.0, 3.0),
        hs=(0.0, 0.0, -50.0, -50.0, 0.0, 0.0),
        validate=False,
    )
    rep = s_concavity_check(broken, trials=300, seed=7)
    assert not rep.passed and rep.gap < -1e-3


def test_laplace_density():
    mu = LaplaceDensity()
    assert math.isclose(1 - mu.measure(iset((-1, 1))), math.exp(-1), rel_tol=1e-12)
    x = mu.sample(10**5, seed=2)
    assert abs(float(np.mean(np.abs(x) <= 1)) - (1 - math.exp(-1))) < 0.01
