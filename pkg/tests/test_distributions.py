import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize, stats

from hdgibbs.distributions import (
    Beta,
    BetaNegativeBinomial,
    BetaPrime,
    ChiSquare,
    Gamma,
    InverseGamma,
    InverseGaussian,
    NegativeBinomial,
    Normal,
    StudentT,
    draw,
    draw_std_normal_vector,
    inverse_gaussian_transform,
    quantile,
)
from hdgibbs.rng import RandomStream

CONTINUOUS = [
    Normal(1.5, 4.0),
    ChiSquare(7.0),
    InverseGamma(5.0, 8.0),
    Gamma(2.5, 3.0),
    Beta(2.0, 5.0),
    BetaPrime(5.0, 15.0),
    InverseGaussian(2.0, 3.0),
    StudentT(4.0),
]


def test_inverse_gamma_mean():
    x = draw(InverseGamma(5, 8), RandomStream(1, 0), 1_000_000)
    assert abs(x.mean() - 2.0) < 0.01


def test_beta_prime_mean():
    x = draw(BetaPrime(5, 15), RandomStream(1, 1), 1_000_000)
    assert abs(x.mean() - 5 / 14) < 0.005


def test_beta_negative_binomial_mean_matches_compound_oracle(np_rng):
    x = draw(BetaNegativeBinomial(5, 5, 10), RandomStream(1, 2), 1_000_000)
    assert abs(x.mean() - 25 / 9) < 0.05
    # oracle: compound sampling written out independently
    q = np_rng.beta(5, 10, 200_000)
    oracle = np_rng.negative_binomial(5, 1 - q)
    assert abs(x.mean() - oracle.mean()) < 0.08


def test_std_normal_vector_shapes_and_moments():
    s = RandomStream(3, 0)
    assert draw_std_normal_vector(3, s).shape == (3,)
    cov = np.cov(np.array([draw_std_normal_vector(4, s) for _ in range(20_000)] +
                          list(s.normal((80_000, 4)))).T)
    assert np.max(np.abs(cov - np.eye(4))) < 0.02
    one = s.normal(1_000_000)
    assert abs(one.mean()) < 0.004
    with pytest.raises(ValueError):
        draw_std_normal_vector(0, s)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: type(d).__name__)
def test_ks_against_exact_cdf(dist):
    x = dist.sample(RandomStream(11, hash(type(dist).__name__) % 1000), 100_000)
    stat = stats.kstest(x, dist.cdf).statistic
    assert stat < 1.628 / math.sqrt(x.size)  # 1% critical value


@pytest.mark.parametrize("dist", [NegativeBinomial(3.0, 0.4), BetaNegativeBinomial(5.0, 5.0, 10.0)],
                         ids=lambda d: type(d).__name__)
def test_discrete_laws_match_pmf(dist):
    x = dist.sample(RandomStream(12, 0), 100_000)
    ks = np.arange(0, 15)
    emp = np.array([(x == k).mean() for k in ks])
    pmf = dist._scipy().pmf(ks)
    assert np.max(np.abs(emp - pmf)) < 4 * np.sqrt(0.25 / x.size)
    assert abs(x.mean() - dist.mean()) < 5 * math.sqrt(dist._scipy().var() / x.size)


def test_inverse_gaussian_against_rejection_oracle(np_rng):
    mu, lam = 1.5, 2.0
    dens = lambda t: math.sqrt(lam / (2 * math.pi * t**3)) * math.exp(-lam * (t - mu) ** 2 / (2 * mu**2 * t))
    grid = np.linspace(1e-4, 20, 20_000)
    bound = 1.05 * max(dens(t) for t in grid)
    out = []
    while len(out) < 10_000:
        t = np_rng.uniform(1e-9, 20, 50_000)
        u = np_rng.uniform(0, bound, 50_000)
        vals = np.sqrt(lam / (2 * np.pi * t**3)) * np.exp(-lam * (t - mu) ** 2 / (2 * mu**2 * t))
        out.extend(t[u < vals].tolist())
    oracle = np.array(out[:10_000])
    x = InverseGaussian(mu, lam).sample(RandomStream(13, 1), 10_000)
    assert stats.ks_2samp(x, oracle).pvalue > 0.01


def test_inverse_gaussian_transform_stable_for_huge_mean():
    x = inverse_gaussian_transform(np.array([1e12]), 1.0, np.array([0.3]), np.array([0.2]))
    assert np.all(np.isfinite(x)) and np.all(x > 0)


def test_quantile_examples():
    assert quantile(Normal(0, 1), 0.5) == 0.0
    assert math.isclose(quantile(Beta(1, 1), 0.3), 0.3, rel_tol=1e-12)


def test_inverse_gamma_quantile_matches_integrated_density():
    a, b = 5.0, 8.0
    x = quantile(InverseGamma(a, b), 0.5)
    dens = lambda t: b**a / math.gamma(a) * t ** (-a - 1) * math.exp(-b / t)
    cdf = lambda t: integrate.quad(dens, 0, t, epsabs=1e-13, epsrel=1e-12)[0]
    root = optimize.brentq(lambda t: cdf(t) - 0.5, 0.1, 20, xtol=1e-13)
    assert abs(cdf(x) - 0.5) < 1e-8
    assert math.isclose(x, root, rel_tol=1e-8)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: type(d).__name__)
def test_quantile_inverts_cdf(dist):
    for u in (1e-6, 0.1, 0.5, 0.9, 1 - 1e-6):
        assert math.isclose(float(dist.cdf(dist.quantile(u))), u, rel_tol=1e-10, abs_tol=1e-14)


def test_quantile_rejects_bad_input():
    with pytest.raises(ValueError):
        quantile(Normal(0, 1), 1.0)
    with pytest.raises(ValueError):
        quantile(Normal(0, 1), 0.0)
    with pytest.raises(ValueError):
        quantile(NegativeBinomial(2, 0.5), 0.5)


@pytest.mark.parametrize(
    "ctor",
    [lambda: Normal(0, 0), lambda: InverseGamma(-1, 1), lambda: Beta(1, 0), lambda: NegativeBinomial(1, 1.0),
     lambda: InverseGaussian(1, -2), lambda: BetaNegativeBinomial(1, 0, 1), lambda: ChiSquare(float("nan"))],
)
def test_invalid_parameters_rejected(ctor):
    with pytest.raises(ValueError):
        ctor()


def test_inverse_gamma_infinite_mean_flag():
    assert not InverseGamma(1.0, 2.0).has_finite_mean
    assert InverseGamma(1.5, 2.0).has_finite_mean


@settings(max_examples=40, deadline=None)
@given(shape=st.floats(0.5, 50), rate=st.floats(0.01, 100), seed=st.integers(0, 2**32))
def test_inverse_gamma_draws_positive(shape, rate, seed):
    x = InverseGamma(shape, rate).sample(RandomStream(seed, 0), 64)
    assert np.all(x > 0)
