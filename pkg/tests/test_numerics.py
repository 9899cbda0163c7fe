import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdgibbs.distributions import Gamma, InverseGamma, Normal, StudentT
from hdgibbs.numerics import (
    RegressionProblem,
    max_singular_value_sq,
    ridge_quantities,
    tau_quantities,
    tv_spherical_normals,
    wasserstein_1d,
    wasserstein_1d_empirical,
)
from hdgibbs.rng import RandomStream


def direct_C(X, Y, prec):
    A = X.T @ X + np.diag(prec)
    return float(Y @ (np.eye(len(Y)) - X @ np.linalg.inv(A) @ X.T) @ Y)


def test_zero_design():
    Y = np.arange(1.0, 7.0)
    q = ridge_quantities(RegressionProblem(np.zeros((6, 3)), Y, lam=2.0))
    assert np.allclose(q.A, 2 * np.eye(3)) and np.allclose(q.beta_tilde, 0)
    assert math.isclose(q.C, Y @ Y)


def test_identity_design():
    Y = np.full(5, 2.0)
    q = ridge_quantities(RegressionProblem(np.eye(5), Y, 1.0))
    assert np.allclose(q.A, 2 * np.eye(5)) and np.allclose(q.beta_tilde, Y / 2)
    assert math.isclose(q.C, Y @ Y / 2)


def test_random_design_matches_direct_formula(np_rng):
    X, Y = np_rng.normal(size=(10, 4)), np_rng.normal(size=10)
    q = ridge_quantities(RegressionProblem(X, Y, 1.0))
    assert math.isclose(q.C, direct_C(X, Y, np.ones(4)), rel_tol=1e-10)
    assert np.allclose(q.chol_A @ q.chol_A.T, q.A)


def test_tau_quantities(np_rng):
    X, Y = np_rng.normal(size=(8, 3)), np_rng.normal(size=8)
    tau = np_rng.uniform(0.2, 3, 3)
    q = tau_quantities(X, Y, tau)
    assert math.isclose(q.C, direct_C(X, Y, 1 / tau), rel_tol=1e-10)
    r = ridge_quantities(RegressionProblem(X, Y, 0.5))
    assert math.isclose(tau_quantities(X, Y, np.full(3, 2.0)).C, r.C, rel_tol=1e-12)
    with pytest.raises(ValueError):
        tau_quantities(X, Y, np.array([1.0, 0.0, 1.0]))


def test_problem_preconditions():
    with pytest.raises(ValueError):
        RegressionProblem(np.ones((4, 2)), np.ones(4))
    with pytest.raises(ValueError):
        RegressionProblem(np.ones((6, 2)), np.ones(6), lam=0.0)
    with pytest.raises(ValueError):
        RegressionProblem(np.ones((6, 2)), np.ones(5))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(5, 12), p=st.integers(1, 30), seed=st.integers(0, 2**32 - 1),
       log_lam=st.floats(-4, 3), scale=st.floats(0.01, 100))
def test_C_bounded_by_response_norm(n, p, seed, log_lam, scale):
    g = np.random.default_rng(seed)
    X, Y = scale * g.normal(size=(n, p)), g.normal(size=n)
    q = ridge_quantities(RegressionProblem(X, Y, 10.0**log_lam))
    assert 0 <= q.C <= Y @ Y * (1 + 1e-12)
    t = tau_quantities(X, Y, g.uniform(0.01, 10, p))
    assert 0 <= t.C <= Y @ Y * (1 + 1e-12)


def test_max_singular_value_sq(np_rng):
    assert max_singular_value_sq(np.eye(3)) == (pytest.approx(1.0), False)
    X = np.zeros((3, 4))
    X[0, 0], X[1, 1] = 3, 1
    assert max_singular_value_sq(X)[0] == pytest.approx(9.0)
    assert max_singular_value_sq(np.zeros((2, 2))) == (0.0, True)
    X = np_rng.normal(size=(5, 50))
    G = X @ X.T
    v = np.ones(5)
    for _ in range(2000):
        v = G @ v
        v /= np.linalg.norm(v)
    power = float(v @ G @ v)
    val, _ = max_singular_value_sq(X)
    assert math.isclose(val, power, rel_tol=1e-8)
    assert val >= np.max(np.sum(X * X, axis=1))


def test_wasserstein_examples(np_rng):
    assert wasserstein_1d(Normal(0, 1), Normal(0, 1)) == 0.0
    assert wasserstein_1d(Normal(0, 1), Normal(3, 1)) == pytest.approx(3.0, abs=1e-6)
    a = np.sort(InverseGamma(5, 8).sample(RandomStream(1, 0), 1_000_000))
    b = np.sort(InverseGamma(5, 16).sample(RandomStream(1, 1), 1_000_000))
    assert abs(wasserstein_1d(InverseGamma(5, 8), InverseGamma(5, 16)) - np.mean(np.abs(a - b))) < 0.01


def test_wasserstein_rejects_infinite_mean():
    with pytest.raises(ValueError):
        wasserstein_1d(InverseGamma(1.0, 1.0), Normal(0, 1))


def test_wasserstein_triangle_inequality(np_rng):
    for _ in range(15):
        d = [Gamma(np_rng.uniform(1, 5), np_rng.uniform(0.5, 3)) for _ in range(3)]
        ab, bc, ac = wasserstein_1d(d[0], d[1]), wasserstein_1d(d[1], d[2]), wasserstein_1d(d[0], d[2])
        assert ac <= ab + bc + 1e-5


def test_empirical_wasserstein():
    exact = StudentT(5)
    x = exact.sample(RandomStream(2, 0), 100_000)
    sd = math.sqrt(exact.var())
    assert wasserstein_1d_empirical(x, exact) < 0.02 * sd
    assert wasserstein_1d_empirical(x + 1, exact) == pytest.approx(1.0, abs=0.02)
    # near-degenerate exact law: distance equals the offset from its mean
    assert wasserstein_1d_empirical(np.full(100, 3.0), Normal(1.0, 1e-12)) == pytest.approx(2.0, abs=1e-4)
    with pytest.raises(ValueError):
        wasserstein_1d_empirical([], exact)


def test_tv_closed_form_and_identity():
    assert tv_spherical_normals([0.0], 1.0, [0.0], 1.0) == (0.0, 0.0)
    est, se = tv_spherical_normals([0.0], 1.0, [2.0], 1.0)
    assert est == pytest.approx(0.682689492, abs=1e-8) and se == 0.0


def test_tv_monte_carlo_against_independent_oracle(np_rng):
    m1, m2 = np.array([0.0, 0.5, -0.3, 1.0]), np.array([0.2, 0.0, 0.1, 0.4])
    v1, v2 = 1.0, 1.7
    est, se = tv_spherical_normals(m1, v1, m2, v2, 200_000, RandomStream(3, 0))
    # oracle: E_Q[(1 - p/q)_+] under the other law, written directly from the densities
    x = m2 + math.sqrt(v2) * np_rng.normal(size=(1_000_000, 4))
    lp = -0.5 * np.sum((x - m1) ** 2, 1) / v1 - 2 * math.log(v1)
    lq = -0.5 * np.sum((x - m2) ** 2, 1) / v2 - 2 * math.log(v2)
    vals = np.clip(1 - np.exp(lp - lq), 0, None)
    oracle, ose = vals.mean(), vals.std() / 1000
    assert abs(est - oracle) < 3 * math.hypot(se, ose)
    assert 0 <= est <= 1


def test_tv_requires_stream_for_unequal_variances():
    with pytest.raises(ValueError):
        tv_spherical_normals([0.0], 1.0, [0.0], 2.0)
    with pytest.raises(ValueError):
        tv_spherical_normals([0.0], 0.0, [0.0], 1.0)
