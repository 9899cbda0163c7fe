"""Linear algebra for the regression kernels and numeric distances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg, special

from .distributions import ScalarDist
from .rng import RandomStream


class ConditioningError(ArithmeticError):
    """Raised when a matrix that must be positive-definite fails to factor."""


@dataclass(frozen=True)
class RegressionProblem:
    X: np.ndarray
    Y: np.ndarray
    lam: float = 1.0

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.asarray(self.Y, dtype=float).reshape(-1)
        if X.shape[0] != Y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but Y has length {Y.shape[0]}")
        if X.shape[0] < 5:
            raise ValueError("regression requires n >= 5")
        if not self.lam > 0:
            raise ValueError("lambda must be > 0")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class RidgeQuantities:
    A: np.ndarray
    beta_tilde: np.ndarray
    C: float
    chol_A: np.ndarray  # lower triangular, A = L L^T


def _quantities(X, Y, diag_precision):
    XtX = X.T @ X
    A = XtX + np.diag(diag_precision)
    try:
        L = linalg.cholesky(A, lower=True)
    except linalg.LinAlgError as exc:
        raise ConditioningError("A failed to factor as positive-definite") from exc
    XtY = X.T @ Y
    beta = linalg.cho_solve((L, True), XtY)
    C = max(float(Y @ Y - XtY @ beta), 0.0)
    return RidgeQuantities(A=A, beta_tilde=beta, C=C, chol_A=L)


def ridge_quantities(problem: RegressionProblem) -> RidgeQuantities:
    """A = X'X + lam I, posterior mean A^{-1} X'Y and residual constant C.

    C is evaluated in the subtraction form ``|Y|^2 - Y'X A^{-1} X'Y`` and
    clamped at zero to absorb roundoff.
    """
    return _quantities(problem.X, problem.Y, np.full(problem.p, problem.lam))


def tau_quantities(X, Y, tau) -> RidgeQuantities:
    """Same as :func:`ridge_quantities` with prior precision diag(1/tau)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(~(tau > 0)):
        raise ValueError("all tau_j must be > 0")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return _quantities(X, np.asarray(Y, dtype=float), 1.0 / tau)


def max_singular_value_sq(X) -> tuple[float, bool]:
    """Largest eigenvalue of X X^T and a flag that is True for a zero matrix."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not np.any(X):
        return 0.0, True
    s = linalg.svdvals(X)
    return float(s[0] ** 2), False


def wasserstein_1d(dist_a: ScalarDist, dist_b: ScalarDist) -> float:
    """Exact 1-D Wasserstein distance via the quantile coupling.

    Integrates |Q_a(u) - Q_b(u)| over (0, 1) with adaptive quadrature,
    splitting the interval so the endpoint singularities are isolated.
    """
    for d in (dist_a, dist_b):
        if not d.continuous:
            raise ValueError("wasserstein_1d needs continuous distributions")
        if not d.has_finite_mean:
            raise ValueError(f"{d!r} has no finite mean")
    if dist_a == dist_b:
        return 0.0

    def integrand(u):
        return abs(dist_a.quantile(u) - dist_b.quantile(u))

    total = 0.0
    for lo, hi in ((0.0, 0.01), (0.01, 0.5), (0.5, 0.99), (0.99, 1.0)):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-9, epsrel=1e-9, limit=200)
        total += val
    return total


def wasserstein_1d_empirical(sample, exact: ScalarDist) -> float:
    """Distance between a sample and an exact law using midpoint quantiles."""
    x = np.sort(np.asarray(sample, dtype=float).reshape(-1))
    m = x.size
    if m == 0:
        raise ValueError("sample must be nonempty")
    if not exact.has_finite_mean:
        raise ValueError(f"{exact!r} has no finite mean")
    u = (np.arange(1, m + 1) - 0.5) / m
    return float(np.mean(np.abs(x - exact.quantile(u))))


def tv_spherical_normals(
    mean1, var1: float, mean2, var2: float, mc_draws: int = 1_000_000, stream: RandomStream | None = None
) -> tuple[float, float]:
    """Total variation between N(mean1, var1 I) and N(mean2, var2 I).

    Returns ``(estimate, standard_error)``.  Equal variances use the closed
    form ``2 Phi(|d| / (2 sigma)) - 1`` with zero standard error; otherwise
    E_P[(1 - q/p)_+] is estimated by Monte Carlo under P.
    """
    m1 = np.atleast_1d(np.asarray(mean1, dtype=float))
    m2 = np.atleast_1d(np.asarray(mean2, dtype=float))
    if m1.shape != m2.shape:
        raise ValueError("means must have equal length")
    if not (var1 > 0 and var2 > 0):
        raise ValueError("variances must be > 0")
    delta = float(np.linalg.norm(m1 - m2))
    if var1 == var2:
        if delta == 0.0:
            return 0.0, 0.0
        # 2 Phi(x) - 1 = erf(x / sqrt 2)
        return float(special.erf(delta / (2.0 * math.sqrt(var1)) / math.sqrt(2.0))), 0.0
    if stream is None:
        raise ValueError("a stream is required when variances differ")
    p = m1.size
    total = 0.0
    total_sq = 0.0
    remaining = int(mc_draws)
    while remaining > 0:
        m = min(remaining, 200_000)
        e = math.sqrt(var1) * stream.normal((m, p))
        r1 = np.einsum("ij,ij->i", e, e)
        # |x - m2|^2 - |x - m1|^2 without cancellation
        dr = 2.0 * (e @ (m1 - m2)) + delta * delta
        log_ratio = (
            -0.5 * p * math.log1p((var2 - var1) / var1)
            + r1 * ((var2 - var1) / (var1 * var2)) / 2.0
            - dr / (2.0 * var2)
        )
        vals = -np.expm1(np.minimum(log_ratio, 0.0))
        total += vals.sum()
        total_sq += np.square(vals).sum()
        remaining -= m
    n = int(mc_draws)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return float(mean), float(math.sqrt(var / n))
