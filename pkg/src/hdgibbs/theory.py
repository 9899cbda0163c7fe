"""Closed-form convergence rates, bound constants and regime notes.

Rates are evaluated as exact rationals where the inputs are integers and
converted to float once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .samplers.models import dimdep_extra_df

RATE_MODELS = ("standard-regression", "dag", "multivariate-mean", "hier-known", "dimdep-regression")

_REGIMES = {
    "standard-regression": "bounded away from 1 when p = O(n); rate → 1 when p grows faster than n",
    "dag": "bounded away from 1 when δ_max = O(n); rate → 1 when δ_max grows faster than n",
    "multivariate-mean": "at most 1/(n-1) for every p; tends to 1/(n+1) as p → ∞",
    "hier-known": "free of n and p",
    "dimdep-regression": "at most 1/(1+eps) for every n and p",
}


@dataclass(frozen=True)
class RateReport:
    model: str
    rate: float
    regime: str
    params: dict = field(default_factory=dict)
    exact: Fraction | None = None
    M1: float | None = None
    M2: float | None = None

    def __post_init__(self):
        if not 0 <= self.rate < 1:
            raise ValueError(f"rate {self.rate} outside [0, 1)")
        if self.M1 is not None and self.M2 is not None and self.M1 > self.M2:
            raise ValueError("M1 must not exceed M2")


def _int(name, value, lo):
    if int(value) != value or value < lo:
        raise ValueError(f"{name} must be an integer >= {lo}, got {value!r}")
    return int(value)


def theoretical_rate(model: str, **params) -> RateReport:
    """Geometric convergence rate of ``model``.

    Parameters by model:

    * ``standard-regression``: n, p
    * ``dag``: n, delta_max
    * ``multivariate-mean``: n, p
    * ``hier-known``: sigma2, tau2
    * ``dimdep-regression``: n, p, eps
    """
    if model == "standard-regression":
        n, p = _int("n", params["n"], 5), _int("p", params["p"], 1)
        exact = Fraction(p, n + p - 2)
        shown = {"n": n, "p": p}
    elif model == "dag":
        n, d = _int("n", params["n"], 5), _int("delta_max", params["delta_max"], 0)
        exact = Fraction(d, n + d - 2)
        shown = {"n": n, "delta_max": d}
    elif model == "multivariate-mean":
        n, p = _int("n", params["n"], 3), _int("p", params["p"], 1)
        exact = Fraction(p, n * p + p - 2)
        shown = {"n": n, "p": p}
    elif model == "hier-known":
        s2, t2 = float(params["sigma2"]), float(params["tau2"])
        if not (s2 > 0 and t2 > 0):
            raise ValueError("sigma2 and tau2 must be > 0")
        exact = Fraction(s2) / (Fraction(s2) + Fraction(t2))
        shown = {"sigma2": s2, "tau2": t2}
    elif model == "dimdep-regression":
        n, p = _int("n", params["n"], 5), _int("p", params["p"], 1)
        eps = float(params["eps"])
        if not eps > 0:
            raise ValueError("eps must be > 0")
        exact = Fraction(p, n + p + dimdep_extra_df(p, eps) - 2)
        shown = {"n": n, "p": p, "eps": eps}
    else:
        raise ValueError(f"unknown model {model!r}; expected one of {RATE_MODELS}")
    return RateReport(model=model, rate=float(exact), regime=_REGIMES[model], params=shown, exact=exact)


def dimdep_bound_holds(n_values, p_values, eps) -> np.ndarray:
    """Exact check of p/(n+p+ceil(p eps)-2) <= 1/(1+eps) over a grid.

    Returns a boolean array indexed ``[i, j]`` for ``n_values[i]``,
    ``p_values[j]``.  Integer arithmetic on eps = a/b keeps it exact.
    """
    frac = Fraction(repr(float(eps)))
    if not frac > 0:
        raise ValueError("eps must be > 0")
    a, b = frac.numerator, frac.denominator
    n = np.asarray(n_values, dtype=object)[:, None]
    p = np.asarray(p_values, dtype=object)[None, :]
    if np.any(n < 5) or np.any(p < 1):
        raise ValueError("need n >= 5 and p >= 1")
    q = -((-p * a) // b)  # ceil(p a / b)
    # p (1 + a/b) <= n + p + q - 2  <=>  p a <= b (n + q - 2)
    return np.asarray(p * a <= b * (n + q - 2), dtype=bool)


def posterior_corr_sigma_theta(n: int, p: int) -> float:
    """Posterior correlation of sigma2 and ||theta||^2 in the standard regression model."""
    if n < 5 or p < 1:
        raise ValueError("need n >= 5 and p >= 1")
    return math.sqrt(p / (n + p - 2))


def lasso_autocorr_lower_bound(n: int, p: int, y_sq_norm: float, var_sigma2_post: float) -> float:
    """Lower bound on the stationary lag-1 autocorrelation of the lasso sigma2 chain.

    May be negative (vacuous) when p is small relative to the data term.
    """
    if not var_sigma2_post > 0:
        raise ValueError("posterior variance must be > 0")
    if n < 5 or p < 1:
        raise ValueError("need n >= 5 and p >= 1")
    return p / (n + p - 2) * (1.0 - y_sq_norm / (p * math.sqrt(var_sigma2_post)))


class WassersteinBounds(NamedTuple):
    M1: float
    M2: float
    r: float


def wasserstein_rate_bounds(model: str, **params) -> WassersteinBounds:
    """Constants of the Wasserstein envelope M1 r^k <= d_W <= M2 r^k.

    * ``standard-regression``: sigma2_0, C, n, p
    * ``multivariate-mean``: sigma2_0, C, n, p (constants use n*p in place of n)
    * ``hier-known``: mu0, sigma2, tau2, n and optional xbar
    """
    if model in ("standard-regression", "multivariate-mean"):
        n, p = int(params["n"]), int(params["p"])
        s0, C = float(params["sigma2_0"]), float(params["C"])
        if s0 <= 0 or C < 0:
            raise ValueError("need sigma2_0 > 0 and C >= 0")
        if model == "standard-regression":
            size, r = n, p / (n + p - 2)
        else:
            size, r = n * p, p / (n * p + p - 2)
        if size <= 4:
            raise ValueError("the variance term needs n > 4 (n*p > 4 for the mean model)")
        centre = C / (size - 2)
        M1 = abs(s0 - centre)
        return WassersteinBounds(M1, M1 + centre * math.sqrt(2.0 / (size - 4)), r)
    if model == "hier-known":
        mu0 = np.asarray(params["mu0"], dtype=float)
        xbar = np.asarray(params.get("xbar", np.zeros_like(mu0)), dtype=float)
        s2, t2, n = float(params["sigma2"]), float(params["tau2"]), int(params["n"])
        if not (s2 > 0 and t2 > 0 and n >= 1):
            raise ValueError("need positive variances and n >= 1")
        M1 = float(np.abs(mu0 - xbar).sum()) / mu0.size
        return WassersteinBounds(M1, M1 + math.sqrt(2 * (s2 + t2) / (n * math.pi)), s2 / (s2 + t2))
    raise ValueError(f"no Wasserstein bound for model {model!r}")


def iterations_to_tolerance(n: int, p: int, eps: float, M: float) -> int:
    """Smallest K with M r^K <= eps for r = p/(n+p-2)."""
    if n < 5 or p < 1:
        raise ValueError("need n >= 5 and p >= 1")
    if not 0 < eps < M:
        raise ValueError("need 0 < eps < M")
    return math.ceil((math.log(M) - math.log(eps)) / (math.log(n + p - 2) - math.log(p)))


# -- bound collapse for existing drift/minorization analyses ----------------------


@dataclass(frozen=True)
class ChoiHobertReport:
    delta: float
    log_delta: float
    log_case1: float  # -n log 2 - n/4
    log_case2: float  # spectral intermediate bound
    log_case2_compact: float  # -(max omega^2) ||Y~||^2 / (2 lambda)

    @property
    def upper_bound_check(self) -> bool:
        return self.log_delta <= self.log_case1 and self.log_delta <= self.log_case2


def choi_hobert_delta(X, Y, lam: float) -> ChoiHobertReport:
    """Minorization constant of the Polya-Gamma logistic sampler, with its dominating bounds."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float).reshape(-1)
    n, p = X.shape
    if Y.shape != (n,):
        raise ValueError("Y must have one entry per row of X")
    if not np.all((Y == 0) | (Y == 1)):
        raise ValueError("Y must be binary (0/1)")
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    yt = Y - 0.5
    A = 0.5 * X.T @ X + lam * np.eye(p)
    evals, evecs = linalg.eigh(A)
    v = (evecs.T @ (X.T @ yt)) / np.sqrt(evals)  # A^{-1/2} X' Y~ in the eigenbasis
    w = X @ (evecs @ v)
    quad = float(w @ w)
    log_delta = 0.5 * p * math.log(lam) - 0.5 * float(np.sum(np.log(evals))) - n * math.log(2) - n / 4 - quad / (4 * lam)
    log_case1 = -n * math.log(2) - n / 4
    # singular values of X: omega_i^2 are eigenvalues of X X'
    om2, U = linalg.eigh(X @ X.T)
    om2 = np.clip(om2, 0.0, None)
    proj = U.T @ yt
    log_case2 = -float(np.sum(om2 * om2 / (om2 + 2 * lam) * proj * proj)) / (2 * lam)
    log_case2_compact = -float(om2.max()) * float(yt @ yt) / (2 * lam)
    return ChoiHobertReport(math.exp(log_delta), log_delta, log_case1, log_case2, log_case2_compact)


@dataclass(frozen=True)
class KhareHobertReport:
    gamma: float
    b: float
    d: float
    epsilon: float
    log_epsilon: float
    n_plus_p: int

    @property
    def bound_check(self) -> bool:
        """epsilon <= 2^{-(n+p)/2}, compared on the log scale."""
        return self.log_epsilon <= -self.n_plus_p / 2 * math.log(2)


def khare_hobert_epsilon(n: int, p: int, lam: float, X, Y, d: float | None = None) -> KhareHobertReport:
    """Drift and minorization constants of the lasso sampler's existing analysis."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float).reshape(-1)
    if X.shape != (n, p) or Y.shape != (n,):
        raise ValueError("X must be n x p and Y length n")
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    gamma = max(p / (n + p - 2), 0.5)
    yy = float(Y @ Y)
    b = yy + p * (n + 2 * p) / (2 * lam**2) + p / lam**2
    floor = 2 * b / (1 - gamma)
    if d is None:
        d = 2.01 * b / (1 - gamma)
    elif not d > floor:
        raise ValueError(f"d must exceed 2b/(1-gamma) = {floor}")
    # Y'[I - X (X'X + I/d)^{-1} X']Y = Y'(I + d X X')^{-1} Y
    M = d * (X @ X.T)
    M[np.diag_indices_from(M)] += 1.0
    num = float(Y @ linalg.solve(M, Y, assume_a="pos"))
    if num <= 0:
        log_eps = -math.inf
    else:
        log_eps = -0.5 + (n + p) / 2 * (math.log(num) - math.log(d) - math.log1p(p * p * lam * lam * d))
    return KhareHobertReport(gamma, b, d, math.exp(log_eps), log_eps, n + p)


# -- independent-prior drift/minorization bound ---------------------------------


@dataclass(frozen=True)
class RosenthalConstants:
    lambda_R: float
    b_R: float
    d_R: float
    epsilon_R: float
    log_epsilon_R: float
    alpha: float

    def __post_init__(self):
        if not 0 < self.lambda_R < 1:
            raise ValueError("lambda_R must lie in (0, 1)")
        if not self.d_R > 2 * self.b_R / (1 - self.lambda_R):
            raise ValueError("d_R must exceed 2 b_R / (1 - lambda_R)")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class RosenthalBound:
    bound: float
    log_bound: float
    log_rate: float  # log of the slower of the two geometric factors
    constants: RosenthalConstants


def _rosenthal_logs(lam, b, d, log_eps):
    L0 = math.log1p(-math.exp(log_eps))
    L1 = math.log1p(2 * b + 2 * lam * d)
    L2 = math.log1p(2 * b + lam * d) - math.log1p(d)
    if L0 == 0.0:
        # epsilon below double resolution: use log(1 - eps) ~ -eps
        L0 = -math.exp(log_eps)
    return L0, L1, L2


def optimal_alpha(lam: float, b: float, d: float, log_eps: float) -> float:
    """alpha minimising max(r1, r2); both log-factors are linear in alpha so the optimum is their crossing."""
    L0, L1, L2 = _rosenthal_logs(lam, b, d, log_eps)
    if L0 == 0.0:
        raise ValueError("epsilon_R underflows; no decaying alpha is representable")
    return L2 / (L0 - L1 + L2) * (1 - 1e-9)


def rosenthal_tv_bound(n: int, a: float, s: float, y_sq_norm: float, resid0_sq: float, k: int,
                       alpha: float | None = None, d_R: float | None = None) -> RosenthalBound:
    """Total-variation bound after k iterations of the independent-prior sampler.

    The constants depend on (n, a, s, Y'Y, ||Y - X beta_0||^2) only.
    ``alpha=None`` picks the minimax alpha.  The bound is computed on the
    log scale; ``bound`` may round to 1.0 when epsilon_R is tiny while
    ``log_rate`` still records the strict geometric decay.
    """
    if not a > 2:
        raise ValueError("need a > 2")
    if not s > 0:
        raise ValueError("need s > 0")
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    lam = n / (n + a - 2)
    b = y_sq_norm + n * s / (n + a - 2)
    d = 2.01 * b / (1 - lam) if d_R is None else float(d_R)
    if not d > 2 * b / (1 - lam):
        raise ValueError(f"d_R must exceed 2 b_R / (1 - lambda_R) = {2 * b / (1 - lam)}")
    log_eps = (n + a) / 2 * (math.log(s) - math.log(d + s))
    if alpha is None:
        alpha = optimal_alpha(lam, b, d, log_eps)
    consts = RosenthalConstants(lam, b, d, math.exp(log_eps), log_eps, alpha)
    L0, L1, L2 = _rosenthal_logs(lam, b, d, log_eps)
    log_r1 = alpha * L0
    log_r2 = alpha * L1 + (1 - alpha) * L2
    log_t1 = k * log_r1
    log_t2 = k * log_r2 + math.log1p(b / (1 - lam) + resid0_sq)
    hi, lo = max(log_t1, log_t2), min(log_t1, log_t2)
    log_bound = hi + math.log1p(math.exp(lo - hi))
    return RosenthalBound(math.exp(log_bound), log_bound, max(log_r1, log_r2), consts)


def hier_tv_envelope(mu0, sigma2: float, tau2: float, n: int, k: int, xbar=None) -> tuple[float, float]:
    """Lower/upper TV envelope for the known-variance hierarchical sampler (centred at xbar)."""
    if not (sigma2 > 0 and tau2 > 0) or n < 1 or k < 0:
        raise ValueError("need positive variances, n >= 1, k >= 0")
    mu0 = np.asarray(mu0, dtype=float)
    if xbar is not None:
        mu0 = mu0 - np.asarray(xbar, dtype=float)
    r = sigma2 / (sigma2 + tau2)
    base = float(np.linalg.norm(mu0)) * r**k
    return math.sqrt(n / (2 * (sigma2 + tau2))) * base, math.sqrt(n / (sigma2 + tau2)) * base
