"""Regression-family Gibbs kernels.

All kernels draw their standard variates in fixed-size blocks so that a
given ``(stream, iters, burn_in)`` always produces the same iterates.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from ..numerics import ridge_quantities
from ..rng import RandomStream
from ._common import BLOCK, Recorder, as_init, check_positive_init
from .models import (
    DimDepRegression,
    ElasticNet,
    IndependentPrior,
    Lasso,
    ModelSelection,
    SpikeSlab,
    StandardRegression,
    dimdep_extra_df,
)
from ..distributions import inverse_gaussian_transform

BETA_FLOOR = 1e-12


def _conjugate_regression(problem, shape_extra, rate_extra, init, iters, stream, burn_in, coords):
    """Shared two-block kernel: beta | sigma2 then sigma2 | beta.

    ``shape_extra`` adds degrees of freedom to the chi-square divisor and
    ``rate_extra`` adds to the numerator (standard model: both zero).
    """
    q = ridge_quantities(problem)
    n, p = problem.n, problem.p
    C = q.C
    L = q.chol_A
    df = n + p + shape_extra
    init = as_init(init, {"sigma2": 1.0})
    if init.get("mode") == "stationary":
        # sigma2 | Y ~ IG((n + shape_extra)/2, (C + rate_extra)/2)
        sigma2 = (C + rate_extra) / stream.chisquare(n + shape_extra)
    else:
        sigma2 = float(init["sigma2"])
    check_positive_init(sigma2=sigma2)

    coords = np.asarray(coords, dtype=int)
    shapes = {"sigma2": (), "theta_sq": ()}
    if coords.size:
        shapes.update(beta=(coords.size,), theta=(coords.size,))
    rec = Recorder(iters, burn_in, shapes)
    numer_extra = C + rate_extra
    for k in range(rec.total):
        j = k % BLOCK
        if j == 0:
            m = min(BLOCK, rec.total - k)
            Z = stream.normal((m, p))
            V = stream.chisquare(df, m)
            zz = np.einsum("ij,ij->i", Z, Z)
        root = math.sqrt(sigma2)
        theta_sq = sigma2 * zz[j]
        if coords.size and k >= burn_in:
            # theta = L^T (beta - beta_tilde) = sqrt(sigma2) z
            beta = q.beta_tilde + root * linalg.solve_triangular(L, Z[j], lower=True, trans="T")
            rec.put(k, beta=beta[coords], theta=root * Z[j][coords])
        sigma2 = (theta_sq + numer_extra) / V[j]
        rec.put(k, sigma2=sigma2, theta_sq=theta_sq)
    return rec.data, {"C": C, "n": n, "p": p}


def run_standard(spec: StandardRegression, init, iters, stream, burn_in=0, coords=()):
    return _conjugate_regression(spec.problem, 0, 0.0, init, iters, stream, burn_in, coords)


def run_dimdep(spec: DimDepRegression, init, iters, stream, burn_in=0, coords=()):
    p = spec.problem.p
    extra = dimdep_extra_df(p, spec.eps)
    data, meta = _conjugate_regression(spec.problem, extra, spec.s, init, iters, stream, burn_in, coords)
    meta["prior_shape_df"] = extra
    return data, meta


def run_independent(spec: IndependentPrior, init, iters, stream, burn_in=0, coords=()):
    """sigma2 | beta_{k-1} first, then beta | sigma2 (high-dimensional block last)."""
    X, Y, lam = spec.problem.X, spec.problem.Y, spec.problem.lam
    n, p = X.shape
    evals, evecs = linalg.eigh(X.T @ X)
    evals = np.clip(evals, 0.0, None)
    xty_rot = evecs.T @ (X.T @ Y)
    init = as_init(init, {"beta": np.zeros(p)})
    beta = np.asarray(init["beta"], dtype=float).reshape(-1)
    if beta.shape != (p,):
        raise ValueError(f"initial beta must have length {p}")
    coords = np.asarray(coords, dtype=int)
    shapes = {"sigma2": (), "resid_sq": ()}
    if coords.size:
        shapes["beta"] = (coords.size,)
    rec = Recorder(iters, burn_in, shapes)
    df = n + spec.a
    for k in range(rec.total):
        j = k % BLOCK
        if j == 0:
            m = min(BLOCK, rec.total - k)
            Z = stream.normal((m, p))
            V = stream.chisquare(df, m)
        r = Y - X @ beta
        resid_sq = float(r @ r)
        sigma2 = (resid_sq + spec.s) / V[j]
        prec = evals + lam * sigma2
        beta = evecs @ (xty_rot / prec + math.sqrt(sigma2) * Z[j] / np.sqrt(prec))
        rec.put(k, sigma2=sigma2, resid_sq=resid_sq)
        if coords.size:
            rec.put(k, beta=beta[coords])
    return rec.data, {"n": n, "p": p}


class _TauGaussian:
    """Draws beta ~ N(A_tau^{-1} X'Y, sigma2 A_tau^{-1}) and the sigma2 numerator.

    Uses a p x p Cholesky when p <= n and the n x n Woodbury form otherwise.
    Returns (beta, quad, C_tau) with quad = (beta - beta_tilde)' A_tau (beta - beta_tilde).
    """

    def __init__(self, X, Y):
        self.X = X
        self.Y = Y
        self.n, self.p = X.shape
        self.XtX = X.T @ X
        self.XtY = X.T @ Y
        self.yy = float(Y @ Y)
        self.wide = self.p > self.n
        self.extra_normals = self.n if self.wide else 0

    def draw(self, tau, sigma2, z, e):
        if not self.wide:
            A = self.XtX.copy()
            A[np.diag_indices_from(A)] += 1.0 / tau
            L = linalg.cholesky(A, lower=True, check_finite=False)
            bt = linalg.cho_solve((L, True), self.XtY, check_finite=False)
            C = max(self.yy - float(self.XtY @ bt), 0.0)
            beta = bt + math.sqrt(sigma2) * linalg.solve_triangular(
                L, z, lower=True, trans="T", check_finite=False
            )
            return beta, sigma2 * float(z @ z), C
        X, Y = self.X, self.Y
        XD = X * tau
        M = XD @ X.T
        M[np.diag_indices_from(M)] += 1.0
        cf = linalg.cho_factor(M, lower=True, check_finite=False)
        w0 = linalg.cho_solve(cf, Y, check_finite=False)
        C = max(float(Y @ w0), 0.0)
        bt = XD.T @ w0
        # exact sampler for N(A^{-1} X'a, A^{-1}) with A = X'X + D^{-1}, a = Y / sigma
        s = math.sqrt(sigma2)
        u = np.sqrt(tau) * z
        v = X @ u + e
        w = linalg.cho_solve(cf, Y / s - v, check_finite=False)
        beta = s * (u + XD.T @ w)
        d = beta - bt
        Xd = X @ d
        quad = float(Xd @ Xd + np.sum(d * d / tau))
        return beta, quad, C


def run_model_selection(spec: ModelSelection, init, iters, stream, burn_in=0, coords=()):
    """tau | (beta, sigma2), then beta | (sigma2, tau), then sigma2 | (beta, tau)."""
    X, Y, variant = spec.X, spec.Y, spec.variant
    n, p = X.shape
    init = as_init(init, {"beta": np.ones(p), "sigma2": 1.0})
    beta = np.asarray(init["beta"], dtype=float).reshape(-1)
    if beta.shape != (p,):
        raise ValueError(f"initial beta must have length {p}")
    sigma2 = float(init["sigma2"])
    check_positive_init(sigma2=sigma2)
    if not isinstance(variant, SpikeSlab) and np.any(beta == 0):
        # the inverse-Gaussian mean sqrt(lam sigma2 / beta_j^2) is undefined
        raise ValueError("initial beta has a zero coordinate; the tau update is undefined")

    if spec.sigma_prior is None:
        shape0, rate0 = 0.0, 0.0
    else:
        shape0, rate0 = spec.sigma_prior
    df = n + p + 2.0 * shape0

    if isinstance(variant, SpikeSlab):
        zeta = np.broadcast_to(np.asarray(variant.zeta, dtype=float), (p,))
        kappa = np.broadcast_to(np.asarray(variant.kappa, dtype=float), (p,))
        w = np.broadcast_to(np.asarray(variant.w, dtype=float), (p,))
        log_odds_prior = np.log(w) - np.log1p(-w) - 0.5 * np.log(kappa)
        slab_coef = (kappa - 1.0) / (2.0 * kappa * zeta)
    elif isinstance(variant, Lasso):
        ig_lam = variant.lam
    elif isinstance(variant, ElasticNet):
        ig_lam = variant.lam1
    else:
        raise TypeError(f"unknown model-selection variant {variant!r}")

    gauss = _TauGaussian(X, Y)
    ne = gauss.extra_normals
    coords = np.asarray(coords, dtype=int)
    shapes = {"sigma2": (), "C_tau": ()}
    if coords.size:
        shapes.update(beta=(coords.size,), tau=(coords.size,))
    rec = Recorder(iters, burn_in, shapes)
    for k in range(rec.total):
        j = k % BLOCK
        if j == 0:
            m = min(BLOCK, rec.total - k)
            Ztau = stream.normal((m, p))
            Utau = stream.uniform((m, p))
            Zb = stream.normal((m, p + ne))
            V = stream.chisquare(df, m)
        if isinstance(variant, SpikeSlab):
            # P(slab) = 1 / (1 + exp(-logit)), logit from the two-point conditional
            logit = log_odds_prior + np.square(beta) / sigma2 * slab_coef
            slab = Utau[j] * (1.0 + np.exp(-logit)) < 1.0
            tau = np.where(slab, kappa * zeta, zeta)
        else:
            b2 = np.maximum(np.square(beta), BETA_FLOOR**2)
            mu = np.sqrt(ig_lam * sigma2 / b2)
            inv_tau = inverse_gaussian_transform(mu, ig_lam, Ztau[j], Utau[j])
            if isinstance(variant, ElasticNet):
                inv_tau = inv_tau + variant.lam2
            tau = 1.0 / inv_tau
        zb = Zb[j]
        beta, quad, C = gauss.draw(tau, sigma2, zb[:p], zb[p:])
        sigma2 = (quad + C + 2.0 * rate0) / V[j]
        rec.put(k, sigma2=sigma2, C_tau=C)
        if coords.size:
            rec.put(k, beta=beta[coords], tau=tau[coords])
    return rec.data, {"n": n, "p": p}
