"""Multivariate-mean and normal-hierarchical kernels."""

from __future__ import annotations

import math

import numpy as np

from ._common import BLOCK, Recorder, as_init, check_positive_init
from .models import HierKnownVar, HierUnknownVar, MultivariateMean


def mean_model_constants(spec: MultivariateMean):
    """Return (mu_tilde, C) for the conjugate multivariate-mean posterior."""
    X = spec.data
    n = X.shape[0]
    total = X.sum(axis=0)
    mu_tilde = total / (n + spec.lam)
    C = max(float(np.sum(X * X)) - (n + spec.lam) * float(mu_tilde @ mu_tilde), 0.0)
    return mu_tilde, C


def run_mean(spec: MultivariateMean, init, iters, stream, burn_in=0):
    """mu | sigma2 then sigma2 | mu."""
    n, p = spec.data.shape
    mu_tilde, C = mean_model_constants(spec)
    init = as_init(init, {"sigma2": 1.0})
    if init.get("mode") == "stationary":
        sigma2 = C / stream.chisquare(n * p)
    else:
        sigma2 = float(init["sigma2"])
    check_positive_init(sigma2=sigma2)
    scale = 1.0 / (n + spec.lam)
    rec = Recorder(iters, burn_in, {"sigma2": (), "mu": (p,)})
    df = n * p + p
    for k in range(rec.total):
        j = k % BLOCK
        if j == 0:
            m = min(BLOCK, rec.total - k)
            Z = stream.normal((m, p))
            V = stream.chisquare(df, m)
        mu = mu_tilde + math.sqrt(sigma2 * scale) * Z[j]
        # (n + lam) ||mu - mu_tilde||^2 = sigma2 ||z||^2
        sigma2 = (sigma2 * float(Z[j] @ Z[j]) + C) / V[j]
        rec.put(k, sigma2=sigma2, mu=mu)
    return rec.data, {"n": n, "p": p, "C": C}


def exact_hier_marginal(k: int, mu0, sigma2: float, tau2: float, n: int, xbar=None):
    """Exact law of mu_k for the known-variance sampler started at mu0.

    Returns ``(mean, variance)``; the law is spherical normal with that
    per-coordinate variance.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if sigma2 <= 0 or tau2 <= 0 or n < 1:
        raise ValueError("need positive variances and n >= 1")
    mu0 = np.asarray(mu0, dtype=float)
    xbar = np.zeros_like(mu0) if xbar is None else np.asarray(xbar, dtype=float)
    r = sigma2 / (sigma2 + tau2)
    rk = r**k
    mean = xbar + rk * (mu0 - xbar)
    var = (sigma2 + tau2) / n * -math.expm1(2 * k * math.log(r))
    return mean, var


def run_hier_known(spec: HierKnownVar, init, iters, stream, burn_in=0, replicates=None, full=False):
    """psi | mu then mu | psi with known variances.

    The default path draws only the mean of the psi block, which is all the
    mu update needs; ``full=True`` draws every psi_i.
    Series ``mu`` has shape (iters, p) or (iters, replicates, p).
    """
    X = spec.data
    n, p = X.shape
    s2, t2 = spec.sigma2, spec.tau2
    r = s2 / (s2 + t2)
    xbar = X.mean(axis=0)
    init = as_init(init, {"mu": np.ones(p)})
    R = 1 if replicates is None else int(replicates)
    if init.get("mode") == "stationary":
        mu = xbar + math.sqrt((s2 + t2) / n) * stream.normal((R, p))
    else:
        mu = np.broadcast_to(np.asarray(init["mu"], dtype=float), (R, p)).copy()
    if full and R != 1:
        raise ValueError("the full psi path runs a single chain")
    rec = Recorder(iters, burn_in, {"mu": (R, p)})
    sd_psi = math.sqrt(t2 * r)
    sd_mu = math.sqrt(t2 / n)
    if full:
        for k in range(rec.total):
            psi = (1 - r) * X + r * mu[0] + sd_psi * stream.normal((n, p))
            mu = (psi.mean(axis=0) + sd_mu * stream.normal(p))[None, :]
            rec.put(k, mu=mu)
    else:
        sd = math.sqrt(t2 * (r + 1.0) / n)
        shift = (1 - r) * xbar
        for k in range(rec.total):
            j = k % BLOCK
            if j == 0:
                Z = stream.normal((min(BLOCK, rec.total - k), R, p))
            mu = shift + r * mu + sd * Z[j]
            rec.put(k, mu=mu)
    data = rec.data
    if replicates is None:
        data["mu"] = data["mu"][:, 0, :]
    return data, {"n": n, "p": p, "r": r, "xbar": xbar}


def run_hier_unknown(spec: HierUnknownVar, init, iters, stream, burn_in=0, full=False):
    """psi, then mu, then sigma2, then tau2.

    The default path reduces the psi block to the sufficient statistics the
    three later updates consume (its mean, one projection onto the centred
    data, and a chi-square remainder); ``full=True`` draws every psi_i.
    """
    X = spec.data
    n, p = X.shape
    init = as_init(init, {"mu": np.ones(p), "sigma2": 1.0, "tau2": 1.0})
    mu = np.asarray(init["mu"], dtype=float).reshape(-1).copy()
    if mu.shape != (p,):
        raise ValueError(f"initial mu must have length {p}")
    sigma2, tau2 = float(init["sigma2"]), float(init["tau2"])
    check_positive_init(sigma2=sigma2, tau2=tau2)
    df_s = spec.a_sigma + n * p
    df_t = spec.a_tau + n * p
    xbar = X.mean(axis=0)
    E = X - xbar
    SE = float(np.sum(E * E))
    root_se = math.sqrt(SE)
    df_rest = (n - 1) * p - 1
    rec = Recorder(iters, burn_in, {"sigma2": (), "tau2": (), "mu": (p,)})
    for k in range(rec.total):
        rho = sigma2 / (sigma2 + tau2)
        sd = math.sqrt(sigma2 * tau2 / (sigma2 + tau2))
        if full:
            psi = (1 - rho) * X + rho * mu + sd * stream.normal((n, p))
            psibar = psi.mean(axis=0)
            mu = psibar + math.sqrt(tau2 / n) * stream.normal(p)
            a = float(np.sum((X - psi) ** 2))
            sigma2 = (spec.s_sigma + a) / stream.chisquare(df_s)
            b = float(np.sum((psi - mu) ** 2))
            tau2 = (spec.s_tau + b) / stream.chisquare(df_t)
        else:
            j = k % BLOCK
            if j == 0:
                m = min(BLOCK, rec.total - k)
                G = stream.normal(m)
                REST = stream.chisquare(df_rest, m) if df_rest > 0 else np.zeros(m)
                ZBAR = stream.normal((m, p)) / math.sqrt(n)
                ZMU = stream.normal((m, p))
                VS = stream.chisquare(df_s, m)
                VT = stream.chisquare(df_t, m)
            g = G[j]
            zz = g * g + REST[j]
            zbar = ZBAR[j]
            dev = rho * (xbar - mu) - sd * zbar
            psibar = (1 - rho) * xbar + rho * mu + sd * zbar
            mu = psibar + math.sqrt(tau2 / n) * ZMU[j]
            cross = sd * root_se * g
            a = rho * rho * SE - 2 * rho * cross + sd * sd * zz + n * float(dev @ dev)
            d = psibar - mu
            b = (1 - rho) ** 2 * SE + 2 * (1 - rho) * cross + sd * sd * zz + n * float(d @ d)
            sigma2 = (spec.s_sigma + a) / VS[j]
            tau2 = (spec.s_tau + b) / VT[j]
        rec.put(k, sigma2=sigma2, tau2=tau2, mu=mu)
    return rec.data, {"n": n, "p": p}
