"""Per-vertex Gibbs chains for the Gaussian DAG-Wishart posterior."""

from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from ._common import BLOCK, Recorder, check_positive_init
from .models import DagWishart


def vertex_constants(spec: DagWishart, j: int):
    """Return (W_j, mu_j, C_j) for vertex ``j``; empty arrays when j has no parents."""
    pa = list(spec.dag.parents[j])
    n = spec.data.shape[0]
    G = spec.U + spec.data.T @ spec.data  # U + nS
    W = G[np.ix_(pa, pa)]
    if pa:
        mu = linalg.solve(W, G[pa, j], assume_a="pos")
        C = float(G[j, j] - mu @ W @ mu)
    else:
        mu = np.zeros(0)
        C = float(G[j, j])
    if C <= 0:
        raise ValueError(f"vertex {j}: nonpositive residual constant C_j={C}")
    return W, mu, C


def run_vertex(spec: DagWishart, j: int, init, iters, stream, burn_in=0):
    """L_j | D_j then D_j | L_j for one vertex."""
    n = spec.data.shape[0]
    W, mu, C = vertex_constants(spec, j)
    delta = len(mu)
    df = n + spec.alpha[j] - 2
    if df <= 0:
        raise ValueError(f"vertex {j}: n + alpha_j - 2 must be positive")
    if isinstance(init, str):
        if init != "stationary":
            raise ValueError(f"unknown init mode {init!r}")
        D = C / stream.chisquare(df - delta)
    else:
        D = float(init)
    check_positive_init(D=D)
    R = linalg.cholesky(W, lower=True) if delta else None
    shapes = {"D": ()}
    if delta:
        shapes["L"] = (delta,)
    rec = Recorder(iters, burn_in, shapes)
    for k in range(rec.total):
        i = k % BLOCK
        if i == 0:
            m = min(BLOCK, rec.total - k)
            Z = stream.normal((m, delta))
            V = stream.chisquare(df, m)
        if delta:
            z = Z[i]
            # W^{1/2}(L - mu) has squared norm D ||z||^2
            L = mu + math.sqrt(D) * linalg.solve_triangular(R, z, lower=True, trans="T")
            D = (D * float(z @ z) + C) / V[i]
            rec.put(k, D=D, L=L)
        else:
            D = C / V[i]
            rec.put(k, D=D)
    return rec.data, {"vertex": j, "delta": delta, "C": C, "n": n}
