"""Proof-level reduced chains of the standard regression sampler.

* ``sigma``: sigma2_k = (sigma2_{k-1} U_k + C) / V_k, U ~ chi2_p, V ~ chi2_{n+p}
* ``eta``:   eta_k = W_k / (W_k + 1 - eta_{k-1}), W ~ BetaPrime(p/2, (n+p)/2)
* ``q``:     Q_k ~ BetaNegBin(p/2, p/2 + Q_{k-1}, (n+p)/2)

Every kind runs ``replicates`` independent copies side by side; series have
shape ``(iters, replicates)``.
"""

from __future__ import annotations

import numpy as np

from ._common import BLOCK, Recorder

KINDS = ("sigma", "eta", "q")


def _validate(kind, n, p, C):
    if kind not in KINDS:
        raise ValueError(f"unknown reduced chain {kind!r}; expected one of {KINDS}")
    if n < 5 or p < 1:
        raise ValueError("reduced chains need n >= 5 and p >= 1")
    if C < 0:
        raise ValueError("C must be >= 0")
    if kind == "eta" and C <= 0:
        raise ValueError("the eta chain requires C > 0")


def _initial(kind, n, p, C, init, replicates, stream):
    if isinstance(init, str):
        if init != "stationary":
            raise ValueError(f"unknown init mode {init!r}")
        if kind == "sigma":
            return C / stream.chisquare(n, replicates)
        if kind == "eta":
            return stream.gen.beta(p / 2, n / 2, replicates)
        # joint (eta, Q) stationary law: eta ~ Beta(p/2, n/2), Q | eta ~ NB(p/2, 1 - eta)
        eta = stream.gen.beta(p / 2, n / 2, replicates)
        return stream.gen.negative_binomial(p / 2, 1.0 - eta).astype(float)
    x = np.broadcast_to(np.asarray(init, dtype=float), (replicates,)).copy()
    if kind == "sigma" and np.any(x <= 0):
        raise ValueError("initial sigma2 must be > 0")
    if kind == "eta" and np.any((x < 0) | (x >= 1)):
        raise ValueError("initial eta must lie in [0, 1)")
    if kind == "q" and np.any((x < 0) | (x != np.floor(x))):
        raise ValueError("initial Q must be a nonnegative integer")
    return x


def run_reduced_chain(kind, n, p, C, init, iters, stream, burn_in=0, replicates=1):
    """Returns ``(series, meta)`` with ``series[kind]`` of shape (iters, replicates)."""
    _validate(kind, n, p, C)
    x = _initial(kind, n, p, float(C), init, replicates, stream)
    rec = Recorder(iters, burn_in, {kind: (replicates,)})
    g = stream.gen
    for k in range(rec.total):
        j = k % BLOCK
        if j == 0:
            m = min(BLOCK, rec.total - k)
            if kind == "sigma":
                U = g.chisquare(p, (m, replicates))
                V = g.chisquare(n + p, (m, replicates))
            elif kind == "eta":
                W = g.standard_gamma(p / 2, (m, replicates)) / g.standard_gamma(
                    (n + p) / 2, (m, replicates)
                )
        if kind == "sigma":
            x = (x * U[j] + C) / V[j]
        elif kind == "eta":
            x = W[j] / (W[j] + 1.0 - x)
        else:
            q = g.beta(p / 2 + x, (n + p) / 2)
            x = g.negative_binomial(p / 2, 1.0 - q).astype(float)
        rec.put(k, **{kind: x})
    return rec.data, {"n": n, "p": p, "C": float(C), "replicates": replicates}
