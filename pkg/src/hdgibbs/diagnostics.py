"""Empirical convergence diagnostics."""

from __future__ import annotations

import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .rng import RandomStream


def lag1_autocorr(series) -> float:
    """Sample correlation of the pairs (x_k, x_{k+1})."""
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.size < 3:
        raise ValueError("need at least 3 values")
    a, b = x[:-1], x[1:]
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt(float(a @ a) * float(b @ b))
    if denom == 0.0:
        raise ValueError("autocorrelation undefined for a constant series")
    return float(a @ b) / denom


def spectral_density_zero(x) -> float:
    """Bartlett-window estimate of the spectral density at frequency zero.

    Returns the long-run variance sum_h gamma(h), so var(mean) ~ S / len(x).
    """
    x = np.asarray(x, dtype=float)
    m = x.size
    x = x - x.mean()
    gamma0 = float(x @ x) / m
    bw = int(math.floor(m ** (1 / 3)))
    s = gamma0
    for h in range(1, bw + 1):
        s += 2 * (1 - h / (bw + 1)) * float(x[:-h] @ x[h:]) / m
    return max(s, 0.0)


def geweke_z(series, early_frac: float = 0.1, late_frac: float = 0.5) -> float:
    """Geweke z-score comparing the first ``early_frac`` with the last ``late_frac`` of a chain."""
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.size < 100:
        raise ValueError("need at least 100 values")
    if not (0 < early_frac < 1 and 0 < late_frac < 1 and early_frac + late_frac <= 1):
        raise ValueError("segment fractions must be positive and sum to at most 1")
    a = x[: int(early_frac * x.size)]
    b = x[x.size - int(late_frac * x.size):]
    va = spectral_density_zero(a) / a.size
    vb = spectral_density_zero(b) / b.size
    if va + vb == 0.0:
        raise ValueError("Geweke score undefined for a zero-variance series")
    return (a.mean() - b.mean()) / math.sqrt(va + vb)


# -- DACF grids -------------------------------------------------------------------


def cell_stream(master_seed: int, tag: str, n: int, p: int, replicate: int) -> RandomStream:
    """Stream for one (model, n, p, replicate) task; independent of evaluation order."""
    return RandomStream(master_seed, zlib.crc32(tag.encode()), (n, p, replicate))


@dataclass
class DacfGrid:
    """Mean lag-1 autocorrelation over an (n, p) grid.

    ``raw[i, j, r]`` holds replicate ``r`` of cell ``(n_values[i], p_values[j])``.
    """

    n_values: list[int]
    p_values: list[int]
    raw: np.ndarray
    iters: int
    burn_in: int
    model: str
    master_seed: int
    meta: dict = field(default_factory=dict)

    @property
    def cells(self) -> np.ndarray:
        return self.raw.mean(axis=2)

    @property
    def replicates(self) -> int:
        return self.raw.shape[2]

    def __post_init__(self):
        shape = (len(self.n_values), len(self.p_values))
        if self.raw.shape[:2] != shape:
            raise ValueError(f"raw shape {self.raw.shape} does not match grid {shape}")
        if np.any(np.abs(self.raw) > 1 + 1e-12):
            raise ValueError("autocorrelations must lie in [-1, 1]")


def _run_cell(builder, n, p, replicate, iters, burn_in, master_seed):
    stream = cell_stream(master_seed, builder.tag, n, p, replicate)
    try:
        series = builder(n, p, iters, burn_in, stream)
        return lag1_autocorr(series)
    except Exception as exc:  # annotate with the failing cell
        raise RuntimeError(f"cell n={n}, p={p}, replicate={replicate}: {exc}") from exc


def run_tasks(builder, tasks, iters, burn_in, master_seed, jobs=None):
    """Evaluate ``(n, p, replicate)`` tasks, optionally in worker processes."""
    jobs = jobs or 1
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_cell(builder, n, p, r, iters, burn_in, master_seed) for n, p, r in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1, len(tasks))) as pool:
        futures = [pool.submit(_run_cell, builder, n, p, r, iters, burn_in, master_seed) for n, p, r in tasks]
        return [f.result() for f in futures]


def dacf_grid(builder, n_values, p_values, replicates: int, iters: int, master_seed: int,
              burn_in: int = 1000, jobs: int | None = None) -> DacfGrid:
    """Lag-1 autocorrelation of ``builder``'s designated series over an (n, p) grid.

    ``builder(n, p, iters, burn_in, stream)`` must generate a fresh dataset
    from ``stream``, run the chain and return the series to analyse.  It
    must be picklable when ``jobs > 1`` and expose a ``tag`` string that
    keys the stream ids.
    """
    n_values, p_values = [int(v) for v in n_values], [int(v) for v in p_values]
    if not n_values or not p_values:
        raise ValueError("grid axes must be nonempty")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    tasks = [(n, p, r) for n in n_values for p in p_values for r in range(replicates)]
    values = run_tasks(builder, tasks, iters, burn_in, master_seed, jobs)
    raw = np.asarray(values, dtype=float).reshape(len(n_values), len(p_values), replicates)
    return DacfGrid(n_values, p_values, raw, iters, burn_in, builder.tag, master_seed)


@dataclass(frozen=True)
class FitReport:
    slope: float
    intercept: float
    r_squared: float
    stderr: float
    n_points: int


def fit_autocorr_vs_ratio(points) -> FitReport:
    """Ordinary least squares of autocorrelation on the theoretical ratio."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least 3 (ratio, autocorr) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.ptp(x) == 0:
        raise ValueError("ratios have no spread; slope undefined")
    fit = stats.linregress(x, y)
    r2 = min(max(fit.rvalue**2, 0.0), 1.0) if np.ptp(y) > 0 else 1.0
    return FitReport(float(fit.slope), float(fit.intercept), float(r2), float(fit.stderr), len(x))


def dacf_trends(grid: DacfGrid) -> dict:
    """Rank trends of a DACF surface.

    ``n_trend``/``p_trend`` are Spearman correlations between the axis value
    and the cell autocorrelation pooled over all cells; the ``*_rowmax``
    variants use the per-row (per-column) maximum cell instead.
    """
    cells = grid.cells
    nn, pp = np.meshgrid(grid.n_values, grid.p_values, indexing="ij")
    out = {"max_cell": float(cells.max())}
    for name, axis_vals, other in (("n", nn, 1), ("p", pp, 0)):
        out[f"{name}_trend"] = _spearman(axis_vals.ravel(), cells.ravel())
        vals = grid.n_values if name == "n" else grid.p_values
        out[f"{name}_trend_rowmax"] = _spearman(vals, cells.max(axis=other))
    return out


def _spearman(x, y) -> float:
    if len(set(np.asarray(x).tolist())) < 2:
        return 0.0
    return float(stats.spearmanr(x, y).statistic)
