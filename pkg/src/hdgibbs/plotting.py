"""Optional PNG rendering of figure bundles (matplotlib, headless).

The CSV tables remain the primary output; these plots are a convenience
for eyeballing a run and are only produced on request.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

# PNG metadata carries no timestamp when Software is cleared, so output is reproducible
_SAVE = {"dpi": 120, "metadata": {"Software": None}}

_RATIO_LABEL = {"fig2": "p/(n+p-2)", "fig5": "p/(n+2p-2)"}


def _new(ncols: int, width=4.2, height=3.6) -> Figure:
    fig = Figure(figsize=(width * ncols, height), layout="constrained")
    FigureCanvasAgg(fig)
    return fig


def _regression(bundle, out: Path) -> list[str]:
    cells = bundle.tables["cells"]
    variants = list(dict.fromkeys(cells.column("variant")))
    fig = _new(len(variants))
    axes = fig.subplots(1, len(variants), squeeze=False)[0]
    rows = cells.rows
    i_var, i_n, i_x, i_y = (cells.columns.index(c) for c in ("variant", "n", "ratio", "mean_autocorr"))
    for ax, variant in zip(axes, variants):
        sel = [r for r in rows if r[i_var] == variant]
        for n in sorted({r[i_n] for r in sel}):
            pts = sorted((r[i_x], r[i_y]) for r in sel if r[i_n] == n)
            ax.plot(*zip(*pts), "o", label=f"n={n}")
        ax.plot([0, 1], [0, 1], color="0.5", lw=0.8, ls="--")
        ax.set(xlim=(0, 1), ylim=(0, 1), title=variant, xlabel=_RATIO_LABEL[bundle.experiment_id],
               ylabel="lag-1 autocorrelation")
        ax.legend(fontsize="small", frameon=False)
    name = f"{bundle.experiment_id}_autocorr.png"
    fig.savefig(out / name, **_SAVE)
    return [name]


def _hier(bundle, out: Path) -> list[str]:
    names = []
    for key, table in sorted(bundle.tables.items()):
        if not key.startswith("dacf_"):
            continue
        grid = key.removeprefix("dacf_")
        n_vals = np.asarray(table.column("n"), dtype=float)
        p_vals = [int(c.removeprefix("p=")) for c in table.columns[1:]]
        z = np.asarray([row[1:] for row in table.rows], dtype=float)
        fig = _new(2)
        left, right = fig.subplots(1, 2)
        for j, p in enumerate(p_vals):
            left.plot(n_vals, z[:, j], marker="o", label=f"p={p}")
        left.set(xlabel="n", ylabel="lag-1 autocorrelation of tau2", ylim=(0, 1))
        left.legend(fontsize="small", frameon=False)
        cs = right.contourf(p_vals, n_vals, z, levels=np.linspace(0, 1, 11), cmap="viridis")
        fig.colorbar(cs, ax=right)
        right.set(xlabel="p", ylabel="n", title="DACF")
        name = f"{bundle.experiment_id}_{grid}.png"
        fig.savefig(out / name, **_SAVE)
        names.append(name)
    return names


def render_bundle(bundle, out_dir) -> list[str]:
    """Write PNGs for ``bundle`` into ``out_dir`` and return their file names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if bundle.experiment_id in _RATIO_LABEL:
        return _regression(bundle, out)
    return _hier(bundle, out)
