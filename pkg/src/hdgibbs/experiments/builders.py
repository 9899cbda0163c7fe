"""Picklable per-replicate chain builders used by DACF grids and figures.

Each builder draws a fresh dataset from substream 0 of the task stream and
runs its chain on substream 1, returning the series whose lag-1
autocorrelation is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import RegressionProblem
from ..samplers import (
    ElasticNet,
    HierKnownVar,
    HierUnknownVar,
    Lasso,
    ModelSelection,
    SpikeSlab,
    StandardRegression,
    run_joint_chain,
)
from .datasets import DatasetRecipe, gen_dataset

VARIANTS = ("lasso", "elastic-net", "spike-slab")


def make_variant(name: str, n: int, lam=1.0, lam1=1.0, lam2=1.0, kappa=10.0, w=0.5):
    if name == "lasso":
        return Lasso(lam)
    if name == "elastic-net":
        return ElasticNet(lam1, lam2)
    if name == "spike-slab":
        return SpikeSlab(zeta=1.0 / n, kappa=kappa, w=w)
    raise ValueError(f"unknown variant {name!r}; expected one of {VARIANTS}")


@dataclass(frozen=True)
class SelectionBuilder:
    """Model-selection regression; ``dimdep`` switches sigma2's prior to IG(p/2, 1/2)."""

    variant: str
    dimdep: bool = False

    @property
    def tag(self) -> str:
        return f"{'fig5' if self.dimdep else 'fig2'}-{self.variant}"

    def __call__(self, n, p, iters, burn_in, stream):
        X, Y = gen_dataset(DatasetRecipe("regression", n, p), stream.substream(0))
        prior = (p / 2, 0.5) if self.dimdep else None
        spec = ModelSelection(X, Y, make_variant(self.variant, n), sigma_prior=prior)
        init = {"beta": np.ones(p), "sigma2": 1.0}
        return run_joint_chain(spec, init, iters, stream.substream(1), burn_in=burn_in)["sigma2"]


@dataclass(frozen=True)
class HierUnknownBuilder:
    """Unknown-variance hierarchical model; reports the tau2 series.

    ``prior="np"`` sets every variance hyperparameter to n*p; otherwise all
    four equal ``level``.
    """

    prior: str = "fixed"
    level: float = 1.0
    full: bool = False

    @property
    def tag(self) -> str:
        return "fig4" if self.prior == "np" else f"fig3-{self.level!r}"

    def __call__(self, n, p, iters, burn_in, stream):
        data = gen_dataset(DatasetRecipe("hier", n, p), stream.substream(0))
        h = float(n * p) if self.prior == "np" else self.level
        spec = HierUnknownVar(data, h, h, h, h)
        init = {"mu": np.ones(p), "sigma2": 1.0, "tau2": 1.0}
        return run_joint_chain(spec, init, iters, stream.substream(1), burn_in=burn_in, full=self.full)["tau2"]


@dataclass(frozen=True)
class HierKnownBuilder:
    """Known-variance hierarchical model; reports the first coordinate of mu."""

    sigma2: float = 1.0
    tau2: float = 1.0

    @property
    def tag(self) -> str:
        return f"hier-known-{self.sigma2!r}-{self.tau2!r}"

    def __call__(self, n, p, iters, burn_in, stream):
        data = gen_dataset(DatasetRecipe("hier", n, p), stream.substream(0))
        spec = HierKnownVar(data, self.sigma2, self.tau2)
        return run_joint_chain(spec, {"mu": np.ones(p)}, iters, stream.substream(1), burn_in=burn_in)["mu"][:, 0]


@dataclass(frozen=True)
class StandardBuilder:
    """Standard conjugate regression (ridge prior); reports sigma2."""

    lam: float = 1.0

    @property
    def tag(self) -> str:
        return f"standard-{self.lam!r}"

    def __call__(self, n, p, iters, burn_in, stream):
        X, Y = gen_dataset(DatasetRecipe("regression", n, p), stream.substream(0))
        spec = StandardRegression(RegressionProblem(X, Y, self.lam))
        return run_joint_chain(spec, 1.0, iters, stream.substream(1), burn_in=burn_in)["sigma2"]


BUILDERS = {
    "standard-regression": StandardBuilder,
    "hier-known": HierKnownBuilder,
    "hier-unknown": HierUnknownBuilder,
    "lasso": lambda: SelectionBuilder("lasso"),
    "elastic-net": lambda: SelectionBuilder("elastic-net"),
    "spike-slab": lambda: SelectionBuilder("spike-slab"),
}
