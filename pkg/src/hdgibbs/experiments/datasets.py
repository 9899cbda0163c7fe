"""Synthetic datasets for the simulation study."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rng import RandomStream

KINDS = ("regression", "hier")
NOISE_SCALE = 0.5
NOISE_DF = 4


@dataclass(frozen=True)
class DatasetRecipe:
    """``regression``: X ~ N(0,1) entries, Y = X beta* + noise.  ``hier``: n x p noise matrix.

    Noise entries are t_4 variates times 1/2.  beta* has its first ceil(p/2)
    entries drawn as +-1 with equal probability and the rest zero.
    """

    kind: str
    n: int
    p: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dataset kind {self.kind!r}")
        if self.n < 1 or self.p < 1:
            raise ValueError("dimensions must be positive")


def gen_dataset(recipe: DatasetRecipe, stream: RandomStream | None = None):
    """Return ``(X, Y)`` for regression recipes and the data matrix for ``hier``."""
    if stream is None:
        stream = RandomStream(recipe.seed, 0)
    g = stream.gen
    n, p = recipe.n, recipe.p
    if recipe.kind == "hier":
        return NOISE_SCALE * g.standard_t(NOISE_DF, (n, p))
    X = g.standard_normal((n, p))
    beta = np.zeros(p)
    k = math.ceil(p / 2)
    beta[:k] = np.where(g.random(k) < 0.5, -1.0, 1.0)
    Y = X @ beta + NOISE_SCALE * g.standard_t(NOISE_DF, n)
    return X, Y


def true_coefficients(recipe: DatasetRecipe, stream: RandomStream | None = None) -> np.ndarray:
    """Replays the draw sequence of :func:`gen_dataset` and returns beta*."""
    if recipe.kind != "regression":
        raise ValueError("only regression recipes have coefficients")
    if stream is None:
        stream = RandomStream(recipe.seed, 0)
    g = stream.gen
    g.standard_normal((recipe.n, recipe.p))
    beta = np.zeros(recipe.p)
    k = math.ceil(recipe.p / 2)
    beta[:k] = np.where(g.random(k) < 0.5, -1.0, 1.0)
    return beta
