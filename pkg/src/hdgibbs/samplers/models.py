"""Model specifications and chain records."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np

from ..numerics import RegressionProblem


def _pos(name, value):
    if not (np.all(np.isfinite(value)) and np.all(np.asarray(value) > 0)):
        raise ValueError(f"{name} must be > 0")


def _data_matrix(data, min_n=1):
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[0] < min_n:
        raise ValueError(f"need at least {min_n} observations, got {data.shape[0]}")
    return data


# -- regression family ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StandardRegression:
    problem: RegressionProblem


@dataclass(frozen=True, eq=False)
class IndependentPrior:
    problem: RegressionProblem
    a: float
    s: float

    def __post_init__(self):
        if not self.a > 2:
            raise ValueError("independent prior requires a > 2")
        _pos("s", self.s)


def dimdep_extra_df(p: int, eps) -> int:
    """ceil(p * eps) evaluated on the decimal value of ``eps`` (no float round-up)."""
    return math.ceil(p * Fraction(repr(float(eps))))


@dataclass(frozen=True, eq=False)
class DimDepRegression:
    problem: RegressionProblem
    eps: float
    s: float

    def __post_init__(self):
        if not self.eps > 2:
            raise ValueError("dimensionally-dependent prior requires eps > 2")
        _pos("s", self.s)


@dataclass(frozen=True)
class Lasso:
    lam: float = 1.0

    def __post_init__(self):
        _pos("lambda", self.lam)


@dataclass(frozen=True)
class ElasticNet:
    lam1: float = 1.0
    lam2: float = 1.0

    def __post_init__(self):
        _pos("lambda1", self.lam1)
        _pos("lambda2", self.lam2)


@dataclass(frozen=True, eq=False)
class SpikeSlab:
    """Two-point prior: tau_j = kappa_j * zeta_j with probability w_j, else zeta_j."""

    zeta: object
    kappa: object = 10.0
    w: object = 0.5

    def __post_init__(self):
        _pos("zeta", self.zeta)
        _pos("kappa", self.kappa)
        w = np.asarray(self.w, dtype=float)
        if np.any((w <= 0) | (w >= 1)):
            raise ValueError("w must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class ModelSelection:
    """Scale-mixture regression prior with a tau step.

    ``sigma_prior`` is ``None`` for the improper 1/sigma^2 prior, or a
    ``(shape, rate)`` pair for an inverse-gamma prior on sigma^2.
    """

    X: np.ndarray
    Y: np.ndarray
    variant: Lasso | ElasticNet | SpikeSlab
    sigma_prior: tuple[float, float] | None = None

    def __post_init__(self):
        problem = RegressionProblem(self.X, self.Y)
        object.__setattr__(self, "X", problem.X)
        object.__setattr__(self, "Y", problem.Y)
        if self.sigma_prior is not None:
            _pos("sigma prior", self.sigma_prior)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]


# -- location / hierarchical --------------------------------------------------


@dataclass(frozen=True, eq=False)
class MultivariateMean:
    data: np.ndarray
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "data", _data_matrix(self.data, min_n=3))
        _pos("lambda", self.lam)


@dataclass(frozen=True, eq=False)
class HierKnownVar:
    data: np.ndarray
    sigma2: float = 1.0
    tau2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "data", _data_matrix(self.data))
        _pos("sigma2", self.sigma2)
        _pos("tau2", self.tau2)


@dataclass(frozen=True, eq=False)
class HierUnknownVar:
    data: np.ndarray
    a_sigma: float
    s_sigma: float
    a_tau: float
    s_tau: float

    def __post_init__(self):
        object.__setattr__(self, "data", _data_matrix(self.data, min_n=2))
        for f in ("a_sigma", "s_sigma", "a_tau", "s_tau"):
            _pos(f, getattr(self, f))


# -- DAG ------------------------------------------------------------------------


@dataclass(frozen=True)
class Dag:
    """Parent-ordered DAG on vertices 0..m-1; every parent index exceeds its child."""

    m: int
    parents: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.parents) != self.m:
            raise ValueError("need one parent set per vertex")
        for j, pa in enumerate(self.parents):
            for i in pa:
                if not (j < i < self.m):
                    raise ValueError(f"edge {i}->{j} violates parent ordering")
            if len(set(pa)) != len(pa):
                raise ValueError(f"duplicate parent for vertex {j}")

    @classmethod
    def from_edges(cls, m: int, edges) -> "Dag":
        pa = [[] for _ in range(m)]
        for i, j in edges:
            if not 0 <= j < m:
                raise ValueError(f"vertex {j} out of range")
            pa[j].append(i)
        return cls(m, tuple(tuple(sorted(p)) for p in pa))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parents)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)


@dataclass(frozen=True, eq=False)
class DagWishart:
    dag: Dag
    U: np.ndarray
    data: np.ndarray
    alpha: tuple[float, ...] | None = None

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float)
        data = _data_matrix(self.data)
        m = self.dag.m
        if U.shape != (m, m) or data.shape[1] != m:
            raise ValueError("U must be m x m and data must have m columns")
        alpha = self.alpha
        if alpha is None:
            alpha = tuple(d + 2.0 for d in self.dag.degrees)
        if len(alpha) != m:
            raise ValueError("need one alpha per vertex")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "alpha", tuple(float(a) for a in alpha))


ModelSpec = (
    StandardRegression
    | IndependentPrior
    | DimDepRegression
    | ModelSelection
    | MultivariateMean
    | HierKnownVar
    | HierUnknownVar
    | DagWishart
)


def fingerprint(obj) -> str:
    """Stable short hash of a spec (type name, scalars and array bytes)."""
    h = hashlib.sha256()

    def feed(x):
        if isinstance(x, np.ndarray):
            h.update(repr((x.dtype.str, x.shape)).encode())
            h.update(np.ascontiguousarray(x).tobytes())
        elif hasattr(x, "__dataclass_fields__"):
            h.update(type(x).__name__.encode())
            for f in fields(x):
                h.update(f.name.encode())
                feed(getattr(x, f.name))
        elif isinstance(x, (tuple, list)):
            h.update(b"(")
            for item in x:
                feed(item)
            h.update(b")")
        else:
            h.update(json.dumps(x if not isinstance(x, np.generic) else x.item()).encode())

    feed(obj)
    return h.hexdigest()[:16]


@dataclass
class ChainTrace:
    """Iterate series from one Gibbs run.

    ``series`` maps a parameter name to an array whose first axis is the
    iteration index (burn-in already discarded).
    """

    fingerprint: str
    master_seed: int
    stream_id: int
    series: dict[str, np.ndarray]
    burn_in: int
    length: int
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.series[name]

    def __post_init__(self):
        for name, values in self.series.items():
            if len(values) != self.length:
                raise ValueError(f"series {name!r} has length {len(values)} != {self.length}")
