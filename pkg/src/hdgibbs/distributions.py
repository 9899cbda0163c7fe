"""Scalar distributions required by the Gibbs kernels.

Every law is a small frozen dataclass that validates its parameters on
construction.  Sampling goes through a :class:`~hdgibbs.rng.RandomStream`;
CDFs and quantiles of the continuous laws are delegated to ``scipy.stats``.

Parameterizations follow the kernels rather than scipy:

* ``Normal(mean, variance)``
* ``InverseGamma(shape, rate)``: density proportional to x**(-shape-1) exp(-rate/x)
* ``Gamma(shape, rate)``
* ``BetaPrime(a, b)``: ratio of independent Gamma(a) and Gamma(b)
* ``InverseGaussian(mean, shape)``
* ``NegativeBinomial(size, prob)``: pmf proportional to (1-prob)**size prob**k
* ``BetaNegativeBinomial(a, r, b)``: NegativeBinomial(a, q) with q ~ Beta(r, b)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy import stats

from .rng import RandomStream


def _positive(**kw):
    for name, value in kw.items():
        if not (np.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be finite and > 0, got {value!r}")


class ScalarDist:
    """Base class; subclasses are frozen dataclasses."""

    continuous: ClassVar[bool] = True

    def sample(self, stream: RandomStream, size=None):
        raise NotImplementedError

    def _scipy(self):
        raise NotImplementedError

    def cdf(self, x):
        return self._scipy().cdf(x)

    def quantile(self, u):
        if not self.continuous:
            raise ValueError(f"{type(self).__name__} is discrete; quantile not supported")
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)):
            raise ValueError("u must lie in the open interval (0, 1)")
        q = self._scipy().ppf(u)
        return float(q) if q.ndim == 0 else q

    def mean(self) -> float:
        return float(self._scipy().mean())

    def var(self) -> float:
        return float(self._scipy().var())

    @property
    def has_finite_mean(self) -> bool:
        return bool(np.isfinite(self.mean()))


@dataclass(frozen=True)
class Normal(ScalarDist):
    mean_: float
    variance: float

    def __post_init__(self):
        if not np.isfinite(self.mean_):
            raise ValueError("mean must be finite")
        _positive(variance=self.variance)

    def sample(self, stream, size=None):
        return self.mean_ + math.sqrt(self.variance) * stream.normal(size)

    def _scipy(self):
        return stats.norm(loc=self.mean_, scale=math.sqrt(self.variance))


@dataclass(frozen=True)
class ChiSquare(ScalarDist):
    df: float

    def __post_init__(self):
        _positive(df=self.df)

    def sample(self, stream, size=None):
        return stream.chisquare(self.df, size)

    def _scipy(self):
        return stats.chi2(self.df)


@dataclass(frozen=True)
class Gamma(ScalarDist):
    shape: float
    rate: float

    def __post_init__(self):
        _positive(shape=self.shape, rate=self.rate)

    def sample(self, stream, size=None):
        return stream.gamma(self.shape, size) / self.rate

    def _scipy(self):
        return stats.gamma(self.shape, scale=1.0 / self.rate)


@dataclass(frozen=True)
class InverseGamma(ScalarDist):
    shape: float
    rate: float

    def __post_init__(self):
        _positive(shape=self.shape, rate=self.rate)

    def sample(self, stream, size=None):
        return self.rate / stream.gamma(self.shape, size)

    def _scipy(self):
        return stats.invgamma(self.shape, scale=self.rate)

    def mean(self):
        return self.rate / (self.shape - 1) if self.shape > 1 else math.inf

    def var(self):
        if self.shape <= 2:
            return math.inf
        return self.rate**2 / ((self.shape - 1) ** 2 * (self.shape - 2))


@dataclass(frozen=True)
class Beta(ScalarDist):
    a: float
    b: float

    def __post_init__(self):
        _positive(a=self.a, b=self.b)

    def sample(self, stream, size=None):
        return stream.gen.beta(self.a, self.b, size)

    def _scipy(self):
        return stats.beta(self.a, self.b)


@dataclass(frozen=True)
class BetaPrime(ScalarDist):
    a: float
    b: float

    def __post_init__(self):
        _positive(a=self.a, b=self.b)

    def sample(self, stream, size=None):
        return stream.gamma(self.a, size) / stream.gamma(self.b, size)

    def _scipy(self):
        return stats.betaprime(self.a, self.b)

    def mean(self):
        return self.a / (self.b - 1) if self.b > 1 else math.inf


@dataclass(frozen=True)
class InverseGaussian(ScalarDist):
    mean_: float
    shape: float

    def __post_init__(self):
        _positive(mean=self.mean_, shape=self.shape)

    def sample(self, stream, size=None):
        z = stream.normal(size)
        u = stream.uniform(size)
        return inverse_gaussian_transform(self.mean_, self.shape, z, u)

    def _scipy(self):
        return stats.invgauss(self.mean_ / self.shape, scale=self.shape)

    def mean(self):
        return self.mean_

    def var(self):
        return self.mean_**3 / self.shape


@dataclass(frozen=True)
class StudentT(ScalarDist):
    df: float

    def __post_init__(self):
        _positive(df=self.df)

    def sample(self, stream, size=None):
        return stream.gen.standard_t(self.df, size)

    def _scipy(self):
        return stats.t(self.df)

    def mean(self):
        return 0.0 if self.df > 1 else math.nan


@dataclass(frozen=True)
class NegativeBinomial(ScalarDist):
    size: float
    prob: float

    continuous: ClassVar[bool] = False

    def __post_init__(self):
        _positive(size=self.size)
        if not 0 < self.prob < 1:
            raise ValueError("prob must lie in (0, 1)")

    def sample(self, stream, size=None):
        # numpy counts failures before `size` successes with success prob p
        return stream.gen.negative_binomial(self.size, 1.0 - self.prob, size)

    def _scipy(self):
        return stats.nbinom(self.size, 1.0 - self.prob)


@dataclass(frozen=True)
class BetaNegativeBinomial(ScalarDist):
    a: float
    r: float
    b: float

    continuous: ClassVar[bool] = False

    def __post_init__(self):
        _positive(a=self.a, r=self.r, b=self.b)

    def sample(self, stream, size=None):
        q = stream.gen.beta(self.r, self.b, size)
        return stream.gen.negative_binomial(self.a, 1.0 - q, size)

    def _scipy(self):
        return stats.betanbinom(self.a, self.b, self.r)

    def mean(self):
        return self.a * self.r / (self.b - 1) if self.b > 1 else math.inf


def inverse_gaussian_transform(mu, lam, z, u):
    """Michael-Schucany-Haas transform of normal ``z`` and uniform ``u``.

    Uses the rationalized root so that ``mu >> lam`` does not cancel.
    Broadcasts over array arguments.
    """
    mu = np.asarray(mu, dtype=float)
    t = mu * np.square(z) / (2.0 * lam)
    x = mu / (1.0 + t + np.sqrt(t * (t + 2.0)))
    return np.where(u * (mu + x) <= mu, x, mu * mu / x)


def draw(dist: ScalarDist, stream: RandomStream, size=None):
    return dist.sample(stream, size)


def draw_std_normal_vector(dim: int, stream: RandomStream) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return stream.normal(dim)


def quantile(dist: ScalarDist, u):
    return dist.quantile(u)
