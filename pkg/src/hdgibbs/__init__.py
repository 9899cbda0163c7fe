"""Gibbs samplers for high-dimensional Bayesian models, their convergence rates and bounds."""

from .rng import RandomStream, make_stream

__version__ = "0.1.0"
__all__ = ["RandomStream", "make_stream", "__version__"]
