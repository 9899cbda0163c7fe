"""Gibbs kernels for every supported model, returning :class:`ChainTrace` records."""

from __future__ import annotations

from ..rng import RandomStream
from . import dag as _dag
from . import hierarchical as _hier
from . import reduced as _reduced
from . import regression as _reg
from .hierarchical import exact_hier_marginal, mean_model_constants
from .models import (
    ChainTrace,
    Dag,
    DagWishart,
    DimDepRegression,
    ElasticNet,
    HierKnownVar,
    HierUnknownVar,
    IndependentPrior,
    Lasso,
    ModelSelection,
    MultivariateMean,
    SpikeSlab,
    StandardRegression,
    fingerprint,
)

__all__ = [
    "ChainTrace",
    "Dag",
    "DagWishart",
    "DimDepRegression",
    "ElasticNet",
    "HierKnownVar",
    "HierUnknownVar",
    "IndependentPrior",
    "Lasso",
    "ModelSelection",
    "MultivariateMean",
    "SpikeSlab",
    "StandardRegression",
    "exact_hier_marginal",
    "fingerprint",
    "mean_model_constants",
    "run_dag_chains",
    "run_joint_chain",
    "run_reduced_chain",
]

_KERNELS = {
    StandardRegression: _reg.run_standard,
    DimDepRegression: _reg.run_dimdep,
    IndependentPrior: _reg.run_independent,
    ModelSelection: _reg.run_model_selection,
    MultivariateMean: _hier.run_mean,
    HierKnownVar: _hier.run_hier_known,
    HierUnknownVar: _hier.run_hier_unknown,
}


def _trace(fp, stream, data, burn_in, iters, meta):
    return ChainTrace(
        fingerprint=fp,
        master_seed=stream.master_seed,
        stream_id=stream.stream_id,
        series=data,
        burn_in=burn_in,
        length=iters,
        meta=meta,
    )


def run_joint_chain(spec, init, iters: int, stream: RandomStream, burn_in: int = 0, **options) -> ChainTrace:
    """Run the Gibbs sampler for ``spec``.

    ``init`` may be ``None`` (model defaults), ``"stationary"`` where the
    model has a closed-form posterior marginal, a scalar initial sigma2, or
    a dict of named initial values.  Extra keyword options are forwarded to
    the kernel (``coords`` for tracked beta coordinates, ``replicates`` or
    ``full`` for the hierarchical kernels).
    """
    try:
        kernel = _KERNELS[type(spec)]
    except KeyError:
        if isinstance(spec, DagWishart):
            raise TypeError("use run_dag_chains for DAG-Wishart models") from None
        raise TypeError(f"unsupported model spec {type(spec).__name__}") from None
    data, meta = kernel(spec, init, iters, stream, burn_in=burn_in, **options)
    meta["model"] = type(spec).__name__
    return _trace(fingerprint(spec), stream, data, burn_in, iters, meta)


def run_reduced_chain(kind: str, n: int, p: int, C: float, init, iters: int, stream: RandomStream,
                      burn_in: int = 0, replicates: int = 1) -> ChainTrace:
    """Run one of the reduced chains ``"sigma"``, ``"eta"`` or ``"q"``."""
    data, meta = _reduced.run_reduced_chain(kind, n, p, C, init, iters, stream, burn_in, replicates)
    meta["model"] = f"reduced:{kind}"
    return _trace(fingerprint((kind, n, p, float(C))), stream, data, burn_in, iters, meta)


def run_dag_chains(spec: DagWishart, init, iters: int, stream: RandomStream, burn_in: int = 0) -> dict[int, ChainTrace]:
    """One chain per vertex; vertex ``j`` uses ``stream.substream(j)``.

    ``init`` is a scalar D_jj;0 shared by all vertices, a per-vertex
    sequence, or ``"stationary"``.
    """
    m = spec.dag.m
    if isinstance(init, str) or init is None or isinstance(init, (int, float)):
        inits = [1.0 if init is None else init] * m
    else:
        inits = list(init)
        if len(inits) != m:
            raise ValueError("need one initial value per vertex")
    fp = fingerprint(spec)
    out = {}
    for j in range(m):
        sub = stream.substream(j)
        data, meta = _dag.run_vertex(spec, j, inits[j], iters, sub, burn_in)
        meta["model"] = "DagWishart"
        out[j] = _trace(fp, sub, data, burn_in, iters, meta)
    return out
