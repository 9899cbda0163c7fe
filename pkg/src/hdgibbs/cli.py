"""Command-line interface: ``hdgibbs <subcommand> ...``.

Exit codes: 0 success, 1 usage or precondition error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import theory
from .diagnostics import dacf_grid, dacf_trends, lag1_autocorr
from .experiments import builders as _builders
from .experiments.bundle import ResultBundle, Table, creation_stamp, write_bundle
from .experiments.datasets import DatasetRecipe, gen_dataset
from .experiments.figures import BUDGETS, FIGURES, reproduce_figure
from .numerics import RegressionProblem
from .rng import RandomStream
from . import samplers as S

OUT_ENV = "HDGIBBS_OUT"
DEFAULT_OUT = "hdgibbs-out"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _emit(args, payload: dict, text_lines: list[str]):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        print("\n".join(text_lines))


# -- rate ---------------------------------------------------------------------------


def cmd_rate(args):
    params = {
        "standard-regression": {"n": args.n, "p": args.p},
        "multivariate-mean": {"n": args.n, "p": args.p},
        "dimdep-regression": {"n": args.n, "p": args.p, "eps": args.eps},
        "dag": {"n": args.n, "delta_max": args.delta_max},
        "hier-known": {"sigma2": args.sigma2, "tau2": args.tau2},
    }[args.model]
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise UsageError(f"rate --model {args.model} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))
    report = theory.theoretical_rate(args.model, **params)
    payload = {
        "model": report.model,
        "params": report.params,
        "rate": report.rate,
        "exact": str(report.exact),
        "regime": report.regime,
    }
    _emit(args, payload, [f"{report.rate:.6f}", report.regime])


# -- bounds -------------------------------------------------------------------------


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"bounds --kind {args.kind} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _design(args, binary: bool):
    if args.data:
        arr = np.loadtxt(args.data, delimiter=",", ndmin=2)
        return arr[:, :-1], arr[:, -1]
    _need(args, "n", "p")
    X, Y = gen_dataset(DatasetRecipe("regression", args.n, args.p), RandomStream(args.seed, 0))
    return X, (Y > 0).astype(float) if binary else Y


def cmd_bounds(args):
    kind = args.kind
    if kind == "wasserstein":
        if args.model == "hier-known":
            _need(args, "mu0", "sigma2", "tau2", "n")
            r = theory.wasserstein_rate_bounds("hier-known", mu0=args.mu0, sigma2=args.sigma2, tau2=args.tau2, n=args.n)
        else:
            _need(args, "sigma2_0", "C", "n", "p")
            r = theory.wasserstein_rate_bounds(args.model, sigma2_0=args.sigma2_0, C=args.C, n=args.n, p=args.p)
        payload = r._asdict()
    elif kind == "iterations":
        _need(args, "n", "p", "tol", "M")
        payload = {"K": theory.iterations_to_tolerance(args.n, args.p, args.tol, args.M)}
    elif kind == "rosenthal":
        _need(args, "n", "a", "s", "y_sq_norm", "resid0_sq", "k")
        r = theory.rosenthal_tv_bound(args.n, args.a, args.s, args.y_sq_norm, args.resid0_sq, args.k,
                                      alpha=args.alpha, d_R=args.d_R)
        payload = {"bound": r.bound, "log_bound": r.log_bound, "log_rate": r.log_rate, **vars(r.constants)}
    elif kind == "choi-hobert":
        _need(args, "lam")
        X, Y = _design(args, binary=True)
        r = theory.choi_hobert_delta(X, Y, args.lam)
        payload = {**vars(r), "upper_bound_check": r.upper_bound_check}
    elif kind == "khare-hobert":
        _need(args, "lam")
        X, Y = _design(args, binary=False)
        r = theory.khare_hobert_epsilon(X.shape[0], X.shape[1], args.lam, X, Y, d=args.d)
        payload = {**vars(r), "bound_check": r.bound_check}
    elif kind == "hier-tv":
        _need(args, "mu0", "sigma2", "tau2", "n", "k")
        lo, hi = theory.hier_tv_envelope(args.mu0, args.sigma2, args.tau2, args.n, args.k)
        payload = {"lower": lo, "upper": hi}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown bound {kind!r}")
    payload = {"kind": kind, **payload}
    _emit(args, payload, [f"{k}: {v!r}" for k, v in payload.items()])


# -- sample ---------------------------------------------------------------------------

SAMPLE_MODELS = (
    "standard-regression", "dimdep-regression", "independent", "lasso", "elastic-net", "spike-slab",
    "multivariate-mean", "hier-known", "hier-unknown", "dag",
)


def _chain_layout(degrees, n, stream):
    """Parent-ordered DAG where vertex j has parents j+1..j+delta_j, with synthetic data."""
    m = max((j + d + 1 for j, d in enumerate(degrees)), default=1)
    parents = [tuple(range(j + 1, j + 1 + d)) for j, d in enumerate(degrees)]
    parents += [()] * (m - len(parents))
    dag = S.Dag(m, tuple(parents))
    return S.DagWishart(dag, np.eye(m), stream.normal((n, m)))


def _build_spec(args, data_stream):
    model, n, p = args.model, args.n, args.p
    if model in ("standard-regression", "dimdep-regression", "independent", "lasso", "elastic-net", "spike-slab"):
        X, Y = gen_dataset(DatasetRecipe("regression", n, p), data_stream)
        problem = RegressionProblem(X, Y, args.lam)
        if model == "standard-regression":
            return S.StandardRegression(problem), None
        if model == "dimdep-regression":
            return S.DimDepRegression(problem, args.eps, args.s), None
        if model == "independent":
            return S.IndependentPrior(problem, args.a, args.s), None
        variant = _builders.make_variant(model, n, lam=args.lam, lam1=args.lambda1, lam2=args.lambda2)
        return S.ModelSelection(X, Y, variant), {"beta": np.ones(p), "sigma2": 1.0}
    if model == "multivariate-mean":
        return S.MultivariateMean(gen_dataset(DatasetRecipe("hier", n, p), data_stream), args.lam), None
    if model == "hier-known":
        data = gen_dataset(DatasetRecipe("hier", n, p), data_stream)
        return S.HierKnownVar(data, args.sigma2, args.tau2), {"mu": np.ones(p)}
    if model == "hier-unknown":
        data = gen_dataset(DatasetRecipe("hier", n, p), data_stream)
        spec = S.HierUnknownVar(data, args.a_sigma, args.s_sigma, args.a_tau, args.s_tau)
        return spec, {"mu": np.ones(p), "sigma2": 1.0, "tau2": 1.0}
    return _chain_layout(args.degrees, n, data_stream), None


def _series_columns(series: dict) -> tuple[list[str], list[np.ndarray]]:
    names, cols = [], []
    for name, arr in series.items():
        arr = np.asarray(arr)
        if arr.ndim == 1:
            names.append(name)
            cols.append(arr)
        else:
            flat = arr.reshape(arr.shape[0], -1)
            for i in range(flat.shape[1]):
                names.append(f"{name}[{i}]")
                cols.append(flat[:, i])
    return names, cols


def cmd_sample(args):
    for name in ("n", "p"):
        if name == "p" and args.model == "dag":
            continue
        if getattr(args, name) is None:
            raise UsageError(f"sample needs --{name}")
    if args.model == "dag" and not args.degrees:
        raise UsageError("sample --model dag needs --degrees")
    root = RandomStream(args.seed, 0)
    spec, init = _build_spec(args, root.substream(0))
    chain_stream = root.substream(1)
    if args.model == "dag":
        traces = S.run_dag_chains(spec, 1.0, args.iters, chain_stream, burn_in=args.burn_in)
        series = {f"D{j}": t["D"] for j, t in traces.items()}
        fp = next(iter(traces.values())).fingerprint
    else:
        coords = list(range(min(args.track, args.p))) if args.track else []
        opts = {"coords": coords} if isinstance(spec, (S.StandardRegression, S.DimDepRegression,
                                                       S.IndependentPrior, S.ModelSelection)) else {}
        trace = S.run_joint_chain(spec, init, args.iters, chain_stream, burn_in=args.burn_in, **opts)
        series, fp = trace.series, trace.fingerprint
    names, cols = _series_columns(series)
    rows = [[k, *(float(c[k]) for c in cols)] for k in range(args.iters)]
    summary = [[name, float(np.mean(c)), lag1_autocorr(c) if np.ptp(c) > 0 else 0.0] for name, c in zip(names, cols)]
    config = {
        "defaults": {"burn_in": 1000, "iters": 10_000, "seed": 0},
        "overrides": {k: v for k, v in vars(args).items() if k not in ("func", "format", "out", "stamp")},
    }
    bundle = ResultBundle(
        experiment_id=f"sample-{args.model}",
        config={**config, "fingerprint": fp},
        tables={"trace": Table(["iter", *names], rows), "summary": Table(["series", "mean", "lag1_autocorr"], summary)},
        created=creation_stamp(args.stamp),
    )
    out = _out_dir(args)
    write_bundle(bundle, out)
    payload = {"out": str(out), "iterations": args.iters, "series": names}
    _emit(args, payload, [f"wrote {len(rows)} iterations of {len(names)} series to {out}"])


# -- dacf -----------------------------------------------------------------------------

DACF_MODELS = ("standard-regression", "hier-known", "hier-unknown", "lasso", "elastic-net", "spike-slab")


def _dacf_builder(args):
    m = args.model
    if m == "standard-regression":
        return _builders.StandardBuilder(args.lam)
    if m == "hier-known":
        return _builders.HierKnownBuilder(args.sigma2, args.tau2)
    if m == "hier-unknown":
        return _builders.HierUnknownBuilder("np" if args.prior == "np" else "fixed", args.prior_level)
    return _builders.SelectionBuilder(m, dimdep=args.dimdep)


def cmd_dacf(args):
    builder = _dacf_builder(args)
    grid = dacf_grid(builder, args.n_values, args.p_values, args.runs, args.iters, args.seed,
                     burn_in=args.burn_in, jobs=args.jobs)
    cells = grid.cells
    raw_rows = [[n, p, r, float(grid.raw[i, j, r])]
                for i, n in enumerate(grid.n_values) for j, p in enumerate(grid.p_values) for r in range(grid.replicates)]
    surface = Table(["n"] + [f"p={p}" for p in grid.p_values],
                    [[n, *map(float, cells[i])] for i, n in enumerate(grid.n_values)])
    trends = dacf_trends(grid)
    bundle = ResultBundle(
        experiment_id=f"dacf-{args.model}",
        config={"defaults": {"runs": 10, "iters": 10_000, "burn_in": 1000},
                "overrides": {k: v for k, v in vars(args).items() if k not in ("func", "format", "out", "stamp", "jobs")},
                "builder": builder.tag},
        tables={"autocorr": Table(["n", "p", "replicate", "autocorr"], raw_rows), "dacf": surface,
                "trend": Table(list(trends), [list(trends.values())])},
        created=creation_stamp(args.stamp),
    )
    out = _out_dir(args)
    write_bundle(bundle, out)
    payload = {"out": str(out), "cells": cells.tolist(), "n_values": grid.n_values, "p_values": grid.p_values, **trends}
    lines = ["n\\p " + " ".join(f"{p:>8d}" for p in grid.p_values)]
    lines += [f"{n:<4d}" + " ".join(f"{v:8.4f}" for v in cells[i]) for i, n in enumerate(grid.n_values)]
    _emit(args, payload, lines)


# -- figure ---------------------------------------------------------------------------


def cmd_figure(args):
    overrides = {"preset": args.preset} if args.preset else {}
    for key in ("runs", "iters", "burn_in", "seed"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    out = _out_dir(args)
    bundle = reproduce_figure(args.id, overrides, out, jobs=args.jobs, plot=args.plot, wall_clock=args.stamp)
    summary = bundle.tables.get("fit") or bundle.tables["trend"]
    payload = {"out": str(out), "figure": args.id, summary.columns[0]: summary.rows, "figures": bundle.figures}
    lines = [f"wrote {args.id} tables to {out}", ",".join(summary.columns)]
    lines += [",".join(f"{v:.4f}" if isinstance(v, float) else str(v) for v in row) for row in summary.rows]
    _emit(args, payload, lines)


# -- check ----------------------------------------------------------------------------


def _checks(seed: int, scale: float):
    """Yields (name, passed, detail); ``scale`` multiplies every Monte Carlo budget."""
    iters = max(int(10_000 * scale), 500)
    for n, p in ((10, 100), (30, 100), (100, 10)):
        t = S.run_reduced_chain("sigma", n, p, 1.0, "stationary", iters, RandomStream(seed, 1), replicates=10)
        x = t["sigma"]
        est = float(np.mean([lag1_autocorr(x[:, r]) for r in range(x.shape[1])]))
        target = p / (n + p - 2)
        yield f"sigma-chain autocorrelation n={n} p={p}", abs(est - target) <= 0.02 / math.sqrt(scale), f"{est:.4f} vs {target:.4f}"
    draws = max(int(100_000 * scale), 5_000)
    q = S.run_reduced_chain("q", 20, 10, 1.0, 5, 1, RandomStream(seed, 2), replicates=draws)["q"][0]
    se = q.std(ddof=1) / math.sqrt(q.size)
    yield "Q-chain conditional mean", abs(q.mean() - 3.5714285714) <= 3 * se, f"{q.mean():.4f} ± {se:.4f}"
    ok = all(theory.dimdep_bound_holds(range(5, 201), range(1, 501), e).all() for e in (2.0, 2.5, 3.0, 5.0))
    yield "dimension-dependent rate below 1/(1+eps)", ok, "n in [5,200], p in [1,500]"
    consts = {theory.rosenthal_tv_bound(20, 4, 2, 10, 5, 50) for _ in (10, 100, 1000)}
    yield "independent-prior bound free of p", len(consts) == 1, f"{len(consts)} distinct"


def cmd_check(args):
    budget = args.budget
    start = time.monotonic()
    scale = min(1.0, max(budget / 30.0, 0.05))
    results = []
    for name, passed, detail in _checks(args.seed, scale):
        results.append({"check": name, "passed": bool(passed), "detail": detail})
        if time.monotonic() - start > budget:
            break
    payload = {"results": results, "all_passed": all(r["passed"] for r in results)}
    _emit(args, payload, [f"{'PASS' if r['passed'] else 'FAIL'}  {r['check']}  ({r['detail']})" for r in results])
    return 0 if payload["all_passed"] else 2


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hdgibbs", description="Gibbs sampler convergence rates, bounds and simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=True, out=False):
        p.add_argument("--format", choices=("text", "json"), default="text")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if out:
            p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
            p.add_argument("--stamp", action="store_true", help="record the wall-clock time in the manifest")

    p = sub.add_parser("rate", help="theoretical convergence rate")
    p.add_argument("--model", required=True, choices=theory.RATE_MODELS)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--delta-max", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--tau2", type=float)
    common(p, seed=False)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("bounds", help="bound constants")
    p.add_argument("--kind", required=True,
                   choices=("wasserstein", "iterations", "rosenthal", "choi-hobert", "khare-hobert", "hier-tv"))
    p.add_argument("--model", default="standard-regression",
                   choices=("standard-regression", "multivariate-mean", "hier-known"))
    for flag, typ in (("--n", int), ("--p", int), ("--k", int), ("--sigma2-0", float), ("--C", float),
                      ("--sigma2", float), ("--tau2", float), ("--tol", float), ("--M", float), ("--a", float),
                      ("--s", float), ("--y-sq-norm", float), ("--resid0-sq", float), ("--alpha", float),
                      ("--d-R", float), ("--d", float)):
        p.add_argument(flag, type=typ)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mu0", type=_floats)
    p.add_argument("--data", help="CSV with covariate columns followed by the response column")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sample", help="run one chain and write its trace")
    p.add_argument("--model", required=True, choices=SAMPLE_MODELS)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--lambda1", type=float, default=1.0)
    p.add_argument("--lambda2", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=3.0)
    p.add_argument("--a", type=float, default=4.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--tau2", type=float, default=1.0)
    p.add_argument("--a-sigma", type=float, default=1.0)
    p.add_argument("--s-sigma", type=float, default=1.0)
    p.add_argument("--a-tau", type=float, default=1.0)
    p.add_argument("--s-tau", type=float, default=1.0)
    p.add_argument("--degrees", type=_ints, help="per-vertex parent counts for --model dag")
    p.add_argument("--track", type=int, default=0, help="number of leading beta coordinates to record")
    common(p, out=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("dacf", help="lag-1 autocorrelation over an (n, p) grid")
    p.add_argument("--model", required=True, choices=DACF_MODELS)
    p.add_argument("--n-values", type=_ints, required=True)
    p.add_argument("--p-values", type=_ints, required=True)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--tau2", type=float, default=1.0)
    p.add_argument("--prior", choices=("fixed", "np"), default="fixed")
    p.add_argument("--prior-level", type=float, default=1.0)
    p.add_argument("--dimdep", action="store_true", help="IG(p/2, 1/2) prior on sigma2 for selection models")
    common(p, out=True)
    p.set_defaults(func=cmd_dacf)

    p = sub.add_parser("figure", help="reproduce a simulation figure")
    p.add_argument("--id", required=True, choices=FIGURES)
    p.add_argument("--preset", choices=tuple(BUDGETS))
    p.add_argument("--runs", type=int)
    p.add_argument("--iters", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--plot", action="store_true", help="also render PNG plots next to the tables")
    common(p, seed=False, out=True)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("check", help="run the invariant suite at a desk budget")
    p.add_argument("--budget", type=float, default=30.0, help="seconds")
    common(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args) or 0
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        print(f"hdgibbs: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"hdgibbs: runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
