import json
import re

import numpy as np
import pytest

from hdgibbs.experiments import (
    FIGURES,
    BundleError,
    DatasetRecipe,
    HierKnownBuilder,
    HierUnknownBuilder,
    ResultBundle,
    SelectionBuilder,
    Table,
    figure_config,
    gen_dataset,
    ratio,
    read_bundle,
    reproduce_figure,
    true_coefficients,
    write_bundle,
)
from hdgibbs.rng import RandomStream

TINY_REG = {"preset": "reduced", "runs": 2, "iters": 200, "burn_in": 20, "n_values": [10, 30], "p_values": [10, 30]}
TINY_HIER = {
    "preset": "reduced", "runs": 1, "iters": 200, "burn_in": 20,
    "grids": {"left": {"n_values": [10, 30], "p_values": [3, 10]}},
}


def test_regression_dataset_shape_and_signal():
    X, Y = gen_dataset(DatasetRecipe("regression", 2000, 7, seed=3))
    beta = true_coefficients(DatasetRecipe("regression", 2000, 7, seed=3))
    assert X.shape == (2000, 7) and Y.shape == (2000,)
    assert np.all(np.abs(beta[:4]) == 1) and np.all(beta[4:] == 0)
    resid = Y - X @ beta
    # 0.5 * t_4 noise has variance 0.25 * 2
    assert abs(resid.var() - 0.5) < 0.1
    assert abs(X.std() - 1) < 0.05


def test_datasets_are_reproducible_from_the_stream():
    a = gen_dataset(DatasetRecipe("hier", 5, 3), RandomStream(1, 2))
    b = gen_dataset(DatasetRecipe("hier", 5, 3), RandomStream(1, 2))
    assert np.array_equal(a, b) and a.shape == (5, 3)
    with pytest.raises(ValueError):
        DatasetRecipe("other", 5, 3)
    with pytest.raises(ValueError):
        true_coefficients(DatasetRecipe("hier", 5, 3))


def test_builders_return_series_of_the_requested_length():
    s = RandomStream(0, 0)
    assert SelectionBuilder("lasso", dimdep=True)(10, 30, 50, 5, s).shape == (50,)
    assert HierUnknownBuilder("np")(10, 3, 50, 5, s).shape == (50,)
    assert HierKnownBuilder()(10, 3, 50, 5, s).shape == (50,)
    assert SelectionBuilder("lasso").tag != SelectionBuilder("lasso", True).tag


def test_figure_config_defaults_and_overrides():
    d, e = figure_config("fig2")
    assert d["runs"] == 10 and d["iters"] == 10_000 and d["burn_in"] == 1000
    assert d["n_values"] == [10, 30, 100] and d["variants"] == ["lasso", "elastic-net", "spike-slab"]
    d, e = figure_config("fig3", {"preset": "reduced", "seed": 4})
    assert e["seed"] == 4 and e["iters"] == 2000 and "left" in e["grids"] and "surface" in e["grids"]
    with pytest.raises(ValueError):
        figure_config("fig2", {"bogus": 1})
    with pytest.raises(ValueError):
        figure_config("fig9")
    with pytest.raises(ValueError):
        figure_config("fig2", {"runs": 0})
    assert set(FIGURES) == {"fig2", "fig3", "fig4", "fig5"}


def test_ratios():
    assert ratio("fig2", 10, 10) == pytest.approx(10 / 18)
    assert ratio("fig5", 10, 10) == pytest.approx(10 / 28)


def test_regression_figure_tables(tmp_path):
    b = reproduce_figure("fig2", TINY_REG, out_dir=tmp_path)
    assert b.experiment_id == "fig2"
    cells = b.tables["cells"]
    assert len(cells.rows) == 4 * 3
    assert len(b.tables["autocorr"].rows) == 4 * 3 * 2
    assert [r[0] for r in b.tables["fit"].rows] == ["lasso", "elastic-net", "spike-slab"]
    assert all(-1 <= v <= 1 for v in cells.column("mean_autocorr"))
    assert b.config["overrides"] == TINY_REG and b.config["effective"]["iters"] == 200
    assert read_bundle(tmp_path) == b


def test_hier_figure_tables(tmp_path):
    b = reproduce_figure("fig4", TINY_HIER, out_dir=tmp_path, plot=True)
    t = b.tables["dacf_left"]
    assert t.columns == ["n", "p=3", "p=10"] and len(t.rows) == 2
    assert b.tables["trend"].column("grid") == ["left"]
    assert b.figures == ["fig4_left.png"] and (tmp_path / "fig4_left.png").stat().st_size > 0
    assert read_bundle(tmp_path).figures == ["fig4_left.png"]


def test_figures_are_deterministic(tmp_path):
    a = reproduce_figure("fig5", TINY_REG, out_dir=tmp_path / "a", plot=True)
    b = reproduce_figure("fig5", TINY_REG, out_dir=tmp_path / "b", plot=True)
    assert a == b
    for name in ("manifest.json", "cells.csv", "fit.csv", "autocorr.csv", "fig5_autocorr.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    c = reproduce_figure("fig5", {**TINY_REG, "seed": 1})
    assert c.tables["cells"].rows != a.tables["cells"].rows


def test_parallel_jobs_do_not_change_results():
    a = reproduce_figure("fig3", TINY_HIER)
    b = reproduce_figure("fig3", TINY_HIER, jobs=2)
    assert a == b


def _bundle():
    return ResultBundle("t", {"defaults": {"a": 1}, "overrides": {}, "effective": {"a": 1}},
                        {"x": Table(["a", "b"], [[1, 0.1], [2, 1e-300], [3, "s"]])})


def test_bundle_round_trip_is_exact(tmp_path):
    b = _bundle()
    write_bundle(b, tmp_path)
    back = read_bundle(tmp_path / "manifest.json")
    assert back == b and back.tables["x"].rows[1][1] == 1e-300


def test_bundle_tamper_detection(tmp_path):
    write_bundle(_bundle(), tmp_path)
    csv = tmp_path / "x.csv"
    csv.write_text(csv.read_text().replace("0.1", "0.2"))
    with pytest.raises(BundleError):
        read_bundle(tmp_path)
    write_bundle(_bundle(), tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    m["experiment_id"] = "u"
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(BundleError):
        read_bundle(tmp_path)
    m["schema_version"] = 99
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(BundleError, match="schema"):
        read_bundle(tmp_path)
    with pytest.raises(BundleError):
        read_bundle(tmp_path / "missing")


def test_bundle_without_overrides_reads_as_empty(tmp_path):
    b = _bundle()
    b.config.pop("overrides")
    write_bundle(b, tmp_path)
    assert read_bundle(tmp_path).config["overrides"] == {}


def test_creation_stamp_uses_source_date_epoch(monkeypatch, tmp_path):
    from hdgibbs.experiments.bundle import creation_stamp

    monkeypatch.setenv("SOURCE_DATE_EPOCH", "86400")
    assert creation_stamp() == "1970-01-02T00:00:00Z"
    monkeypatch.delenv("SOURCE_DATE_EPOCH")
    assert creation_stamp() == "1970-01-01T00:00:00Z"
    assert re.fullmatch(r"\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ", creation_stamp(True))


def test_table_validation():
    with pytest.raises(ValueError):
        Table(["a"], [[1, 2]])
