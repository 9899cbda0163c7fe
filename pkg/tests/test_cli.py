import json
import subprocess
import sys

import pytest

from hdgibbs.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rate_text_golden(capsys):
    code, out, _ = run(capsys, "rate", "--model", "standard-regression", "--n", "10", "--p", "100")
    assert code == 0
    assert out.splitlines()[0] == "0.925926"


def test_rate_json(capsys):
    code, out, _ = run(capsys, "rate", "--model", "dag", "--n", "30", "--delta-max", "10", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["exact"] == "5/19" and data["rate"] == pytest.approx(10 / 38)


@pytest.mark.parametrize(
    "argv",
    [
        ["rate", "--model", "standard-regression", "--n", "3", "--p", "1"],
        ["rate", "--model", "standard-regression", "--n", "10"],
        ["rate", "--model", "bogus"],
        ["nonsense"],
        [],
        ["bounds", "--kind", "rosenthal", "--n", "5"],
        ["bounds", "--kind", "rosenthal", "--n", "5", "--a", "1.5", "--s", "1", "--y-sq-norm", "1",
         "--resid0-sq", "1", "--k", "1"],
        ["sample", "--model", "lasso", "--n", "10"],
        ["sample", "--model", "dag", "--n", "10"],
        ["dacf", "--model", "lasso", "--n-values", "10,x", "--p-values", "3"],
        ["figure", "--id", "fig2", "--runs", "0"],
    ],
)
def test_usage_and_precondition_errors_exit_1(capsys, argv, tmp_path):
    code, out, err = run(capsys, *argv, *(["--out", str(tmp_path)] if argv[:1] == ["figure"] else []))
    assert code == 1
    assert err.strip()


def test_bounds_outputs(capsys):
    code, out, _ = run(capsys, "bounds", "--kind", "rosenthal", "--n", "5", "--a", "3", "--s", "50",
                       "--y-sq-norm", "1", "--resid0-sq", "5", "--k", "100000", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["log_rate"] < 0 and data["bound"] > 1
    code, out, _ = run(capsys, "bounds", "--kind", "choi-hobert", "--n", "10", "--p", "3", "--lambda", "1",
                       "--format", "json")
    assert code == 0 and json.loads(out)["upper_bound_check"] is True
    code, out, _ = run(capsys, "bounds", "--kind", "khare-hobert", "--n", "10", "--p", "20", "--lambda", "1",
                       "--format", "json")
    assert code == 0 and json.loads(out)["bound_check"] is True
    code, out, _ = run(capsys, "bounds", "--kind", "hier-tv", "--mu0", "1,1", "--sigma2", "1", "--tau2", "1",
                       "--n", "10", "--k", "3")
    assert code == 0 and out.startswith("kind: 'hier-tv'")
    code, out, _ = run(capsys, "bounds", "--kind", "iterations", "--n", "10", "--p", "100", "--tol", "0.001",
                       "--M", "1", "--format", "json")
    assert json.loads(out)["K"] == 90
    code, out, _ = run(capsys, "bounds", "--kind", "wasserstein", "--sigma2-0", "6", "--C", "16", "--n", "10",
                       "--p", "20", "--format", "json")
    assert json.loads(out)["M1"] == pytest.approx(4.0)


def test_bounds_from_csv(capsys, tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("1,0,1\n0,1,0\n1,1,1\n0.5,-1,0\n")
    code, out, _ = run(capsys, "bounds", "--kind", "choi-hobert", "--data", str(f), "--lambda", "2", "--format", "json")
    assert code == 0 and json.loads(out)["log_case1"] == pytest.approx(-4 * 0.6931471805599453 - 1)


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--model", "standard-regression", "--n", "10", "--p", "5", "--iters", "50", "--burn-in", "5",
         "--track", "2"],
        ["sample", "--model", "spike-slab", "--n", "10", "--p", "30", "--iters", "50", "--burn-in", "5"],
        ["sample", "--model", "hier-unknown", "--n", "5", "--p", "3", "--iters", "50"],
        ["sample", "--model", "dag", "--n", "30", "--degrees", "0,3", "--iters", "50"],
        ["dacf", "--model", "hier-unknown", "--prior", "np", "--n-values", "10,20", "--p-values", "3,5",
         "--runs", "2", "--iters", "100", "--burn-in", "10"],
        ["figure", "--id", "fig2", "--preset", "reduced", "--runs", "1", "--iters", "50", "--burn-in", "5",
         "--plot"],
    ],
    ids=["sample-standard", "sample-ss", "sample-hier", "sample-dag", "dacf", "figure"],
)
def test_repeated_invocations_are_byte_identical(capsys, tmp_path, argv):
    outputs = []
    for name in ("a", "b"):
        code, out, _ = run(capsys, *argv, "--out", str(tmp_path / name))
        assert code == 0
        files = sorted(p.name for p in (tmp_path / name).iterdir())
        outputs.append((out.replace(str(tmp_path / name), "OUT"), {f: (tmp_path / name / f).read_bytes() for f in files}))
    assert outputs[0] == outputs[1]
    assert "manifest.json" in outputs[0][1]


def test_seed_changes_output(capsys, tmp_path):
    base = ["sample", "--model", "standard-regression", "--n", "10", "--p", "5", "--iters", "20"]
    run(capsys, *base, "--out", str(tmp_path / "a"))
    run(capsys, *base, "--seed", "1", "--out", str(tmp_path / "b"))
    assert (tmp_path / "a" / "trace.csv").read_bytes() != (tmp_path / "b" / "trace.csv").read_bytes()


def test_out_dir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("HDGIBBS_OUT", str(tmp_path / "env"))
    code, _, _ = run(capsys, "sample", "--model", "hier-known", "--n", "5", "--p", "2", "--iters", "10")
    assert code == 0 and (tmp_path / "env" / "manifest.json").exists()


def test_check_passes(capsys):
    code, out, _ = run(capsys, "check", "--budget", "5")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hdgibbs", "rate", "--model", "hier-known", "--sigma2", "1",
                           "--tau2", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines()[0] == "0.500000"
    proc = subprocess.run([sys.executable, "-m", "hdgibbs", "rate"], capture_output=True, text=True)
    assert proc.returncode == 1
