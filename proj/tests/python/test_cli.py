"""End-to-end tests of the `spec` command line tool."""

import json
import os
import subprocess

import pytest

SPEC = os.environ["SPEC_BIN"]
MODELS = os.environ["MODELS_DIR"]


def run(*args, cwd=None):
    return subprocess.run(
        [SPEC, *args], capture_output=True, text=True, cwd=cwd, timeout=300
    )


def test_help():
    result = run("--help")
    assert result.returncode == 0
    for sub in ["model", "sample", "theory", "oracle", "empirical", "compare"]:
        assert sub in result.stdout


def test_model_describe():
    result = run("model", "describe", f"{MODELS}/fig1.json")
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert payload["c"] == pytest.approx(90.0)
    assert payload["alphas"][0] == pytest.approx(100.0)
    assert payload["alphas"][1] == pytest.approx(27.7778, abs=1e-3)
    assert payload["meta"]["config_hash"]


def test_invalid_model_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {"n": 100, "atoms": [{"k": [1.0, 1.0], "weight": 0.5},
                                 {"k": [1.0, -2.0], "weight": 0.5}]}
        )
    )
    result = run("model", "describe", str(bad))
    assert result.returncode == 2
    assert "NegativeProduct" in result.stderr


def test_usage_error_exits_2():
    assert run("model", "describe").returncode == 2
    assert run("frobnicate").returncode == 2


def test_oracle_constants():
    result = run("oracle", "constants")
    payload = json.loads(result.stdout)
    assert payload["x"] == pytest.approx(7.058, abs=1e-3)
    assert payload["y"] == pytest.approx(0.723, abs=5e-4)
    assert payload["coefficient"] == pytest.approx(1.494, abs=1e-3)


def test_oracle_density_csv(tmp_path):
    out = tmp_path / "oracle.csv"
    result = run("oracle", "density", "--kind", "semicircle", "--c", "100",
                 "--lo", "-22", "--hi", "22", "--points", "45", "--out", str(out))
    assert result.returncode == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "x,rho"
    assert len(lines) == 46


def test_theory_band():
    result = run("theory", "band", f"{MODELS}/semicircle_c100.json")
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    lo, hi = payload["intervals"][0]
    assert lo == pytest.approx(-20.0, abs=0.05)
    assert hi == pytest.approx(20.0, abs=0.05)


def test_theory_outliers():
    result = run("theory", "outliers", f"{MODELS}/sbm_c100_theta50.json")
    payload = json.loads(result.stdout)
    zs = [o["z"] for o in payload["outliers"] if o["visible"]]
    assert zs[0] == pytest.approx(101.0, rel=1e-6)
    assert zs[1] == pytest.approx(29.0, rel=1e-6)
    assert payload["g_max"] == pytest.approx(0.1, abs=1e-3)


def test_theory_threshold_and_sweep(tmp_path):
    result = run("theory", "threshold", f"{MODELS}/fig1.json")
    payload = json.loads(result.stdout)
    assert payload["theta_star"] == pytest.approx(32.2, abs=0.1)

    out = tmp_path / "sweep.csv"
    result = run("theory", "threshold", f"{MODELS}/fig1.json",
                 "--sweep", "10:55:10", "--out", str(out))
    assert result.returncode == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "theta,alpha2,visible"
    assert len(rows) == 11
    visibility = [int(r.split(",")[2]) for r in rows[1:]]
    assert visibility == sorted(visibility)  # flips from 0 to 1 once


def test_theory_density_csv(tmp_path):
    out = tmp_path / "density.csv"
    result = run("theory", "density", f"{MODELS}/semicircle_c100.json",
                 "--lo", "-22", "--hi", "22", "--points", "201", "--out", str(out))
    assert result.returncode == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "x,rho"
    assert len(rows) == 202


def test_sample_eig_detect_roundtrip(tmp_path):
    model = tmp_path / "small.json"
    model.write_text(json.dumps({
        "n": 800,
        "two_community": {
            "kappas": [{"kappa": 60, "weight": 0.5}, {"kappa": 120, "weight": 0.5}],
            "theta": 50,
        },
    }))
    graph = tmp_path / "graph.csv"
    result = run("sample", str(model), "--seed", "9", "--out", str(graph))
    assert result.returncode == 0
    assert graph.exists() and (tmp_path / "graph.csv.json").exists()

    sidecar = json.loads((tmp_path / "graph.csv.json").read_text())
    assert sidecar["n"] == 800
    assert sidecar["seed"] == 9
    assert len(sidecar["labels"]) == 800

    eigs = tmp_path / "eigs.csv"
    result = run("empirical", "eig", str(graph), "--mode", "topk:3", "--out", str(eigs))
    assert result.returncode == 0
    rows = [l for l in eigs.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "eigenvalue,residual"
    top = float(rows[1].split(",")[0])
    assert abs(top - 101.0) < 8.0  # z1 ~ 101 with finite-n scatter

    result = run("empirical", "detect", str(graph), "--q", "2")
    payload = json.loads(result.stdout)
    assert payload["accuracy"] >= 0.8

    result = run("empirical", "eig", str(graph), "--mode", "bogus")
    assert result.returncode == 2


def test_density_independent_of_thread_count(tmp_path):
    one = tmp_path / "t1.csv"
    two = tmp_path / "t2.csv"
    for path, threads in [(one, "1"), (two, "2")]:
        result = run("theory", "density", f"{MODELS}/semicircle_c100.json",
                     "--lo", "-22", "--hi", "22", "--points", "101",
                     "--threads", threads, "--out", str(path))
        assert result.returncode == 0
    assert one.read_bytes() == two.read_bytes()


def test_sample_determinism(tmp_path):
    model = f"{MODELS}/semicircle_c100.json"
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run("sample", model, "--seed", "4", "--out", str(a)).returncode == 0
    assert run("sample", model, "--seed", "4", "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.json").read_bytes() == (tmp_path / "b.csv.json").read_bytes()


def test_compare_small(tmp_path):
    out = tmp_path / "compare.json"
    hist = tmp_path / "hist.csv"
    result = run("compare", f"{MODELS}/fig1.json", "--n", "1200", "--seed", "3",
                 "--bins", "16", "--out", str(out), "--hist-out", str(hist))
    payload = json.loads(out.read_text())
    assert "l1_distance" in payload
    assert payload["counts"]["theory_visible"] == 2
    assert hist.exists()
    # Small n is noisier; the gate itself is exercised at n=4000 in the
    # acceptance suite.
    assert payload["l1_distance"] < 0.2
    assert result.returncode in (0, 1)


def test_reproduce_figure(tmp_path):
    outdir = tmp_path / "fig"
    result = run("reproduce-figure", f"{MODELS}/fig1.json", "--n", "2000",
                 "--seed", "11", "--out-dir", str(outdir))
    for name in ["theory_density.csv", "outliers.json", "eigenvalues.csv",
                 "histogram.csv", "compare.json"]:
        assert (outdir / name).exists()
    payload = json.loads((outdir / "compare.json").read_text())
    assert payload["counts"]["theory_visible"] == 2
    assert result.returncode in (0, 1)
