import json
import subprocess
import sys

import numpy as np
import pytest

from specframes import io
from specframes.cli import main


def run(*args):
    return main([str(a) for a in args])


def test_design_outputs(tmp_path):
    assert run("design", "--graph", "path:64", "--warp", "exact", "--out", tmp_path) == 0
    bank = io.load_bank(tmp_path / "bank.json")
    assert bank.M == 8
    prov, cols = io.read_csv(tmp_path / "G.csv")
    assert "config_hash" in prov
    np.testing.assert_allclose(cols["G"], 3 * 3 / 8, rtol=1e-9)


def test_design_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("design", "--graph", "sensor:50", "--seed", 4, "--warp", "sliced",
                   "--Q", 6, "--out", out) == 0
    for f in sorted(p.name for p in a.iterdir()):
        ta = (a / f).read_text().replace(str(a), "")
        tb = (b / f).read_text().replace(str(b), "")
        # config_hash covers the output directory, so compare the remaining lines
        strip = lambda t: [ln for ln in t.splitlines() if not ln.startswith("# config_hash")]
        assert strip(ta) == strip(tb), f


def test_cdf_command(tmp_path):
    assert run("cdf", "--graph", "path:64", "--method", "sliced", "--Q", 8,
               "--out", tmp_path) == 0
    prov, cols = io.read_csv(tmp_path / "cdf.csv")
    assert prov["provenance"] == "inertia-sliced"
    assert np.all(np.diff(cols[list(cols)[1]]) >= 0)


def test_analyze_roundtrip(tmp_path):
    assert run("design", "--graph", "ring:30", "--warp", "none", "--lambda-upper", 4,
               "--out", tmp_path) == 0
    sig = tmp_path / "s.txt"
    np.savetxt(sig, np.random.default_rng(0).standard_normal(30))
    assert run("analyze", "--graph", "ring:30", "--signal", sig, "--bank",
               tmp_path / "bank.json", "--out", tmp_path / "an") == 0
    assert any((tmp_path / "an").iterdir())


@pytest.mark.parametrize("args", [
    ("design", "--graph", "path:64", "--M", "2", "--R", "3"),
    ("design", "--graph", "path:64", "--window", "blackman", "--R", "3"),
    ("design", "--graph", "path:abc"),
    ("design", "--bogus-flag"),
    ("cdf", "--graph", "path:10", "--method", "sliced", "--Q", "1"),
])
def test_validation_exit_code(args, tmp_path):
    assert run(*args, "--out", tmp_path) == 2


def test_missing_file_exit_code(tmp_path):
    assert run("design", "--graph", tmp_path / "missing.edges", "--out", tmp_path) == 4


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"M": 6, "R": 3, "graph": "path:20", "warp": "none"}))
    assert run("--config", cfg, "design", "--out", tmp_path / "o") == 0
    assert io.load_bank(tmp_path / "o" / "bank.json").M == 6
    # flags win over the file
    assert run("--config", cfg, "design", "--M", 7, "--out", tmp_path / "p") == 0
    assert io.load_bank(tmp_path / "p" / "bank.json").M == 7
    cfg.write_text(json.dumps({"nope": 1}))
    assert run("--config", cfg, "design", "--out", tmp_path / "q") == 2


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "specframes", "design", "--graph", "path:16",
                        "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "frame constant" in r.stdout


@pytest.mark.slow
def test_minnesota_demo_files(tmp_path):
    assert run("analyze", "--graph", "minnesota", "--demo", "--out", tmp_path) == 0
    maps = sorted(p.name for p in tmp_path.glob("coefficients_m*.csv"))
    assert len(maps) == 15 and (tmp_path / "clusters.csv").exists()
    report = json.loads((tmp_path / "report.json").read_text())
    assert abs(report["energy_ratio"] - 1) <= 1e-9


def test_missing_signal_file(tmp_path):
    assert run("analyze", "--graph", "path:8", "--signal", tmp_path / "nope.txt",
               "--out", tmp_path) == 4


def test_unknown_suite(tmp_path):
    assert run("reproduce", "nope", "--out", tmp_path) == 2
