import json
import subprocess
import sys

import numpy as np
import pytest

from coshlibor.affine import AffineProcessSpec
from coshlibor.cli import main
from coshlibor.config import load_market_config, load_preset, preset_text
from coshlibor.errors import ConfigError
from coshlibor.reporting import format_sig, surface_csv, write_surface_csv
from coshlibor.volsurface import OK, ZERO_TIME_VALUE, VolSurfaceGrid

# brownian preset with a light Monte Carlo leg
SMALL = preset_text("brownian").replace("paths = 1000000", "paths = 40000")


def run_cli(*argv):
    return subprocess.run([sys.executable, "-m", "coshlibor", *argv], capture_output=True)


def test_csv_shape_and_tokens(tmp_path):
    grid = VolSurfaceGrid((1.0, 2.0), (0.02, 0.035, 0.05),
                          np.array([[0.25, 0.0, 0.2], [0.21, 0.2, 0.19]]),
                          ((OK, ZERO_TIME_VALUE, OK), (OK, OK, OK)))
    path = tmp_path / "g.csv"
    write_surface_csv(grid, path)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    lines = raw.decode("ascii").splitlines()
    assert len(lines) == 3 and all(len(line.split(",")) == 4 for line in lines)
    assert lines[0] == "expiry,0.02,0.035,0.05"
    assert lines[1].split(",")[2] == "0.000000000000#ZTV"
    assert lines[1].split(",")[1] == "0.250000000000"
    assert surface_csv(grid) == raw.decode()


def test_format_sig():
    assert format_sig(0.123456789012345) == "0.123456789012"
    assert format_sig(9.9999999999999) == "10.0000000000"
    assert format_sig(float("nan")) == "nan"


def test_fig1_preset_parses():
    cfg = load_preset("fig1")
    assert cfg.spec == AffineProcessSpec.jump_ou(lam=0.02, alpha_plus=12, alpha_minus=10, beta_plus=50,
                                                 beta_minus=5, sigma=0.3, theta=0.5, x0=0.7, horizon=10.0)
    assert cfg.curve.discount(1) / cfg.curve.discount(2) == pytest.approx(1.0175, rel=1e-15)


def test_schema_errors():
    with pytest.raises(ConfigError, match="tenor"):
        load_market_config(SMALL.replace("dates = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 10.0]",
                                         "dates = []"))
    with pytest.raises(ConfigError, match="bogus"):
        load_market_config(SMALL.replace("sigma = 1.0", "sigma = 1.0\nbogus = 3"))
    with pytest.raises(ConfigError, match="malformed"):
        load_market_config("[process")


def test_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL)
    assert main(["price", "--config", str(cfg), "--instrument", "floorlet", "--k", "8",
                 "--strike", "0.03"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["price"] > 0
    bad = tmp_path / "bad.toml"
    bad.write_text(SMALL.replace("sigma = 1.0", "sigma = 1.0\nbogus = 1"))
    assert main(["calibrate", "--config", str(bad)]) == 3
    assert main(["calibrate", "--config", str(tmp_path / "missing.toml")]) == 3
    steep = tmp_path / "steep.toml"
    # bounded jump domain: the cosh martingale cannot reach a 200% curve
    steep.write_text('[process]\nkind = "jump_ou"\nlam = 0.02\nalpha_plus = 2.0\nalpha_minus = 2.0\n'
                     'beta_plus = 1.0\nbeta_minus = 1.0\n\n[tenor]\nstep = 0.5\ncount = 20\n\n'
                     '[curve]\nflat_rate = 2.0\nperiod = 0.5\n')
    assert main(["calibrate", "--config", str(steep)]) == 4
    assert main(["price", "--config", str(cfg), "--instrument", "floorlet", "--k", "40",
                 "--strike", "0.03"]) == 5
    assert main(["surface", "--config", str(cfg), "--out", str(tmp_path / "nodir" / "s.csv")]) == 7
    with pytest.raises(SystemExit) as err:
        main(["price", "--preset", "fig1"])
    assert err.value.code == 2


def test_surface_bytewise_deterministic(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"s{i}.csv"
        r = run_cli("surface", "--preset", "fig3", "--out", str(out))
        assert r.returncode == 0, r.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    assert lines[0] == "expiry,2,3,4,5,6,7" and len(lines) == 7
    assert "#NA" in lines[-1] and "#" not in lines[1]
    meta = json.loads((tmp_path / "s0.csv.meta.json").read_text())
    assert "simple compounding" in meta["compounding"]


def test_validate_bytewise_deterministic_and_fault_injection(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL)
    outs = []
    for i in range(2):
        out = tmp_path / f"v{i}.json"
        r = run_cli("validate", "--config", str(cfg), "--out", str(out))
        assert r.returncode == 0, r.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["passed"] and report["n_checks"] > 30
    assert {"value", "reference", "tolerance"} <= set(report["checks"][0])

    n = load_market_config(SMALL).tenor.n
    broken = tmp_path / "broken.toml"
    broken.write_text(SMALL + "\n[calibration]\nu_override = [" + ", ".join(["0.3"] * n) + "]\n")
    r = run_cli("validate", "--config", str(broken), "--out", str(tmp_path / "b.json"))
    assert r.returncode == 1
    assert b"calibration/bond" in r.stderr
