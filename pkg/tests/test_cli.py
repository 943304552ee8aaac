"""
End-to-end tests for the command-line pipelines
"""
import math

import numpy as np
import pytest
import yaml

from ovsolve.cli import main
from ovsolve.config import load_scattering_file, write_scattering_file
from ovsolve.core.spectral import BasePole
from ovsolve.utils import read_csv_columns, read_json, write_csv


SQRT3 = math.sqrt(3.0)

# e^{i pi/6} with c = 2 sqrt(3) e^{-i pi/6}: a regular loop centred at y = -t
UNIT_POLE = {"re": SQRT3 / 2, "im": 0.5, "c_re": 3.0, "c_im": -SQRT3, "kind": "type1"}
# 1.5 e^{i pi/6} with c = 3 sqrt(3) e^{-i pi/6}
FAST_POLE = {"re": 1.5 * SQRT3 / 2, "im": 0.75, "c_re": 4.5, "c_im": -1.5 * SQRT3, "kind": "type1"}


def write_yaml(path, payload):
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(payload, f)
    return str(path)


def scattering(tmp_path, poles, name="data.yaml"):
    return write_yaml(tmp_path / name, {"poles": poles, "reflection": "zero"})


def zero_profile(tmp_path):
    x = np.linspace(-12.0, 12.0, 481)
    return str(write_csv(tmp_path / "u0.csv", ("x", "u"), zip(x, np.zeros_like(x))))


def test_soliton_without_poles(tmp_path):
    """N = 0 writes the flat profile x = y, u = 0"""
    out = tmp_path / "out"
    code = main(["soliton", "--scattering", scattering(tmp_path, []), "--output", str(out),
                 "--t", "0", "--n-y", "11", "--y-min", "-5", "--y-max", "5"])
    assert code == 0
    cols = read_csv_columns(out / "profile_t0.csv", ("y", "x", "u"))
    assert np.array_equal(cols["x"], cols["y"])
    assert not np.any(cols["u"])


def test_manifest(tmp_path):
    """Every run leaves a manifest with its configuration, outputs and versions"""
    out = tmp_path / "out"
    main(["soliton", "--scattering", scattering(tmp_path, [UNIT_POLE]), "--output", str(out),
          "--t", "0", "1", "--n-y", "21"])
    manifest = read_json(out / "manifest.json")
    assert manifest["subcommand"] == "soliton"
    assert manifest["outputs"] == ["profile_t0.csv", "profile_t1.csv"]
    assert manifest["config"]["t_values"] == [0.0, 1.0]
    assert set(manifest["versions"]) == {"ovsolve", "numpy", "scipy"}
    assert set(manifest["results"]["monotone_x"]) == {"t0", "t1"}
    assert manifest["results"]["poles"][0]["velocity"] == pytest.approx(-1.0)


def test_asympt_reflectionless_matches_soliton(tmp_path):
    """r = 0 gives the same profile file as the soliton subcommand"""
    data = scattering(tmp_path, [UNIT_POLE])
    grid = ["--t", "20", "--y-min", "-30", "--y-max", "10", "--n-y", "40"]
    assert main(["soliton", "--scattering", data, "--output", str(tmp_path / "sol")] + grid) == 0
    assert main(["asympt", "--scattering", data, "--output", str(tmp_path / "asy")] + grid) == 0
    soliton_bytes = (tmp_path / "sol" / "profile_t20.csv").read_bytes()
    assert (tmp_path / "asy" / "profile_t20.csv").read_bytes() == soliton_bytes
    detail = read_csv_columns(tmp_path / "asy" / "asympt_t20.csv", ("y", "x", "u"))
    assert detail["y"].size == 40


def test_asympt_gate(tmp_path):
    """t below t_min exits with the domain-gate code"""
    code = main(["asympt", "--scattering", scattering(tmp_path, [UNIT_POLE]), "--output", str(tmp_path / "out"),
                 "--t", "5", "--t-min", "10", "--n-y", "4"])
    assert code == 3


def test_off_ray_pole(tmp_path):
    """A pole off arg z = pi/6 is a configuration error"""
    bad = {"re": 1.0, "im": 1.0, "c_re": 1.0}
    code = main(["soliton", "--scattering", scattering(tmp_path, [bad]), "--output", str(tmp_path / "out")])
    assert code == 2


def test_invalid_flag_value(tmp_path):
    code = main(["soliton", "--scattering", scattering(tmp_path, []), "--output", str(tmp_path / "out"), "--n-y", "1"])
    assert code == 2


def test_missing_input(tmp_path):
    assert main(["scatter", "--output", str(tmp_path / "out")]) == 2
    assert main(["scatter", "--input", str(tmp_path / "nope.csv"), "--output", str(tmp_path / "out")]) == 2


def test_scatter_zero_profile(tmp_path):
    """u0 = 0 has r = 0 and no poles; the scattering document says so"""
    out = tmp_path / "out"
    code = main(["scatter", "--input", zero_profile(tmp_path), "--output", str(out), "--z-max", "4", "--n-z", "9"])
    assert code == 0
    cols = read_csv_columns(out / "reflection.csv", ("z", "re_r", "im_r", "abs_r"))
    assert cols["z"].size == 8
    assert not np.any(cols["abs_r"])
    with open(out / "scattering.yaml", encoding="utf-8") as f:
        doc = yaml.safe_load(f)
    assert doc["poles"] == []
    assert doc["reflection"] == "zero"
    assert doc["z_max"] == 20.0
    assert doc["n_grid"] == 4001


def test_evolve_zero_profile(tmp_path):
    """u = 0 stays zero"""
    out = tmp_path / "out"
    code = main(["evolve", "--input", zero_profile(tmp_path), "--output", str(out),
                 "--L", "20", "--modes", "32", "--dt", "0.01", "--oracle-T", "0.1"])
    assert code == 0
    manifest = read_json(out / "manifest.json")
    assert manifest["outputs"] == ["oracle_t0.1.csv", "oracle_t0.csv"]
    final = read_csv_columns(out / "oracle_t0.1.csv", ("x", "u"))
    assert final["x"].size == 32
    assert not np.any(final["u"])


def test_compare_resolution_and_stability(tmp_path):
    """compare writes the resolution table and the stability bound"""
    data = scattering(tmp_path, [UNIT_POLE, FAST_POLE])
    out = tmp_path / "out"
    code = main(["compare", "--scattering", data, "--reference", data, "--output", str(out),
                 "--t", "20", "--y-min", "-30", "--y-max", "0", "--n-y", "5"])
    assert code == 0
    table = read_csv_columns(out / "resolution.csv", ("t", "resolution_error"))
    assert table["t"].tolist() == [20.0]
    assert np.isfinite(table["resolution_error"][0])
    manifest = read_json(out / "manifest.json")
    assert manifest["results"]["stability_bound"] == 0.0


def test_compare_needs_something(tmp_path):
    assert main(["compare", "--output", str(tmp_path / "out")]) == 2


def test_config_file(tmp_path):
    """YAML keys apply and relative paths resolve against the config file"""
    scattering(tmp_path, [], name="flat.yaml")
    config = write_yaml(tmp_path / "run.yaml", {
        "scattering": "flat.yaml",
        "t_values": [2.0],
        "y": {"y_min": -1.0, "y_max": 1.0, "n_y": 3},
    })
    out = tmp_path / "out"
    assert main(["soliton", "--config", config, "--output", str(out)]) == 0
    cols = read_csv_columns(out / "profile_t2.csv", ("y", "x", "u"))
    assert cols["y"].tolist() == [-1.0, 0.0, 1.0]


def test_threads_from_environment(tmp_path, monkeypatch):
    """OV_THREADS is the fallback when neither flag nor config sets threads"""
    monkeypatch.setenv("OV_THREADS", "3")
    out = tmp_path / "out"
    assert main(["soliton", "--scattering", scattering(tmp_path, []), "--output", str(out), "--n-y", "3"]) == 0
    assert read_json(out / "manifest.json")["config"]["threads"] == 3


def test_scattering_file_keeps_grid(tmp_path):
    """z_max and n_grid are written and drive the resampling on load"""
    z = np.linspace(-3.0, 3.0, 61)
    r = 0.3 * np.exp(-4 * z ** 2) * np.exp(0.2j * z)
    path = write_scattering_file(tmp_path / "s.yaml", [BasePole.from_polar(1.0, 2.0)], z, r, n_grid=1201)
    with open(path, encoding="utf-8") as f:
        doc = yaml.safe_load(f)
    assert doc["reflection"] == "s.reflection.csv"
    assert doc["z_max"] == 3.0
    assert doc["n_grid"] == 1201
    data = load_scattering_file(path)
    assert data.reflection.z_max == 3.0
    assert data.reflection.z.size == 1201
    assert data.reflection(0.0) == pytest.approx(0.3, abs=1e-9)
    assert data.n_poles == 1
