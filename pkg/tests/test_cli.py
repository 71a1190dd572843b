import hashlib
import json

import pandas as pd
import pytest

from rfiforge.cli.commands import load_config
from rfiforge.cli.main import main
from rfiforge.simulator import SEED_ENV_VAR

MINIMAL = {
    "seed": 5,
    "scenario": {
        "geometry": {"n_antennas": 4, "max_baseline": 10.0},
        "rfi": {"inr_db": 10.0, "alpha_sigma": 0.01},
        "sources": [{"direction": [0.1, 0.2], "snr_db": 0.0}],
        "sigma_n": 1.0,
        "n_samples": 64,
    },
    "gamma_study": {"inr_grid": [0.0], "n_grid": [64], "trials": 2, "n_antennas": 4},
    "smear_study": {"n_grid": [1, 256], "trials": 2},
    "compare": {"seeds": 2},
    "imaging": {"n_points": 9, "format": "both"},
}


@pytest.fixture
def config_path(tmp_path, monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(MINIMAL, indent=2))
    return path


def _manifest(out_dir):
    return json.loads((out_dir / "manifest.json").read_text())


def _verify_checksums(out_dir):
    manifest = _manifest(out_dir)
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((out_dir / name).read_bytes()).hexdigest() == digest
    return manifest


def test_simulate_writes_scms(config_path, tmp_path):
    out_dir = tmp_path / "out"
    assert main(["simulate", str(config_path), "-o", str(out_dir)]) == 0
    manifest = _verify_checksums(out_dir)
    assert set(manifest["files"]) == {"scm_tau0.csv", "scm_tau1.csv"}
    assert manifest["command"] == "simulate"
    assert manifest["base_seed"] == 5

    scm = pd.read_csv(out_dir / "scm_tau0.csv")
    assert list(scm.columns) == ["row", "col", "real", "imag"]
    assert len(scm) == 16
    diagonal = scm[scm["row"] == scm["col"]]
    assert (diagonal["imag"] == 0).all()


def test_simulate_snapshots_and_gain_errors(config_path, tmp_path):
    out_dir = tmp_path / "out"
    assert main(["simulate", str(config_path), "-o", str(out_dir), "--delta", "0.1", "--snapshots"]) == 0
    manifest = _verify_checksums(out_dir)
    assert "snapshots.csv" in manifest["files"]
    assert manifest["metadata"]["gain_delta"] == 0.1
    assert len(manifest["metadata"]["gain_vector_sha256"]) == 64
    assert len(pd.read_csv(out_dir / "snapshots.csv")) == 4 * 64


def test_runs_are_reproducible(config_path, tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", str(config_path), "-o", str(first)]) == 0
    assert main(["simulate", str(config_path), "-o", str(second)]) == 0
    assert _manifest(first)["files"] == _manifest(second)["files"]


def test_seed_precedence(config_path, tmp_path, monkeypatch):
    assert main(["simulate", str(config_path), "-o", str(tmp_path / "a")]) == 0
    assert main(["simulate", str(config_path), "-o", str(tmp_path / "b"), "--seed", "9"]) == 0
    monkeypatch.setenv(SEED_ENV_VAR, "11")
    assert main(["simulate", str(config_path), "-o", str(tmp_path / "c")]) == 0
    assert main(["simulate", str(config_path), "-o", str(tmp_path / "d"), "--seed", "9"]) == 0

    manifests = {name: _manifest(tmp_path / name) for name in "abcd"}
    assert [manifests[name]["base_seed"] for name in "abcd"] == [5, 9, 11, 9]
    assert len({manifest["config_hash"] for manifest in manifests.values()}) == 1
    assert manifests["a"]["files"] != manifests["b"]["files"]
    assert manifests["b"]["files"] == manifests["d"]["files"]


def test_custom_lag(config_path, tmp_path):
    out_dir = tmp_path / "out"
    assert main(["simulate", str(config_path), "-o", str(out_dir), "--tau", "3"]) == 0
    assert "scm_tau3.csv" in _manifest(out_dir)["files"]


def test_missing_sigma_n_is_a_configuration_error(tmp_path, caplog):
    document = json.loads(json.dumps(MINIMAL))
    del document["scenario"]["sigma_n"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(document, indent=2))
    assert main(["simulate", str(path), "-o", str(tmp_path / "out")]) == 2
    assert "scenario.sigma_n" in caplog.text


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    assert main(["simulate", str(path), "-o", str(tmp_path / "out")]) == 2


def test_invalid_override(config_path, tmp_path):
    assert main(["simulate", str(config_path), "-o", str(tmp_path / "o"), "--delta", "1.5"]) == 2
    assert main(["gamma-study", str(config_path), "-o", str(tmp_path / "g"), "--delta", "1.5"]) == 2


def test_unreadable_config(tmp_path):
    assert main(["simulate", str(tmp_path / "missing.json"), "-o", str(tmp_path / "out")]) == 3


def test_unwritable_output(config_path, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["simulate", str(config_path), "-o", str(blocker)]) == 3


def test_numeric_failure(config_path, tmp_path):
    assert main(["simulate", str(config_path), "-o", str(tmp_path / "out"), "--tau", "64"]) == 4


def test_unknown_preset(tmp_path):
    assert main(["simulate", "preset:nope", "-o", str(tmp_path / "out")]) == 2


def test_bundled_presets():
    fig1 = load_config("preset:fig1")
    assert fig1.require_scenario().geometry.n_antennas == 8
    assert fig1.gamma_study.trials == 512
    fig2 = load_config("preset:fig2")
    assert fig2.require_scenario().geometry.n_antennas == 100
    assert fig2.compare.tau == 1


@pytest.mark.parametrize("command", ["gamma-study", "compare"])
def test_outputs_do_not_depend_on_workers(config_path, tmp_path, command):
    checksums = []
    for workers in (1, 2, 8):
        out_dir = tmp_path / f"w{workers}"
        argv = [command, str(config_path), "-o", str(out_dir), "--workers", str(workers)]
        assert main(argv) == 0
        checksums.append(_verify_checksums(out_dir)["files"])
    assert checksums[0] == checksums[1] == checksums[2]


def test_gamma_study(config_path, tmp_path):
    out_dir = tmp_path / "out"
    assert main(["gamma-study", str(config_path), "-o", str(out_dir), "--tau", "1"]) == 0
    table = pd.read_csv(out_dir / "gamma_study.csv")
    assert len(table) == 2
    assert set(table["tau"]) == {1}
    assert set(table["gain_delta"]) == {0.0, 0.1}
    assert _verify_checksums(out_dir)["metadata"]["trials"] == 2


def test_smear_study(config_path, tmp_path):
    out_dir = tmp_path / "out"
    assert main(["smear-study", str(config_path), "-o", str(out_dir), "--trials", "3"]) == 0
    table = pd.read_csv(out_dir / "smearing_study.csv")
    assert len(table) == 6
    spectra = pd.read_csv(out_dir / "smearing_spectra.csv")
    assert len(spectra) == 6 * 8
    _verify_checksums(out_dir)


def test_compare(config_path, tmp_path):
    out_dir = tmp_path / "out"
    assert main(["compare", str(config_path), "-o", str(out_dir)]) == 0
    assert len(pd.read_csv(out_dir / "comparison.csv")) == 2
    summary = pd.read_csv(out_dir / "comparison_summary.csv")
    assert "win_fraction_subtraction" in summary.columns
    manifest = _verify_checksums(out_dir)
    assert "map_raw.pgm" in manifest["files"]
    assert "map_residual_subtraction.csv" in manifest["files"]
    sidecar = json.loads((out_dir / "map_raw.json").read_text())
    assert sidecar["width"] == 9 and sidecar["max_pixel"] == 65535
    assert (out_dir / "map_raw.pgm").read_bytes().startswith(b"P5\n9 9\n65535\n")


def test_image(config_path, tmp_path):
    out_dir = tmp_path / "out"
    assert main(["image", str(config_path), "-o", str(out_dir)]) == 0
    files = _verify_checksums(out_dir)["files"]
    for name in ("raw", "lagged", "reference", "projection", "subtraction"):
        assert f"map_{name}.csv" in files
    sky_map = pd.read_csv(out_dir / "map_reference.csv")
    assert list(sky_map.columns) == ["l", "m", "value"]
    assert len(sky_map) == 81


@pytest.mark.slow
def test_compare_fig2_preset(tmp_path, monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    out_dir = tmp_path / "out"
    assert main(["compare", "preset:fig2", "-o", str(out_dir), "--trials", "2"]) == 0
    summary = pd.read_csv(out_dir / "comparison_summary.csv")
    assert summary.loc[0, "seeds"] == 2
    assert 0 <= summary.loc[0, "win_fraction_subtraction"] <= 1
    manifest = _verify_checksums(out_dir)
    assert manifest["metadata"]["n_antennas"] == 100
