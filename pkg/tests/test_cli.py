import json
import warnings
from pathlib import Path

import pytest

from becqnd.cli import run
from becqnd.manifest import sha256_file

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "rb87_cavity.cfg"


def cli(*argv):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return run([str(a) for a in argv])


def test_derive_reference_config(tmp_path, capsys):
    rc = cli("derive", "--config", CONFIG, "--out", tmp_path)
    assert rc == 0
    doc = json.loads((tmp_path / "derived_params.json").read_text())
    assert doc["omega_m"] / doc["omega_R"] == pytest.approx(4.000, abs=1e-9)
    for key in ("omega_R", "Delta_a", "U0", "g", "Omega_c", "Omega_plus",
                "Omega_minus", "chi", "omega_m", "G", "k_wavenumber"):
        assert key in doc
    out = capsys.readouterr().out
    assert "omega_m" in out


def test_noise_budget_sql_beaten(tmp_path, capsys):
    rc = cli("noise-budget", "--config", CONFIG, "--omega-sw", "0 omega_R",
             "--eta-max", "0.655kappa", "--out", tmp_path)
    assert rc == 0
    doc = json.loads((tmp_path / "noise_budget.json").read_text())
    assert doc["sql_beaten"] is True
    assert "sql_beaten = true" in capsys.readouterr().out


def test_missing_kappa_exits_2(tmp_path, capsys):
    rc = cli("derive", "--n", "5e4", "--m-a", "86.9 u", "--omega-a", "2.41419e15",
             "--omega-c", "2.41494e15", "--g0", "14.1 2pi*MHz", "--l", "178 um",
             "--gamma", "8.1e4", "--out", tmp_path)
    assert rc == 2
    assert "kappa" in capsys.readouterr().err


def test_bad_unit_exits_2(tmp_path, capsys):
    rc = cli("derive", "--config", CONFIG, "--kappa", "13 MHz", "--out", tmp_path)
    assert rc == 2
    assert "ambiguous" in capsys.readouterr().err


def test_manifest_written_with_valid_hashes(tmp_path):
    rc = cli("noise-budget", "--config", CONFIG, "--out", tmp_path)
    assert rc == 0
    man = json.loads((tmp_path / "run_manifest.json").read_text())
    assert man["subcommand"] == "noise-budget"
    assert man["seed"] == 20260811
    assert man["derived_params"]["omega_m"] > 0
    for entry in man["outputs"]:
        assert sha256_file(entry["path"]) == entry["sha256"]


def test_spectra_normalize_and_idempotence(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        rc = cli("spectra", "--config", CONFIG, "--which", "SQ,nadd",
                 "--normalize", "kappa", "--n-points", "801", "--out", out)
        assert rc == 0
    f1 = (out1 / "spectrum_nadd.csv").read_bytes()
    f2 = (out2 / "spectrum_nadd.csv").read_bytes()
    assert f1 == f2
    header = f1.decode().splitlines()[0]
    assert header == "omega_over_kappa,nadd_quanta"


def test_optimize_subcommand(tmp_path):
    rc = cli("optimize", "--config", CONFIG, "--omega-sw-opt", "0 omega_R",
             "--out", tmp_path)
    assert rc == 0
    doc = json.loads((tmp_path / "optimize_eta.json").read_text())
    assert doc["eta_closed_over_kappa"] == pytest.approx(0.6563, abs=2e-3)
    assert doc["n_add_numeric"] < 0.5


def test_figure_fig4(tmp_path):
    rc = cli("figure", "fig4", "--config", CONFIG, "--out", tmp_path)
    assert rc == 0
    lines = (tmp_path / "fig4_nadd_min.csv").read_text().splitlines()
    assert lines[0] == "kappa_rad_per_s,omega_sw_over_omega_R,n_add_min_0"
    assert len(lines) == 1 + 3 * 201
    assert (tmp_path / "fig4_manifest.json").exists()


def test_sweep_subcommand(tmp_path):
    rc = cli("sweep", "--config", CONFIG,
             "--axis", "omega_sw:0:5:3:omega_R",
             "--axis", "eta_max:0.1:1.5:11:kappa",
             "--observable", "nadd0", "--out", tmp_path)
    assert rc == 0
    lines = (tmp_path / "sweep_nadd0.csv").read_text().splitlines()
    assert len(lines) == 1 + 3 * 11


def test_simulate_divergence_exits_1(tmp_path, capsys):
    rc = cli("simulate", "--config", CONFIG, "--omega-sw", "0 omega_R",
             "--n-th-b", "1e14", "--n-traj", "16",
             "--t-settle", "2.5e-4", "--t-record", "1.3e-3", "--out", tmp_path)
    assert rc == 1
    assert "diverg" in capsys.readouterr().err.lower()


def test_alpha_and_eta_conflict_exits_2(tmp_path, capsys):
    rc = cli("derive", "--config", CONFIG, "--alpha-max", "1.0",
             "--eta-max", "0.5kappa", "--out", tmp_path)
    assert rc == 2
    err = capsys.readouterr().err
    assert "alpha_max" in err and "eta_max" in err
