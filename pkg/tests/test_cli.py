import json
import math

import numpy as np
import pytest

from biphoton_compression.cli import EXIT_OK, EXIT_PHYSICS, EXIT_USAGE, main, run_worked_example
from biphoton_compression.config import ConfigError, load_config
from biphoton_compression.grid import GridSpec, read_grid_dump
from biphoton_compression.modulators import SinusoidalPhase, TabulatedPhase, write_tabulated_csv

EXAMPLE_INI = """
[state]
Tc_fs = 63.3
R = 7

[chirp]
mu_s = 2.953814e-4
mu_i = -2.953814e-4

[dispersion]
beta = optimal
"""


@pytest.fixture
def example_ini(tmp_path):
    path = tmp_path / "example.ini"
    path.write_text(EXAMPLE_INI)
    return path


def run(*argv):
    return main([str(a) for a in argv])


def test_compress_report(tmp_path, example_ini):
    out = tmp_path / "out"
    assert run("compress", "--config", example_ini, "--out", out) == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["analytic"]["compression_ratio"] == pytest.approx(2.3, rel=1e-6)
    assert report["grid"]["compression_ratio"] == pytest.approx(2.3, rel=5e-3)
    assert max(report["deviation"].values()) < 5e-3
    beta = report["beta_used"]
    assert beta["mode"] == "optimal"
    tau1, tau2, mu = 31.65, 221.55, 2.953814e-4
    assert beta["beta_s"] == pytest.approx(mu * tau1**2 * tau2**2 / (mu**2 * tau1**2 * tau2**2 + 1), rel=1e-9)
    assert beta["beta_i"] == pytest.approx(-beta["beta_s"], rel=1e-9)


def test_zero_modulation_gives_unit_ratio(tmp_path):
    cfg = tmp_path / "zero.ini"
    cfg.write_text("[state]\nTc_fs = 50\nR = 3\n[chirp]\nmu_s = 0\nmu_i = 0\n[dispersion]\nbeta_s = 0\nbeta_i = 0\n")
    assert run("compress", "--config", cfg, "--out", tmp_path) == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["analytic"]["compression_ratio"] == 1.0
    assert report["grid"]["compression_ratio"] == pytest.approx(1.0, rel=1e-9)


def test_config_round_trip(tmp_path, example_ini):
    assert run("compress", "--config", example_ini, "--out", tmp_path / "a") == EXIT_OK
    first = json.loads((tmp_path / "a" / "report.json").read_text())
    assert run("compress", "--config", tmp_path / "a" / "report.json", "--out", tmp_path / "b") == EXIT_OK
    second = json.loads((tmp_path / "b" / "report.json").read_text())
    assert first == second
    ini = load_config(example_ini).to_ini()
    (tmp_path / "again.ini").write_text(ini)
    assert load_config(tmp_path / "again.ini").sections() == load_config(example_ini).sections()


def test_outputs_are_byte_identical(tmp_path, example_ini):
    for name in ("a", "b"):
        out = tmp_path / name
        assert run("compress", "--config", example_ini, "--out", out, "--dump-grid") == EXIT_OK
        assert run("hom", "--config", example_ini, "--out", out, "--n", 101) == EXIT_OK
        assert run("surface", "--R", 4, "--n", 21, "--out", out) == EXIT_OK
    for path in sorted((tmp_path / "a").iterdir()):
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes(), path.name


def test_grid_dump_written(tmp_path, example_ini):
    assert run("compress", "--config", example_ini, "--out", tmp_path, "--dump-grid") == EXIT_OK
    header, data = read_grid_dump(tmp_path / "grid_final.csv")
    assert header["domain"] == "time"
    assert data.shape == (header["n"], header["n"])
    assert data.sum() * header["dt"] ** 2 == pytest.approx(1.0, rel=1e-6)


def test_env_var_sets_default_output(tmp_path, example_ini, monkeypatch):
    monkeypatch.setenv("BIPHOTON_OUT_DIR", str(tmp_path / "env"))
    assert run("surface", "--R", 1, "--n", 16) == EXIT_OK
    assert (tmp_path / "env" / "surface_R1_closed-form.csv").exists()


def test_hom_outputs(tmp_path, example_ini):
    assert run("hom", "--config", example_ini, "--out", tmp_path) == EXIT_OK
    report = json.loads((tmp_path / "hom_report.json").read_text())
    assert report["coherence_compression_ratio"] == pytest.approx(report["correlation_compression_ratio"], rel=0.02)
    assert (tmp_path / "hom_initial.csv").read_text().startswith("tau_fs,Rn\n")


def test_hom_empty_delay_list_is_usage_error(tmp_path, example_ini):
    assert run("hom", "--config", example_ini, "--out", tmp_path, "--n", 0) == EXIT_USAGE


def test_worked_example_command(tmp_path):
    assert run("paper-example", "--out", tmp_path) == EXIT_OK
    report = json.loads((tmp_path / "worked_example.json").read_text())
    b = report["biphoton"]
    assert b["compression_ratio"] == pytest.approx(2.3, rel=1e-6)
    assert b["optimal_beta_fs2"] == pytest.approx(2745.5, abs=0.5)
    assert b["reported_beta_fs2"] == 2400.0
    assert "surrogate" in b["beta_note"]
    assert abs(b["ratio_at_reported_beta"] - 2.3) / 2.3 < 0.15
    assert report["pulses"]["compression_ratio"] == pytest.approx(1.04286, abs=1e-4)
    assert report["grid"]["compression_ratio"] == pytest.approx(2.3, rel=5e-3)
    assert abs(report["grid"]["revival_modulator_ratio"] - 2.3) / 2.3 < 0.15
    table = np.loadtxt(tmp_path / "conditional_t1_analytic.csv", delimiter=",", skiprows=1)
    step = table[1, 0] - table[0, 0]
    assert table[:, 1:].sum(axis=0) * step == pytest.approx([1, 1, 1], rel=1e-3)
    # compressed biphoton distribution is taller than both others
    assert table[:, 2].max() > table[:, 1].max() and table[:, 2].max() > table[:, 3].max()


def test_worked_example_analytic_only():
    report, tables = run_worked_example(GridSpec(), "analytic")
    assert "grid" not in report
    assert list(tables) == ["conditional_t1_analytic.csv"]


def test_modulator_check(tmp_path, capsys):
    assert run("modulator-check", "--model", "sinusoidal", "--phi0", 10, "--omega-m", 0.01, "--window", 100, "--out", tmp_path) == 0
    text = capsys.readouterr().out
    assert "local chirp: -0.001" in text and "pass" in text
    report = json.loads((tmp_path / "modulator_check.json").read_text())
    assert 0 < report["compressible_window_fs"] < math.inf
    assert run("modulator-check", "--model", "quadratic", "--mu", 1e-3) == 0
    assert "compressible window: inf" in capsys.readouterr().out


def test_modulator_check_tabulated(tmp_path, capsys):
    table = TabulatedPhase.from_profile(SinusoidalPhase(10.0, 0.01), np.arange(-2000.0, 2002.0, 2.0))
    path = write_tabulated_csv(table, tmp_path / "phi.csv")
    assert run("modulator-check", "--model", "tabulated", "--table", path) == 0
    line = [l for l in capsys.readouterr().out.splitlines() if l.startswith("local chirp")][0]
    assert float(line.split()[2]) == pytest.approx(-1e-3, rel=1e-3)


def test_profiles_from_config(tmp_path):
    # a period far beyond the state width keeps the modulation quadratic
    table = TabulatedPhase.from_profile(SinusoidalPhase(-800.0, 1e-3), np.arange(-6000.0, 6002.0, 2.0))
    write_tabulated_csv(table, tmp_path / "phi.csv")
    cfg = tmp_path / "mod.ini"
    cfg.write_text(
        "[state]\nTc_fs = 63.3\nR = 7\n"
        "[chirp.signal]\nmodel = tabulated\npath = phi.csv\n"
        "[chirp.idler]\nmodel = revival_toy\nbumps = 295.3814:0:1000\n"
        "[dispersion]\nbeta = optimal\n"
    )
    assert run("compress", "--config", cfg, "--out", tmp_path / "o") == EXIT_OK
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["chirp"]["mu_s"] == pytest.approx(8e-4, rel=1e-3)
    assert report["grid"]["quadratic_modulation"] is False
    assert report["grid"]["compression_ratio"] == pytest.approx(report["analytic"]["compression_ratio"], rel=0.05)
    assert run("modulator-check", "--config", cfg, "--photon", "idler") == EXIT_OK


def test_exit_codes(tmp_path, example_ini):
    assert run("compress", "--config", tmp_path / "missing.ini") == EXIT_USAGE
    bad = tmp_path / "bad.ini"
    bad.write_text("[state]\nTc_fs = -1\nR = 7\n[chirp]\nmu_s = 0\nmu_i = 0\n")
    assert run("compress", "--config", bad) == EXIT_USAGE
    assert run("compress", "--config", example_ini, "--grid-n", 100) == EXIT_USAGE
    assert run("compress", "--config", example_ini, "--grid-n", 64, "--out", tmp_path) == EXIT_PHYSICS
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == EXIT_USAGE
    assert run("modulator-check") == EXIT_USAGE


@pytest.mark.parametrize(
    "text",
    [
        "[chirp]\nmu_s = 0\n",
        "[state]\nTc_fs = abc\nR = 7\n[chirp]\nmu_s = 0\n",
        "[state]\nTc_fs = 50\nR = 7\n[chirp.signal]\nmodel = quadratic\nmu = 1e-3\n",
        "[state]\nTc_fs = 50\nR = 7\n[chirp.signal]\nmodel = cubic\n[chirp.idler]\nmodel = cubic\n",
        "[state]\nTc_fs = 50\nR = 7\n[chirp]\nmu_s = 0\n[dispersion]\nbeta = best\n",
        "[state]\nTc_fs = 50\nR = 7\n[chirp]\nmu_s = 0\n[grid]\nn = 100\n",
        "[state]\nTc_fs = 50\nR = 7\n[chirp.signal]\nmodel = revival_toy\nbumps = 1:2\n[chirp.idler]\nmodel = quadratic\nmu = 0\n",
        "not an ini file",
    ],
)
def test_invalid_configs(tmp_path, text):
    path = tmp_path / "c.ini"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)
