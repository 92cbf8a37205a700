import math

import numpy as np
import pytest

from biphoton_compression import analytics
from biphoton_compression.core import ChirpPair, GaussianBiphoton
from biphoton_compression.errors import DomainError, NoDipError, UsageError
from biphoton_compression.grid import GridSpec, sample_state, to_frequency
from biphoton_compression.hom import HomCurve, coherence_time, dip_fwhm, hom_curve, read_hom_csv, write_hom_csv
from biphoton_compression.pipeline import Modulation, grid_path


@pytest.fixture(scope="module")
def grid():
    return sample_state(GaussianBiphoton(10.0, 50.0), GridSpec())


def test_unchirped_dip_is_gaussian(grid):
    delays = np.linspace(-60, 60, 241)
    curve = hom_curve(grid, delays)
    assert np.allclose(curve.rates, 1 - np.exp(-(delays**2) / (2 * 10.0**2)), atol=1e-9)
    assert curve.is_real
    assert curve.tails_converged()
    assert curve.rates[120] == pytest.approx(0.0, abs=1e-12)


def test_coherence_time_and_fwhm(grid):
    curve = hom_curve(grid, np.linspace(-100, 100, 2001))
    assert coherence_time(curve) == pytest.approx(20.0, rel=1e-6)
    assert dip_fwhm(curve) == pytest.approx(2 * math.sqrt(2 * math.log(2)) * 10.0, rel=1e-4)


def test_visibility_scales_with_xi(grid):
    curve = hom_curve(grid, [0.0], xi=0.5 / grid.norm())
    assert curve.rates[0] == pytest.approx(0.5, abs=1e-9)


def test_compressed_dip_narrows_by_rc():
    state = GaussianBiphoton(10.0, 70.0)
    chirp = ChirpPair.antisymmetric(analytics.chirp_for_ratio(state, 3.0))
    out = grid_path(state, Modulation.quadratic(chirp))
    delays = np.linspace(-80, 80, 1601)
    ratio = coherence_time(hom_curve(out.initial, delays)) / coherence_time(hom_curve(out.final, delays))
    assert ratio == pytest.approx(3.0, rel=0.02)


def test_chirp_alone_breaks_exchange_symmetry(grid):
    from biphoton_compression.grid import apply_chirp_grid

    chirped = apply_chirp_grid(grid, 2e-3, -1e-3)
    curve = hom_curve(chirped, np.linspace(-50, 50, 101))
    assert np.all(curve.rates >= 0)


def test_input_validation(grid):
    with pytest.raises(UsageError):
        hom_curve(grid, [])
    with pytest.raises(UsageError):
        hom_curve(to_frequency(grid), [0.0])
    with pytest.raises(DomainError):
        hom_curve(grid, [1e9])
    with pytest.raises(DomainError):
        hom_curve(grid, [0.0], xi=-1.0)


def test_flat_curve_has_no_dip():
    flat = HomCurve(np.linspace(-1, 1, 11), np.ones(11), 1.0)
    with pytest.raises(NoDipError):
        coherence_time(flat)
    with pytest.raises(NoDipError):
        dip_fwhm(flat)


def test_csv_round_trip(tmp_path, grid):
    curve = hom_curve(grid, np.linspace(-30, 30, 61))
    path = write_hom_csv(curve, tmp_path / "hom.csv")
    assert path.read_text().splitlines()[0] == "tau_fs,Rn"
    tau, rn = read_hom_csv(path)
    assert np.allclose(tau, curve.delays)
    assert np.allclose(rn, curve.rates, atol=1e-8)
