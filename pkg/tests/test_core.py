import math

import numpy as np
import pytest

from biphoton_compression.core import (
    ChirpPair,
    DispersionPair,
    GaussianBiphoton,
    WidthReport,
    from_correlation_time,
    from_rotated,
    initial_widths,
    to_rotated,
)
from biphoton_compression.errors import DomainError


def test_rotation_puts_difference_first():
    a1, a2 = to_rotated(3.0, 1.0)
    assert a1 == pytest.approx(2.0 / math.sqrt(2))
    assert a2 == pytest.approx(4.0 / math.sqrt(2))
    assert np.allclose(from_rotated(a1, a2), (3.0, 1.0))


def test_initial_widths_follow_two_sigma_convention():
    w = initial_widths(GaussianBiphoton(10.0, 70.0))
    assert w.correlation_time == pytest.approx(20.0)
    assert w.mean_time_width == pytest.approx(140.0)
    assert w.conditional_t1_width == pytest.approx(10.0 * math.sqrt(2))


def test_from_correlation_time():
    s = from_correlation_time(63.3, 7.0)
    assert s.tau1 == pytest.approx(31.65)
    assert s.tau2 == pytest.approx(221.55)
    assert s.ratio == pytest.approx(7.0)


def test_separable_flag():
    assert GaussianBiphoton(5.0, 5.0).is_separable
    assert not GaussianBiphoton(5.0, 6.0).is_separable


@pytest.mark.parametrize("tau1,tau2", [(0.0, 1.0), (-1.0, 1.0), (1.0, math.inf), (math.nan, 1.0)])
def test_state_rejects_bad_widths(tau1, tau2):
    with pytest.raises(DomainError):
        GaussianBiphoton(tau1, tau2)


def test_pairs_reject_non_finite():
    with pytest.raises(DomainError):
        ChirpPair(math.nan, 0.0)
    with pytest.raises(DomainError):
        DispersionPair(0.0, math.inf)


def test_antisymmetric_helpers():
    c = ChirpPair.antisymmetric(2e-4)
    assert (c.mu_s, c.mu_i) == (2e-4, -2e-4)
    assert c.rotated[1] == pytest.approx(0.0)
    d = DispersionPair.antisymmetric(-100.0)
    assert d.max_abs == 100.0


def test_width_report_rejects_negative():
    with pytest.raises(DomainError):
        WidthReport(-1.0, 1.0, 1.0)


def test_from_correlation_time_rejects_nonpositive():
    with pytest.raises(DomainError):
        from_correlation_time(0.0, 7.0)
