import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biphoton_compression import analytics
from biphoton_compression.analytics import ComplexQuadraticForm
from biphoton_compression.core import ChirpPair, DispersionPair, GaussianBiphoton, from_correlation_time, initial_widths
from biphoton_compression.errors import DomainError, NumericError, UsageError

widths = st.floats(1.0, 1000.0)
depths = st.floats(-5.0, 5.0)


def state_and_chirp(tau1, ratio, d1, d2):
    state = GaussianBiphoton(tau1, tau1 * ratio)
    scale = state.tau1 * state.tau2
    return state, ChirpPair(d1 / scale, d2 / scale)


def brute_force_tc(state, chirp, disp):
    """Correlation time from sampling the final Gaussian on a fine 2-D mesh."""
    form = analytics.final_form(state, chirp, disp)
    cov = form.covariance()
    half = 8 * math.sqrt(max(np.linalg.eigvalsh(cov)))
    t = np.linspace(-half, half, 801)
    ts, ti = np.meshgrid(t, t, indexing="ij")
    m = form.m.real
    p = np.exp(-(m[0, 0] * ts**2 + 2 * m[0, 1] * ts * ti + m[1, 1] * ti**2))
    d = ts - ti
    return 2 * math.sqrt(np.sum(p * d * d) / np.sum(p))


def test_form_validation():
    with pytest.raises(DomainError):
        ComplexQuadraticForm(np.array([[1.0, 0.5], [0.2, 1.0]]))
    with pytest.raises(NumericError):
        ComplexQuadraticForm(np.array([[1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(DomainError):
        ComplexQuadraticForm(np.eye(3))
    f = ComplexQuadraticForm(np.eye(2))
    with pytest.raises(ValueError):
        f.m[0, 0] = 2.0


def test_unmodulated_state_widths_match_definition():
    state = GaussianBiphoton(12.0, 50.0)
    w = analytics.state_to_form(state).widths()
    ref = initial_widths(state)
    assert w.correlation_time == pytest.approx(ref.correlation_time, rel=1e-14)
    assert w.mean_time_width == pytest.approx(ref.mean_time_width, rel=1e-14)
    assert w.conditional_t1_width == pytest.approx(ref.conditional_t1_width, rel=1e-14)


def test_fourier_round_trip_and_domain_tag():
    form = analytics.apply_chirp(analytics.state_to_form(GaussianBiphoton(3.0, 9.0)), ChirpPair(0.02, -0.01))
    spec = form.fourier()
    assert spec.domain_tag == "frequency"
    assert np.allclose(spec.fourier().m, form.m, rtol=1e-13)
    with pytest.raises(UsageError):
        spec.widths()
    with pytest.raises(UsageError):
        analytics.apply_chirp(spec, ChirpPair())


def test_oracle_agrees_with_brute_force_integration():
    state = GaussianBiphoton(10.0, 40.0)
    chirp = ChirpPair(4e-3, -1e-3)
    disp = DispersionPair(150.0, -60.0)
    assert analytics.final_correlation_time_oracle(state, chirp, disp) == pytest.approx(
        brute_force_tc(state, chirp, disp), rel=1e-6
    )


@settings(max_examples=200, deadline=None)
@given(widths, st.floats(0.2, 10.0), depths, depths, st.floats(-2, 2), st.floats(-2, 2))
def test_closed_form_matches_oracle(tau1, ratio, d1, d2, b1, b2):
    state, chirp = state_and_chirp(tau1, ratio, d1, d2)
    disp = DispersionPair(b1 * state.tau1 * state.tau2, b2 * state.tau1 * state.tau2)
    oracle = analytics.final_correlation_time_oracle(state, chirp, disp)
    assert analytics.closed_form_correlation_time(state, chirp, disp) == pytest.approx(oracle, rel=1e-9)


def test_sum_first_reading_disagrees_with_oracle():
    state = GaussianBiphoton(10.0, 70.0)
    chirp = ChirpPair(3e-3, 1e-3)
    disp = DispersionPair(200.0, 50.0)
    oracle = analytics.final_correlation_time_oracle(state, chirp, disp)
    alt = analytics.closed_form_correlation_time(state, chirp, disp, convention="sum-first")
    assert abs(alt - oracle) / oracle > 1e-3
    with pytest.raises(DomainError):
        analytics.closed_form_correlation_time(state, chirp, disp, convention="other")


@settings(max_examples=100, deadline=None)
@given(widths, st.floats(0.2, 10.0), depths, depths)
def test_optimum_is_a_minimum(tau1, ratio, d1, d2):
    state, chirp = state_and_chirp(tau1, ratio, d1, d2)
    res = analytics.optimal_dispersion(state, chirp)
    b = res.beta_used
    assert analytics.final_correlation_time_oracle(state, chirp, b) == pytest.approx(res.final_correlation_time, rel=1e-9)
    step = 1e-2 * max(b.max_abs, state.tau1**2)
    for db in ((step, 0), (-step, 0), (0, step), (0, -step), (step, -step)):
        other = DispersionPair(b.beta_s + db[0], b.beta_i + db[1])
        assert analytics.final_correlation_time_oracle(state, chirp, other) >= res.final_correlation_time * (1 - 1e-12)
    assert res.compression_ratio >= 1 - 1e-12


@settings(max_examples=100, deadline=None)
@given(widths, st.floats(0.2, 10.0), depths, depths)
def test_optimal_ratio_formula_matches_oracle(tau1, ratio, d1, d2):
    state, chirp = state_and_chirp(tau1, ratio, d1, d2)
    x, y = chirp.mu_s * tau1**2, chirp.mu_i * tau1**2
    res = analytics.optimal_dispersion(state, chirp)
    assert analytics.optimal_ratio_from_chirps(ratio, x, y) == pytest.approx(res.compression_ratio, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(widths, st.floats(0.2, 10.0), depths, depths)
def test_exchange_symmetry(tau1, ratio, d1, d2):
    state, chirp = state_and_chirp(tau1, ratio, d1, d2)
    swapped = ChirpPair(chirp.mu_i, chirp.mu_s)
    a = analytics.optimal_dispersion(state, chirp)
    b = analytics.optimal_dispersion(state, swapped)
    assert a.compression_ratio == pytest.approx(b.compression_ratio, rel=1e-10)
    assert a.beta_used.beta_s == pytest.approx(b.beta_used.beta_i, rel=1e-8, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(widths, st.floats(0.2, 10.0), depths, depths, st.floats(-2, 2), st.floats(-2, 2))
def test_phase_and_dispersion_preserve_mean_time_under_antisymmetry(tau1, ratio, d1, d2, b1, b2):
    # chirp never changes time widths on its own
    state, chirp = state_and_chirp(tau1, ratio, d1, d2)
    w0 = initial_widths(state)
    w1 = analytics.final_form(state, chirp, DispersionPair()).widths()
    assert w1.correlation_time == pytest.approx(w0.correlation_time, rel=1e-12)
    assert w1.mean_time_width == pytest.approx(w0.mean_time_width, rel=1e-12)


def test_worked_example_numbers():
    state = from_correlation_time(63.3, 7.0)
    mu = analytics.chirp_for_ratio(state, 2.3)
    assert mu == pytest.approx(2.953814e-4, rel=1e-6)
    rc, beta = analytics.antisymmetric_optimum(state, mu)
    assert rc == pytest.approx(2.3, rel=1e-12)
    assert beta == pytest.approx(2745.48, abs=0.01)
    at_reported = analytics.compression_ratio(state, ChirpPair.antisymmetric(mu), DispersionPair.antisymmetric(2400.0))
    assert at_reported == pytest.approx(2.2256, abs=1e-4)
    assert analytics.classical_limit_ratio(63.3 / (2 * math.sqrt(2)), mu) == pytest.approx(1.04286, abs=1e-5)


def test_chirp_for_ratio_rejects_below_one():
    with pytest.raises(DomainError):
        analytics.chirp_for_ratio(GaussianBiphoton(1.0, 2.0), 0.5)


def test_no_chirp_needs_no_dispersion():
    res = analytics.optimal_dispersion(GaussianBiphoton(5.0, 20.0), ChirpPair())
    assert res.beta_used.max_abs == pytest.approx(0.0, abs=1e-9)
    assert res.compression_ratio == pytest.approx(1.0, rel=1e-12)


def test_ratio_surface_at_origin_and_antidiagonal():
    assert analytics.optimal_ratio_from_chirps(4.0, 0.0, 0.0) == pytest.approx(1.0)
    assert 1 / analytics.optimal_ratio_from_chirps(16.0, 1.0, -1.0) == pytest.approx(1 / math.sqrt(257), rel=1e-12)
    arr = analytics.optimal_ratio_from_chirps_array(4.0, np.array([0.5, 1.0]), np.array([-0.5, 2.0]))
    assert arr[0] == pytest.approx(math.sqrt(1 + 16 * 0.25))
    assert arr[1] == pytest.approx(analytics.optimal_ratio_from_chirps(4.0, 1.0, 2.0))


def test_large_ratio_limit():
    x, y = 0.7, -0.2
    assert analytics.optimal_ratio_from_chirps(1e4, x, y) == pytest.approx(analytics.large_ratio_approximation(x, y), rel=1e-4)


def test_width_independence_asymptote():
    # deep-chirp compressed width tends to 2 / (mu tau2) whatever tau1 is
    mu, tau2 = 1e-3, 1e5
    for tau1 in (5.0, 50.0):
        res = analytics.optimal_dispersion(GaussianBiphoton(tau1, tau2), ChirpPair.antisymmetric(mu))
        assert res.final_correlation_time == pytest.approx(2 / (mu * tau2), rel=1e-5)


def test_classical_limit_rejects_bad_tau():
    with pytest.raises(DomainError):
        analytics.classical_limit_ratio(0.0, 1e-3)
