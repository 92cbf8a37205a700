"""Run one modulation + dispersion pipeline along the analytic and grid paths."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import analytics
from .core import ChirpPair, DispersionPair, GaussianBiphoton, WidthReport, initial_widths
from .errors import DomainError
from .grid import AmplitudeGrid, GridSpec, apply_dispersion_grid, apply_phase, measure_widths, sample_state
from .modulators import PhaseProfile, QuadraticPhase, local_chirp


@dataclass(frozen=True)
class Modulation:
    """Phase profiles for both photons plus the chirp the analytic path uses.

    Built from a :class:`ChirpPair` the profiles are exact quadratics; built
    from profiles the chirp is their local curvature at ``t_ref``.
    """

    phi_s: PhaseProfile
    phi_i: PhaseProfile
    chirp: ChirpPair

    @classmethod
    def quadratic(cls, chirp: ChirpPair) -> "Modulation":
        return cls(QuadraticPhase(chirp.mu_s), QuadraticPhase(chirp.mu_i), chirp)

    @classmethod
    def from_profiles(cls, phi_s: PhaseProfile, phi_i: PhaseProfile, t_ref: float = 0.0) -> "Modulation":
        return cls(phi_s, phi_i, ChirpPair(local_chirp(phi_s, t_ref), local_chirp(phi_i, t_ref)))

    @property
    def is_quadratic(self) -> bool:
        return isinstance(self.phi_s, QuadraticPhase) and isinstance(self.phi_i, QuadraticPhase)

    def max_curvature(self, half_span: float) -> float:
        """Largest ``|phi''|`` of either profile over ``[-half_span, half_span]``."""
        if self.is_quadratic:
            return self.chirp.max_abs
        t = np.linspace(-half_span, half_span, 2001)
        worst = 0.0
        for phi in (self.phi_s, self.phi_i):
            try:
                worst = max(worst, float(np.max(np.abs(phi.second_derivative(t)))))
            except DomainError:  # tabulated profiles may not cover the span
                worst = max(worst, abs(local_chirp(phi, 0.0)))
        return worst


@dataclass(frozen=True)
class AnalyticOutcome:
    initial: WidthReport
    final: WidthReport
    beta: DispersionPair

    @property
    def compression_ratio(self) -> float:
        return self.initial.correlation_time / self.final.correlation_time


@dataclass(frozen=True, eq=False)
class GridOutcome:
    initial: AmplitudeGrid
    final: AmplitudeGrid
    beta: DispersionPair

    @property
    def initial_widths(self) -> WidthReport:
        return measure_widths(self.initial)

    @property
    def final_widths(self) -> WidthReport:
        return measure_widths(self.final)

    @property
    def compression_ratio(self) -> float:
        return self.initial_widths.correlation_time / self.final_widths.correlation_time


def resolve_dispersion(state: GaussianBiphoton, chirp: ChirpPair, disp: Optional[DispersionPair]) -> DispersionPair:
    """``None`` means the optimal pair for this chirp."""
    if disp is None:
        return analytics.optimal_dispersion(state, chirp).beta_used
    return disp


def analytic_path(state: GaussianBiphoton, chirp: ChirpPair, disp: Optional[DispersionPair] = None) -> AnalyticOutcome:
    beta = resolve_dispersion(state, chirp, disp)
    final = analytics.final_form(state, chirp, beta).widths()
    return AnalyticOutcome(initial_widths(state), final, beta)


def grid_path(
    state: GaussianBiphoton,
    modulation: Modulation,
    disp: Optional[DispersionPair] = None,
    spec: GridSpec = GridSpec(),
) -> GridOutcome:
    beta = resolve_dispersion(state, modulation.chirp, disp)
    half_span = spec.extent_sigmas * max(state.tau1, state.tau2) / 2.0
    mu_max = modulation.max_curvature(half_span)
    g0 = sample_state(state, spec, mu_max=mu_max, beta_max=beta.max_abs)
    g1 = apply_phase(g0, modulation.phi_s, modulation.phi_i)
    g2 = apply_dispersion_grid(g1, beta)
    return GridOutcome(g0, g2, beta)


def relative_deviation(a: float, b: float) -> float:
    return abs(a - b) / abs(b)
