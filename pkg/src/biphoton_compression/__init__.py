"""Nonlocal linear compression of Gaussian two-photon time correlations.

Three paths compute the same widths: closed-form expressions, an exact
complex-quadratic-form oracle, and an FFT grid engine.
"""
from .analytics import (
    ComplexQuadraticForm,
    CompressionResult,
    antisymmetric_optimum,
    chirp_for_ratio,
    classical_limit_ratio,
    closed_form_correlation_time,
    compression_ratio,
    final_correlation_time_oracle,
    final_form,
    optimal_dispersion,
    optimal_ratio_from_chirps,
    separable_state,
)
from .core import ChirpPair, DispersionPair, GaussianBiphoton, WidthReport, from_correlation_time, initial_widths
from .errors import (
    BiphotonError,
    DegeneracyError,
    DomainError,
    NoDipError,
    NumericError,
    PhysicsError,
    ResolutionError,
    UsageError,
)
from .grid import AmplitudeGrid, GridSpec, measure_widths, reduced_wigner, sample_state
from .hom import coherence_time, hom_curve
from .pipeline import Modulation, analytic_path, grid_path

__version__ = "0.1.0"
