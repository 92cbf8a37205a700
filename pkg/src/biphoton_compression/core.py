"""Gaussian biphoton state, chirp/dispersion pairs and width conventions.

Units are fixed library-wide: time in fs, angular frequency in rad/fs,
chirp rate in rad/fs**2 and dispersion in fs**2.

Rotated coordinates put the *difference* first::

    t1 = (t_s - t_i) / sqrt(2)      t2 = (t_s + t_i) / sqrt(2)

and the same rule is used for frequencies, chirp rates and dispersion
parameters. A state with width parameters ``tau1, tau2`` has the frequency
amplitude ``exp(-tau1**2 w1**2 / 2 - tau2**2 w2**2 / 2)`` and, with the
Fourier kernel ``A(t) ~ int f(w) exp(-i w t) dw``, the time amplitude
``exp(-t1**2 / (2 tau1**2) - t2**2 / (2 tau2**2))``.

Every width reported anywhere is ``2 * std`` of the corresponding
probability marginal, so the unmodulated state has correlation time
``2 * tau1`` and mean-time width ``2 * tau2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SQRT2 = math.sqrt(2.0)

# (t_s, t_i) -> (t1, t2); orthogonal and symmetric, so it is its own inverse.
ROTATION = np.array([[1.0, -1.0], [1.0, 1.0]]) / SQRT2


def to_rotated(a_s, a_i):
    """Return the (difference, sum) pair ``((a_s - a_i)/sqrt2, (a_s + a_i)/sqrt2)``."""
    return (a_s - a_i) / SQRT2, (a_s + a_i) / SQRT2


def from_rotated(a1, a2):
    """Inverse of :func:`to_rotated`."""
    return (a1 + a2) / SQRT2, (a2 - a1) / SQRT2


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class GaussianBiphoton:
    """Two-parameter Gaussian two-photon state.

    ``tau1`` sets the relative-time (difference) width and ``tau2`` the
    mean-time (sum) width, both in fs.
    """

    tau1: float
    tau2: float
    central_frequency: float | None = None  # metadata only, never used

    def __post_init__(self):
        for name in ("tau1", "tau2"):
            value = _finite(name, getattr(self, name))
            if value <= 0:
                raise DomainError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def ratio(self) -> float:
        """Entanglement ratio ``R = tau2 / tau1``."""
        return self.tau2 / self.tau1

    @property
    def is_separable(self) -> bool:
        return math.isclose(self.tau1, self.tau2, rel_tol=1e-12)


@dataclass(frozen=True)
class ChirpPair:
    """Linear chirp rates of signal and idler (rad/fs**2)."""

    mu_s: float = 0.0
    mu_i: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu_s", _finite("mu_s", self.mu_s))
        object.__setattr__(self, "mu_i", _finite("mu_i", self.mu_i))

    @classmethod
    def antisymmetric(cls, mu: float) -> "ChirpPair":
        return cls(mu, -mu)

    @property
    def rotated(self) -> tuple[float, float]:
        return to_rotated(self.mu_s, self.mu_i)

    @property
    def max_abs(self) -> float:
        return max(abs(self.mu_s), abs(self.mu_i))


@dataclass(frozen=True)
class DispersionPair:
    """Dispersion parameters of signal and idler (fs**2)."""

    beta_s: float = 0.0
    beta_i: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "beta_s", _finite("beta_s", self.beta_s))
        object.__setattr__(self, "beta_i", _finite("beta_i", self.beta_i))

    @classmethod
    def antisymmetric(cls, beta: float) -> "DispersionPair":
        return cls(beta, -beta)

    @property
    def rotated(self) -> tuple[float, float]:
        return to_rotated(self.beta_s, self.beta_i)

    @property
    def max_abs(self) -> float:
        return max(abs(self.beta_s), abs(self.beta_i))


@dataclass(frozen=True)
class WidthReport:
    """Widths (fs) in the ``2 * std`` convention.

    ``conditional_t1_width`` is the width of the ``t1`` distribution on the
    slice ``t2 = 0``.
    """

    correlation_time: float
    mean_time_width: float
    conditional_t1_width: float

    def __post_init__(self):
        for name in ("correlation_time", "mean_time_width", "conditional_t1_width"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be non-negative")

    def as_dict(self) -> dict:
        return {
            "correlation_time": self.correlation_time,
            "mean_time_width": self.mean_time_width,
            "conditional_t1_width": self.conditional_t1_width,
        }


def from_correlation_time(Tc: float, R: float) -> GaussianBiphoton:
    """Build the state with correlation time ``Tc`` (fs) and ratio ``R``."""
    Tc = _finite("Tc", Tc)
    R = _finite("R", R)
    if Tc <= 0 or R <= 0:
        raise DomainError(f"Tc and R must be positive, got Tc={Tc}, R={R}")
    return GaussianBiphoton(Tc / 2.0, R * Tc / 2.0)


def initial_widths(state: GaussianBiphoton) -> WidthReport:
    return WidthReport(
        correlation_time=2.0 * state.tau1,
        mean_time_width=2.0 * state.tau2,
        conditional_t1_width=SQRT2 * state.tau1,
    )
