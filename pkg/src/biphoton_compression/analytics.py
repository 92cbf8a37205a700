"""Exact Gaussian engine.

A pure Gaussian two-photon amplitude is ``exp(-x^T M x / 2)`` with
``x = (t_s, t_i)`` and ``M`` complex symmetric. Chirping subtracts
``i diag(mu_s, mu_i)`` from ``M``; dispersion is a multiplication in the
frequency domain, which for Gaussians is the closed-form map
``M -> (M^-1 - i diag(beta_s, beta_i))^-1``. The probability density is
``exp(-x^T Re(M) x)`` so its covariance is ``(2 Re M)^-1``. This route is
the library's ground truth (:func:`final_correlation_time_oracle`).

The closed forms (correlation time, optimal compression ratios, the
separable limit) live next to it so they can be checked against it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import (
    ROTATION,
    ChirpPair,
    DispersionPair,
    GaussianBiphoton,
    WidthReport,
    initial_widths,
)
from .errors import DegeneracyError, DomainError, NumericError, UsageError

Domain = Literal["time", "frequency"]

_DIFF = np.array([1.0, -1.0])
_SUM = np.array([1.0, 1.0])


@dataclass(frozen=True, eq=False)
class ComplexQuadraticForm:
    """``exp(-x^T m x / 2)`` in the (signal, idler) basis.

    ``m`` has units fs**-2 in the time domain and fs**2 in the frequency
    domain.
    """

    m: np.ndarray
    domain_tag: Domain = "time"

    def __post_init__(self):
        m = np.array(self.m, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NumericError("quadratic form has non-finite entries")
        scale = np.max(np.abs(m))
        if abs(m[0, 1] - m[1, 0]) > 1e-12 * scale:
            raise DomainError("quadratic form must be symmetric")
        m[1, 0] = m[0, 1]
        if self.domain_tag not in ("time", "frequency"):
            raise DomainError(f"unknown domain tag {self.domain_tag!r}")
        eig = np.linalg.eigvalsh(m.real)
        if eig[0] <= 1e-14 * max(abs(eig[1]), 1e-300):
            raise NumericError("real part of the form is not positive definite")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def rotated(self) -> np.ndarray:
        """Matrix in the (difference, sum) basis."""
        return ROTATION @ self.m @ ROTATION.T

    def covariance(self) -> np.ndarray:
        """Covariance of the probability density ``|A|^2`` in this domain."""
        return np.linalg.inv(2.0 * self.m.real)

    def fourier(self) -> "ComplexQuadraticForm":
        """Switch domain. The Gaussian transform of ``M`` is ``M^-1``."""
        other = "frequency" if self.domain_tag == "time" else "time"
        return ComplexQuadraticForm(_safe_inv(self.m), other)

    def widths(self) -> WidthReport:
        if self.domain_tag != "time":
            raise UsageError("widths are defined for time-domain forms")
        cov = self.covariance()
        q11 = self.rotated.real[0, 0]
        return WidthReport(
            correlation_time=2.0 * math.sqrt(_DIFF @ cov @ _DIFF),
            mean_time_width=2.0 * math.sqrt(_SUM @ cov @ _SUM),
            conditional_t1_width=2.0 / math.sqrt(2.0 * q11),
        )

    def wigner_moments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Second moments ``(S_tt, S_tw, S_ww)`` of the chronocyclic Wigner function.

        Only valid in the time domain. ``S_tw[j, k] = E[t_j w_k]``.
        """
        if self.domain_tag != "time":
            raise UsageError("Wigner moments are computed from a time-domain form")
        a_im = self.m.imag
        s_tt = self.covariance()
        # local frequency is Im(M) t for the exp(-i w t) kernel
        s_tw = s_tt @ a_im
        # equals a_im @ s_tt @ a_im + Re(m) / 2, but without the cancellation
        # that form suffers when the chirp dominates
        s_ww = np.linalg.inv(2.0 * _safe_inv(self.m).real)
        s_ww = 0.5 * (s_ww + s_ww.T)
        return s_tt, s_tw, s_ww


@dataclass(frozen=True)
class CompressionResult:
    final_correlation_time: float
    compression_ratio: float
    beta_used: DispersionPair


def _safe_inv(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) <= 1e-300 or abs(det) < 1e-13 * np.max(np.abs(m)) ** 2:
        raise NumericError("singular quadratic form")
    return np.linalg.inv(m)


def state_to_form(state: GaussianBiphoton) -> ComplexQuadraticForm:
    diag = np.diag([1.0 / state.tau1**2, 1.0 / state.tau2**2])
    return ComplexQuadraticForm(ROTATION.T @ diag @ ROTATION, "time")


def apply_chirp(form: ComplexQuadraticForm, chirp: ChirpPair) -> ComplexQuadraticForm:
    """Multiply the amplitude by ``exp(i (mu_s t_s^2 + mu_i t_i^2) / 2)``."""
    if form.domain_tag != "time":
        raise UsageError("chirp acts on a time-domain form")
    return ComplexQuadraticForm(form.m - 1j * np.diag([chirp.mu_s, chirp.mu_i]), "time")


def apply_dispersion(form: ComplexQuadraticForm, disp: DispersionPair) -> ComplexQuadraticForm:
    """Multiply the frequency amplitude by ``exp(i (b_s w_s^2 + b_i w_i^2) / 2)``."""
    if form.domain_tag != "time":
        raise UsageError("apply_dispersion expects a time-domain form")
    if disp.beta_s == 0.0 and disp.beta_i == 0.0:
        return form
    spectral = _safe_inv(form.m) - 1j * np.diag([disp.beta_s, disp.beta_i])
    return ComplexQuadraticForm(_safe_inv(spectral), "time")


def final_form(state: GaussianBiphoton, chirp: ChirpPair, disp: DispersionPair) -> ComplexQuadraticForm:
    return apply_dispersion(apply_chirp(state_to_form(state), chirp), disp)


def final_correlation_time_oracle(state: GaussianBiphoton, chirp: ChirpPair, disp: DispersionPair) -> float:
    """Correlation time after modulation and dispersion, by covariance propagation."""
    return final_form(state, chirp, disp).widths().correlation_time


def closed_form_correlation_time(
    state: GaussianBiphoton,
    chirp: ChirpPair,
    disp: DispersionPair,
    convention: Literal["difference-first", "sum-first"] = "difference-first",
) -> float:
    """Closed-form correlation time after modulation and dispersion.

    ``convention`` picks how the rotated chirp/dispersion pairs are indexed.
    ``"difference-first"`` (index 1 = ``(s_s - s_i)/sqrt2``) matches the
    covariance oracle and the frequency rotation; ``"sum-first"`` is the
    alternative reading and is kept only to document that it disagrees.
    See ``docs/conventions.md``.
    """
    if convention == "difference-first":
        mu1, mu2 = chirp.rotated
        b1, b2 = disp.rotated
    elif convention == "sum-first":
        mu2, mu1 = chirp.rotated
        b2, b1 = disp.rotated
    else:
        raise DomainError(f"unknown convention {convention!r}")
    t = (state.tau1, state.tau2)
    mus = (mu1, mu2)
    betas = (b1, b2)
    total = t[0] ** 2
    for j in range(2):
        tj, to = t[j], t[1 - j]
        total += 0.5 * betas[j] ** 2 * (1.0 / to**2 + 0.5 * (mus[0] ** 2 * tj**2 + mus[1] ** 2 * to**2))
    total -= (b1 * mu1 + b2 * mu2) * t[0] ** 2
    total += 0.5 * b1 * b2 * mu1 * mu2 * (t[0] ** 2 + t[1] ** 2)
    if total < 0:
        raise NumericError(f"closed form gave a negative variance ({total})")
    return 2.0 * math.sqrt(total)


def optimal_dispersion(state: GaussianBiphoton, chirp: ChirpPair) -> CompressionResult:
    """Dispersion pair minimising the final correlation time.

    With the post-chirp Wigner moments, dispersion shears ``t -> t + B w``,
    so ``Var(t_s - t_i)`` is an exact quadratic in ``(beta_s, beta_i)``:
    ``c + g.b + b.H.b / 2``. The stationary point is returned once ``H`` is
    confirmed positive definite.
    """
    form = apply_chirp(state_to_form(state), chirp)
    s_tt, s_tw, s_ww = form.wigner_moments()
    d = np.diag(_DIFF)
    hess = 2.0 * d @ s_ww @ d
    grad = 2.0 * d @ s_tw.T @ _DIFF
    eig = np.linalg.eigvalsh(hess)
    if eig[0] <= 1e-12 * abs(eig[1]):
        raise DegeneracyError(f"dispersion optimum is not unique (Hessian eigenvalues {eig})")
    beta = -np.linalg.solve(hess, grad)
    disp = DispersionPair(float(beta[0]), float(beta[1]))
    # evaluating the quadratic at its minimum cancels badly; propagate instead
    final = apply_dispersion(form, disp).widths().correlation_time
    return CompressionResult(
        final_correlation_time=final,
        compression_ratio=initial_widths(state).correlation_time / final,
        beta_used=disp,
    )


def compression_ratio(state: GaussianBiphoton, chirp: ChirpPair, disp: DispersionPair) -> float:
    """Initial over final correlation time for a given dispersion pair."""
    return 2.0 * state.tau1 / final_correlation_time_oracle(state, chirp, disp)


def antisymmetric_optimum(state: GaussianBiphoton, mu: float) -> tuple[float, float]:
    """``(Rc_opt, beta)`` in closed form for ``mu_s = -mu_i = mu``.

    The optimum dispersion is ``beta_s = -beta_i = beta``.
    """
    k = (mu * state.tau1 * state.tau2) ** 2
    beta = mu * state.tau1**2 * state.tau2**2 / (k + 1.0)
    return math.sqrt(1.0 + k), beta


def chirp_for_ratio(state: GaussianBiphoton, ratio: float) -> float:
    """Antisymmetric chirp rate whose optimal compression ratio is ``ratio``."""
    if ratio < 1:
        raise DomainError(f"compression ratio must be >= 1, got {ratio}")
    return math.sqrt(ratio**2 - 1.0) / (state.tau1 * state.tau2)


def optimal_ratio_from_chirps(R: float, x: float, y: float) -> float:
    """Compression ratio at optimal dispersion from the dimensionless chirps.

    ``x = mu_s tau1**2`` and ``y = mu_i tau1**2``.
    """
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    r2 = R * R
    s = x + y
    p = 1.0 - r2 * x * y
    num = (1.0 + r2) ** 2 * s * s + 4.0 * p * p
    den = r2 * (1.0 + r2) * s * s + 4.0 * p
    if den <= 0:
        raise DomainError(f"non-positive denominator at R={R}, x={x}, y={y}")
    return math.sqrt(num / den)


def optimal_ratio_from_chirps_array(R: float, x, y) -> np.ndarray:
    """Vectorised :func:`optimal_ratio_from_chirps`; invalid cells become NaN."""
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = R * R
    s = x + y
    p = 1.0 - r2 * x * y
    num = (1.0 + r2) ** 2 * s * s + 4.0 * p * p
    den = r2 * (1.0 + r2) * s * s + 4.0 * p
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, np.sqrt(num / den), np.nan)


def large_ratio_approximation(x: float, y: float) -> float:
    """Limit of the optimal compression ratio for ``R >> 1``."""
    s = x + y
    if s == 0:
        return math.inf if x * y != 0 else 1.0
    return math.sqrt(1.0 + 4.0 * x * x * y * y / (s * s))


def classical_limit_ratio(tau: float, mu: float) -> float:
    """Optimal compression ratio of two independent pulses of rms width ``tau``."""
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    return math.sqrt(1.0 + 4.0 * mu * mu * tau**4)


def separable_state(tau: float) -> GaussianBiphoton:
    """Product of two pulses with intensity rms width ``tau``."""
    return GaussianBiphoton(math.sqrt(2.0) * tau, math.sqrt(2.0) * tau)


__all__ = [
    "ComplexQuadraticForm",
    "CompressionResult",
    "antisymmetric_optimum",
    "apply_chirp",
    "apply_dispersion",
    "chirp_for_ratio",
    "classical_limit_ratio",
    "compression_ratio",
    "closed_form_correlation_time",
    "optimal_ratio_from_chirps",
    "optimal_ratio_from_chirps_array",
    "final_correlation_time_oracle",
    "final_form",
    "large_ratio_approximation",
    "optimal_dispersion",
    "separable_state",
    "state_to_form",
]
