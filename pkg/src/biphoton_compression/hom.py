"""Hong-Ou-Mandel dip of a sampled two-photon amplitude.

The normalised coincidence rate is ``1 - xi * Re O(tau)`` with the overlap

    O(tau) = int A(t1, t2) A*(sqrt2 tau - t1, t2) dt1 dt2.

In (signal, idler) coordinates the partner amplitude is
``A*(t_i + tau, t_s - tau)``: the exchanged amplitude shifted by ``tau``.
Both the exchange and the shift are exact in the frequency domain, where

    O(tau) ~ sum_w F(w_s, w_i) F*(w_i, w_s) exp(-i (w_s - w_i) tau),

so the spectrum is collapsed once onto the difference frequency and every
delay is a single dot product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError, NoDipError, UsageError
from .grid import AmplitudeGrid, to_frequency

IMAG_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class HomCurve:
    delays: np.ndarray  # fs
    rates: np.ndarray
    xi_used: float
    imag_max: float = 0.0

    @property
    def dip(self) -> np.ndarray:
        return 1.0 - self.rates

    @property
    def is_real(self) -> bool:
        """True when the overlap's imaginary part is negligible (exchange-symmetric input)."""
        return self.imag_max < IMAG_TOLERANCE

    def tails_converged(self, tol: float = 1e-3) -> bool:
        return bool(abs(self.rates[0] - 1.0) < tol and abs(self.rates[-1] - 1.0) < tol)


def _difference_spectrum(grid: AmplitudeGrid) -> tuple[np.ndarray, np.ndarray, float]:
    """``F(w_s, w_i) F*(w_i, w_s)`` summed along lines of constant ``w_s - w_i``."""
    spectral = to_frequency(grid) if grid.domain_tag == "time" else grid
    f = spectral.values
    p = f * f.T.conj()
    n = grid.n
    k = np.arange(n)
    offset = (k[:, None] - k[None, :] + (n - 1)).ravel()
    h = np.bincount(offset, weights=p.real.ravel(), minlength=2 * n - 1) + 1j * np.bincount(
        offset, weights=p.imag.ravel(), minlength=2 * n - 1
    )
    dw_values = (np.arange(2 * n - 1) - (n - 1)) * spectral.dw
    return h, dw_values, spectral.dw


def hom_curve(grid: AmplitudeGrid, delays: Sequence[float], xi: Optional[float] = None) -> HomCurve:
    """Normalised coincidence rate at each delay (fs).

    ``xi`` defaults to the perfect-visibility value ``1 / int |A|^2``, which
    makes the rate vanish at zero delay for an exchange-symmetric
    unmodulated state. Rates are clipped at zero.
    """
    if grid.domain_tag != "time":
        raise UsageError("hom_curve expects a time-domain grid")
    delays = np.asarray(delays, dtype=float)
    if delays.ndim != 1 or delays.size == 0:
        raise UsageError("delays must be a non-empty 1-D sequence")
    half = grid.n * grid.dt / 2.0
    if np.any(np.abs(delays) > half):
        raise DomainError(f"delays must lie within +/-{half:.6g} fs (the grid half-extent)")
    h, dw_values, dw = _difference_spectrum(grid)
    overlap = (np.exp(-1j * np.outer(delays, dw_values)) @ h) * dw * dw
    xi_used = 1.0 / grid.norm() if xi is None else float(xi)
    if not xi_used > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    rates = np.clip(1.0 - xi_used * overlap.real, 0.0, None)
    return HomCurve(delays, rates, xi_used, float(np.max(np.abs(xi_used * overlap.imag))))


def coherence_time(curve: HomCurve) -> float:
    """Two-photon coherence time: ``2 * std`` of the dip ``1 - R_n`` as a density in delay."""
    d = curve.dip
    tau = curve.delays
    if tau.size < 3:
        raise NoDipError("need at least three delays")
    mass = trapezoid(d, tau)
    if not mass > 0 or np.max(d) <= 1e-12:
        raise NoDipError("curve has no dip")
    mean = trapezoid(d * tau, tau) / mass
    var = trapezoid(d * (tau - mean) ** 2, tau) / mass
    if not var > 0:
        raise NoDipError("dip has zero width")
    return 2.0 * math.sqrt(var)


def dip_fwhm(curve: HomCurve) -> float:
    """Full width at half depth of the dip, by linear interpolation (auxiliary)."""
    d = curve.dip
    tau = curve.delays
    k = int(np.argmax(d))
    half = d[k] / 2.0
    if d[k] <= 0:
        raise NoDipError("curve has no dip")
    left = np.nonzero(d[:k] < half)[0]
    right = np.nonzero(d[k:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise NoDipError("dip not resolved within the delay range")
    i = left[-1]
    j = k + right[0]
    t_left = np.interp(half, [d[i], d[i + 1]], [tau[i], tau[i + 1]])
    t_right = np.interp(half, [d[j], d[j - 1]], [tau[j], tau[j - 1]])
    return float(t_right - t_left)


def write_hom_csv(curve: HomCurve, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("tau_fs,Rn\n")
        for t, r in zip(curve.delays, curve.rates):
            fh.write(f"{t:.9g},{r:.9g}\n")
    return path


def read_hom_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]
