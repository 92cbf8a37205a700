"""Sampled two-photon amplitude on an ``n x n`` grid.

Axis 0 is the signal, axis 1 the idler. Both axes share the sampling
``t_k = (k - n/2) dt`` so the centre sample sits exactly at zero and the
anti-diagonal ``k_s + k_i = n`` is exactly the slice ``t_s + t_i = 0``.

Frequency-domain grids hold ``F`` with ``A(t) = sum F(w) exp(-i w t)``,
scaled so that ``sum |F|^2 dw^2 == sum |A|^2 dt^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal, Optional

import numpy as np

from .analytics import ComplexQuadraticForm
from .core import SQRT2, DispersionPair, GaussianBiphoton, WidthReport
from .errors import DomainError, NumericError, ResolutionError, UsageError

Domain = Literal["time", "frequency"]
Phase = Optional[Callable[[np.ndarray], np.ndarray]]

EDGE_CELLS = 2
EDGE_TOLERANCE = 1e-6
MIN_N = 64


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _next_pow2(x: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(x, 1.0))))


@dataclass(frozen=True)
class GridSpec:
    """Sampling request. ``n=None`` lets :func:`sample_state` pick the size."""

    n: Optional[int] = None
    extent_sigmas: float = 8.0
    oversample: float = 4.0

    def __post_init__(self):
        if self.n is not None and (self.n < MIN_N or not _is_pow2(self.n)):
            raise DomainError(f"n must be a power of two >= {MIN_N}, got {self.n}")
        if self.extent_sigmas < 6:
            raise DomainError(f"extent_sigmas must be >= 6, got {self.extent_sigmas}")
        if self.oversample < 2:
            raise DomainError(f"oversample must be >= 2, got {self.oversample}")


@dataclass(frozen=True, eq=False)
class AmplitudeGrid:
    values: np.ndarray
    dt: float
    domain_tag: Domain = "time"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DomainError(f"grid must be square, got shape {v.shape}")
        if v.shape[0] < MIN_N or not _is_pow2(v.shape[0]):
            raise DomainError(f"grid size must be a power of two >= {MIN_N}, got {v.shape[0]}")
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.domain_tag not in ("time", "frequency"):
            raise DomainError(f"unknown domain tag {self.domain_tag!r}")
        total = float(np.sum(np.abs(v) ** 2))
        if not (math.isfinite(total) and total > 0):
            raise NumericError("grid has zero or non-finite norm")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def t0(self) -> float:
        return -(self.n // 2) * self.dt

    @property
    def dw(self) -> float:
        return 2.0 * math.pi / (self.n * self.dt)

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dt

    @property
    def omegas(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dw

    @property
    def axis(self) -> np.ndarray:
        return self.times if self.domain_tag == "time" else self.omegas

    @property
    def cell_area(self) -> float:
        step = self.dt if self.domain_tag == "time" else self.dw
        return step * step

    def norm(self) -> float:
        """Total probability, ``sum |values|^2 * cell_area``."""
        return float(np.sum(np.abs(self.values) ** 2)) * self.cell_area

    def edge_leakage(self) -> float:
        """Fraction of the probability within ``EDGE_CELLS`` of any boundary."""
        p = np.abs(self.values) ** 2
        inner = p[EDGE_CELLS:-EDGE_CELLS, EDGE_CELLS:-EDGE_CELLS].sum()
        total = p.sum()
        return float((total - inner) / total)

    def check_edges(self, suggestion: str) -> None:
        leak = self.edge_leakage()
        if leak >= EDGE_TOLERANCE:
            raise ResolutionError(
                f"{self.domain_tag}-domain edge leakage {leak:.2e} exceeds {EDGE_TOLERANCE:g}",
                suggestion,
            )

    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def normalized(self) -> "AmplitudeGrid":
        return AmplitudeGrid(self.values / math.sqrt(self.norm()), self.dt, self.domain_tag)


def required_size(
    state: GaussianBiphoton,
    spec: GridSpec,
    mu_max: float = 0.0,
    beta_max: float = 0.0,
) -> tuple[int, float]:
    """Return ``(n_needed, extent)`` for a state and the modulation it will see.

    The bandwidth estimate ``1/tau_min + |mu|max (tau1 + tau2)`` covers the
    chirp-broadened spectrum; dispersion spreads the amplitude by roughly
    ``|beta|max`` times that bandwidth.
    """
    bandwidth = 1.0 / min(state.tau1, state.tau2) + abs(mu_max) * (state.tau1 + state.tau2)
    span = max(state.tau1, state.tau2) + abs(beta_max) * bandwidth
    extent = spec.extent_sigmas * span
    dt_max = math.pi / (spec.oversample * bandwidth)
    return max(MIN_N, _next_pow2(extent / dt_max)), extent


def sample_form(form: ComplexQuadraticForm, n: int, dt: float) -> AmplitudeGrid:
    """Sample ``exp(-x^T M x / 2)`` on the grid and normalise to unit probability."""
    if form.domain_tag != "time":
        raise UsageError("sample_form expects a time-domain form")
    t = (np.arange(n) - n // 2) * dt
    ts, ti = np.meshgrid(t, t, indexing="ij")
    m = form.m
    expo = -0.5 * (m[0, 0] * ts * ts + 2.0 * m[0, 1] * ts * ti + m[1, 1] * ti * ti)
    return AmplitudeGrid(np.exp(expo), dt, "time").normalized()


def sample_state(
    state: GaussianBiphoton,
    spec: GridSpec = GridSpec(),
    mu_max: float = 0.0,
    beta_max: float = 0.0,
) -> AmplitudeGrid:
    """Sample the unmodulated state on an automatically sized grid.

    ``mu_max`` and ``beta_max`` are the largest chirp and dispersion the
    grid must later accommodate.
    """
    n_needed, extent = required_size(state, spec, mu_max, beta_max)
    if spec.n is None:
        n = n_needed
    else:
        n = spec.n
        if n < n_needed:
            raise ResolutionError(
                f"n={n} too small for extent {extent:.4g} fs at oversample {spec.oversample}",
                f"use n >= {n_needed}",
            )
    dt = extent / n
    t = (np.arange(n) - n // 2) * dt
    t1 = (t[:, None] - t[None, :]) / SQRT2
    t2 = (t[:, None] + t[None, :]) / SQRT2
    values = np.exp(-t1**2 / (2.0 * state.tau1**2) - t2**2 / (2.0 * state.tau2**2))
    grid = AmplitudeGrid(values, dt, "time").normalized()
    grid.check_edges(f"increase extent_sigmas above {spec.extent_sigmas}")
    return grid


def apply_phase(grid: AmplitudeGrid, phi_s: Phase = None, phi_i: Phase = None) -> AmplitudeGrid:
    """Multiply by ``exp(i (phi_s(t_s) + phi_i(t_i)))``.

    ``phi_s``/``phi_i`` are any callables mapping a time array (fs) to a
    phase array (rad); ``None`` means no modulation on that photon.
    """
    if grid.domain_tag != "time":
        raise UsageError("phase modulation acts on a time-domain grid")
    t = grid.times
    ps = np.zeros_like(t) if phi_s is None else np.asarray(phi_s(t), dtype=float)
    pi = np.zeros_like(t) if phi_i is None else np.asarray(phi_i(t), dtype=float)
    phase = np.exp(1j * ps)[:, None] * np.exp(1j * pi)[None, :]
    return AmplitudeGrid(grid.values * phase, grid.dt, "time")


def apply_chirp_grid(grid: AmplitudeGrid, mu_s: float, mu_i: float) -> AmplitudeGrid:
    """Exact quadratic phase ``exp(i (mu_s t_s^2 + mu_i t_i^2) / 2)``."""
    return apply_phase(grid, lambda t: 0.5 * mu_s * t * t, lambda t: 0.5 * mu_i * t * t)


def to_frequency(grid: AmplitudeGrid) -> AmplitudeGrid:
    if grid.domain_tag != "time":
        raise UsageError("grid is already in the frequency domain")
    f = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(grid.values), norm="ortho"))
    return AmplitudeGrid(f * (grid.dt / grid.dw), grid.dt, "frequency")


def to_time(grid: AmplitudeGrid) -> AmplitudeGrid:
    if grid.domain_tag != "frequency":
        raise UsageError("grid is already in the time domain")
    a = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(grid.values), norm="ortho"))
    return AmplitudeGrid(a * (grid.dw / grid.dt), grid.dt, "time")


def apply_dispersion_grid(grid: AmplitudeGrid, disp: DispersionPair) -> AmplitudeGrid:
    """Multiply the spectrum by ``exp(i (b_s w_s^2 + b_i w_i^2) / 2)``.

    The result comes back in the input domain. Raises
    :class:`ResolutionError` when either domain leaks into the grid edges.
    """
    spectral = to_frequency(grid) if grid.domain_tag == "time" else grid
    spectral.check_edges(f"spectrum reaches the Nyquist edge; use n >= {2 * grid.n} at the same extent")
    w = spectral.omegas
    phase = np.exp(0.5j * disp.beta_s * w * w)[:, None] * np.exp(0.5j * disp.beta_i * w * w)[None, :]
    out = AmplitudeGrid(spectral.values * phase, grid.dt, "frequency")
    temporal = to_time(out)
    temporal.check_edges(f"dispersed amplitude reaches the time edge; use n >= {2 * grid.n} with a larger extent")
    return temporal if grid.domain_tag == "time" else out


def _moments(weights: np.ndarray, x: np.ndarray) -> float:
    total = weights.sum()
    mean = np.sum(weights * x) / total
    return float(np.sum(weights * (x - mean) ** 2) / total)


def conditional_t1(grid: AmplitudeGrid) -> tuple[np.ndarray, np.ndarray]:
    """``(t1, density)`` on the slice ``t2 = 0`` (unnormalised density)."""
    if grid.domain_tag != "time":
        raise UsageError("conditional slice needs a time-domain grid")
    n = grid.n
    k = np.arange(1, n)
    t1 = (2 * k - n) * grid.dt / SQRT2
    return t1, np.abs(grid.values[k, n - k]) ** 2


def measure_widths(grid: AmplitudeGrid) -> WidthReport:
    if grid.domain_tag != "time":
        raise UsageError("widths are measured on a time-domain grid")
    p = grid.intensity()
    if not p.sum() > 0:
        raise NumericError("vanishing norm")
    t = grid.times
    diff = t[:, None] - t[None, :]
    summ = t[:, None] + t[None, :]
    t1, cond = conditional_t1(grid)
    if not cond.sum() > 0:
        raise NumericError("empty t2 = 0 slice")
    return WidthReport(
        correlation_time=2.0 * math.sqrt(_moments(p, diff)),
        mean_time_width=2.0 * math.sqrt(_moments(p, summ)),
        conditional_t1_width=2.0 * math.sqrt(_moments(cond, t1)),
    )


@dataclass(frozen=True, eq=False)
class WignerMap:
    """Real Wigner distribution ``values[t, w]`` on the given axes."""

    t: np.ndarray
    omega: np.ndarray
    values: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def dw(self) -> float:
        return float(self.omega[1] - self.omega[0])

    def integral(self) -> float:
        return float(self.values.sum() * self.dt * self.dw)

    def time_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dw

    def frequency_marginal(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.dt


def reduced_density(grid: AmplitudeGrid, mode: Literal["signal", "idler"] = "signal") -> np.ndarray:
    """``rho(t, t') = int A(t, t_p) A*(t', t_p) dt_p`` for one photon."""
    if grid.domain_tag != "time":
        raise UsageError("reduced density needs a time-domain grid")
    if mode == "signal":
        a = grid.values
    elif mode == "idler":
        a = grid.values.T
    else:
        raise DomainError(f"mode must be 'signal' or 'idler', got {mode!r}")
    return (a @ a.conj().T) * grid.dt


def reduced_wigner(
    grid: AmplitudeGrid,
    mode: Literal["signal", "idler"] = "signal",
    m: Optional[int] = None,
) -> WignerMap:
    """Wigner function of one photon's reduced state, normalised to unit integral.

    Uses lags ``2 k dt`` so the frequency axis has spacing ``pi / (n dt)`` and
    spans ``[-pi / (2 dt), pi / (2 dt))``. With ``m < n`` both axes are
    decimated by ``n // m``.
    """
    n = grid.n
    m = n if m is None else int(m)
    if m > n:
        raise ResolutionError(f"output resolution m={m} exceeds grid size n={n}", f"use m <= {n}")
    if m < 1 or n % m:
        raise DomainError(f"m must divide n={n}, got {m}")
    rho = reduced_density(grid, mode)
    rho = rho / np.trace(rho).real / grid.dt
    lags = np.fft.ifftshift(np.arange(n) - n // 2)  # FFT order: 0, 1, ..., -1
    rows = np.arange(n)[:, None]
    p = rows + lags[None, :]
    q = rows - lags[None, :]
    valid = (p >= 0) & (p < n) & (q >= 0) & (q < n)
    lagged = np.where(valid, rho[np.clip(p, 0, n - 1), np.clip(q, 0, n - 1)], 0.0)
    w = np.fft.fftshift(np.fft.ifft(lagged, axis=1) * n, axes=1).real * (grid.dt / math.pi)
    omega = (np.arange(n) - n // 2) * (math.pi / (n * grid.dt))
    stride = n // m
    return WignerMap(grid.times[::stride], omega[::stride], w[::stride, ::stride])


def write_grid_dump(grid: AmplitudeGrid, path) -> Path:
    """Write ``|values|^2`` as CSV preceded by the header ``# n dt t0 domain``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# {grid.n} {grid.dt!r} {grid.t0!r} {grid.domain_tag}\n")
        np.savetxt(fh, grid.intensity(), fmt="%.9g", delimiter=",")
    return path


def read_grid_dump(path) -> tuple[dict, np.ndarray]:
    """Inverse of :func:`write_grid_dump`; returns ``(header, intensity)``."""
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise DomainError(f"{path}: missing '# n dt t0 domain' header")
        n, dt, t0, domain = first[1:].split()
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    header = {"n": int(n), "dt": float(dt), "t0": float(t0), "domain": domain}
    if data.shape != (header["n"], header["n"]):
        raise DomainError(f"{path}: expected {n}x{n} values, found {data.shape}")
    return header, data
