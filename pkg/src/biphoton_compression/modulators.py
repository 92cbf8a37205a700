"""Single-photon phase profiles and the linear-compression audit.

Each profile is a callable ``phi(t)`` (rad, ``t`` in fs) with an analytic
second derivative where one exists. :func:`truncation_audit` measures how
far a profile departs from its best quadratic fit over a time window;
:func:`compressible_limit` finds the widest window that still passes.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

DEFAULT_THRESHOLD = math.pi / 10
_AUDIT_SAMPLES = 801


class PhaseProfile:
    """Base class. Subclasses implement ``__call__`` and ``second_derivative``."""

    kind = "abstract"

    def __call__(self, t):
        raise NotImplementedError

    def second_derivative(self, t):
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class QuadraticPhase(PhaseProfile):
    """``phi(t) = mu (t - t_center)**2 / 2``."""

    mu: float
    t_center: float = 0.0
    kind = "quadratic"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * self.mu * (t - self.t_center) ** 2

    def second_derivative(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.mu)

    def params(self):
        return {"mu": self.mu, "t_center": self.t_center}


@dataclass(frozen=True)
class SinusoidalPhase(PhaseProfile):
    """``phi(t) = phi0 cos(omega_m t + theta)``; a peak sits at ``t = -theta / omega_m``."""

    phi0: float
    omega_m: float
    theta: float = 0.0
    kind = "sinusoidal"

    def __call__(self, t):
        return self.phi0 * np.cos(self.omega_m * np.asarray(t, dtype=float) + self.theta)

    def second_derivative(self, t):
        return -self.phi0 * self.omega_m**2 * np.cos(self.omega_m * np.asarray(t, dtype=float) + self.theta)

    def params(self):
        return {"phi0": self.phi0, "omega_m": self.omega_m, "theta": self.theta}


@dataclass(frozen=True)
class PhaseBump:
    amplitude: float  # rad
    center: float  # fs
    width: float  # fs

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"bump width must be positive, got {self.width}")


@dataclass(frozen=True)
class RevivalToyPhase(PhaseProfile):
    """Sum of Gaussian phase bumps, a stand-in for a revival-type index modulation.

    With ps-scale bump widths this gives local chirp rates of order
    1e-4..1e-3 rad/fs**2 at the bump centres.
    """

    bumps: tuple = field(default_factory=tuple)
    kind = "revival_toy"

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(b if isinstance(b, PhaseBump) else PhaseBump(*b) for b in self.bumps))
        if not self.bumps:
            raise DomainError("revival_toy profile needs at least one bump")

    @classmethod
    def single(cls, mu: float, width: float, center: float = 0.0) -> "RevivalToyPhase":
        """One bump whose curvature at ``center`` is ``mu``."""
        return cls((PhaseBump(-mu * width * width, center, width),))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for b in self.bumps:
            out = out + b.amplitude * np.exp(-((t - b.center) ** 2) / (2.0 * b.width**2))
        return out

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for b in self.bumps:
            u = (t - b.center) / b.width
            out = out + b.amplitude / b.width**2 * (u * u - 1.0) * np.exp(-0.5 * u * u)
        return out

    def params(self):
        return {"bumps": [(b.amplitude, b.center, b.width) for b in self.bumps]}


@dataclass(frozen=True, eq=False)
class TabulatedPhase(PhaseProfile):
    """Uniformly sampled ``phi(t)``; evaluated through a cubic spline."""

    t: np.ndarray
    phi: np.ndarray
    source: Optional[str] = None
    kind = "tabulated"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if t.ndim != 1 or t.shape != phi.shape or t.size < 3:
            raise DomainError("tabulated profile needs >= 3 matching (t, phi) samples")
        steps = np.diff(t)
        if not np.all(steps > 0):
            raise DomainError("tabulated times must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > 1e-9 * max(abs(steps.mean()), 1.0):
            raise DomainError("tabulated times must be uniformly spaced")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "_spline", CubicSpline(t, phi))

    @property
    def step(self) -> float:
        return float(self.t[1] - self.t[0])

    def _check_range(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t[0] - 1e-12) or np.any(t > self.t[-1] + 1e-12):
            raise DomainError(f"time outside tabulated range [{self.t[0]}, {self.t[-1]}] fs")
        return t

    def __call__(self, t):
        return self._spline(self._check_range(t))

    def second_derivative(self, t):
        t = self._check_range(t)
        h = self.step
        self._check_range(t - h)
        self._check_range(t + h)
        return (self._spline(t + h) - 2.0 * self._spline(t) + self._spline(t - h)) / (h * h)

    def params(self):
        return {"path": self.source} if self.source else {"samples": int(self.t.size)}

    @classmethod
    def from_profile(cls, profile: PhaseProfile, t: Sequence[float]) -> "TabulatedPhase":
        t = np.asarray(t, dtype=float)
        return cls(t, profile(t))


def load_tabulated_csv(path) -> TabulatedPhase:
    """Read a two-column ``t_fs, phi_rad`` CSV. A non-numeric first row is a header."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if i == 0 and not rows:
                    continue
                raise DomainError(f"{path}:{i + 1}: expected 't_fs, phi_rad', got {row!r}")
    if len(rows) < 3:
        raise DomainError(f"{path}: need at least 3 samples")
    data = np.array(rows)
    return TabulatedPhase(data[:, 0], data[:, 1], source=str(path))


def write_tabulated_csv(profile: TabulatedPhase, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("t_fs,phi_rad\n")
        for t, p in zip(profile.t, profile.phi):
            fh.write(f"{t:.9g},{p:.9g}\n")
    return path


def local_chirp(profile: PhaseProfile, t_ref: float) -> float:
    """Second derivative of the phase at ``t_ref`` (rad/fs**2)."""
    return float(profile.second_derivative(np.asarray(float(t_ref))))


@dataclass(frozen=True)
class TruncationAudit:
    mu_local: float
    window: float
    max_residual_rad: float
    threshold_rad: float
    passes: bool


def _window_samples(profile: PhaseProfile, t_ref: float, window: float) -> np.ndarray:
    lo, hi = t_ref - window / 2.0, t_ref + window / 2.0
    if isinstance(profile, TabulatedPhase):
        if lo < profile.t[0] - 1e-12 or hi > profile.t[-1] + 1e-12:
            raise DomainError(
                f"window [{lo:.6g}, {hi:.6g}] fs not covered by the table [{profile.t[0]}, {profile.t[-1]}]"
            )
        inside = profile.t[(profile.t >= lo) & (profile.t <= hi)]
        if inside.size < 4:
            raise DomainError("fewer than 4 tabulated samples inside the audit window")
        return inside
    return np.linspace(lo, hi, _AUDIT_SAMPLES)


def truncation_audit(
    profile: PhaseProfile,
    t_ref: float,
    window: float,
    threshold_rad: float = DEFAULT_THRESHOLD,
) -> TruncationAudit:
    """Largest deviation of ``phi`` from its least-squares quadratic over the window."""
    if not window > 0:
        raise DomainError(f"window must be positive, got {window}")
    t = _window_samples(profile, t_ref, window)
    phi = np.asarray(profile(t), dtype=float)
    u = (t - t_ref) / (window / 2.0)  # scaled for conditioning
    coeffs = np.polynomial.polynomial.polyfit(u, phi, 2)
    resid = phi - np.polynomial.polynomial.polyval(u, coeffs)
    worst = float(np.max(np.abs(resid)))
    return TruncationAudit(
        mu_local=local_chirp(profile, t_ref),
        window=float(window),
        max_residual_rad=worst,
        threshold_rad=float(threshold_rad),
        passes=worst < threshold_rad,
    )


@dataclass(frozen=True)
class CompressibleLimit:
    """Widest window over which the quadratic truncation holds.

    ``window`` is ``math.inf`` for exactly quadratic profiles and ``0`` (with
    ``flagged=True``) when no window passes.
    """

    window: float
    mu_local: float
    threshold_rad: float
    flagged: bool = False

    def min_correlation_time(self, tau1: Optional[float] = None) -> float:
        """Smallest optimally compressed correlation time this modulator allows.

        The mean-time width may grow to the window (``tau2 = window / 2``).
        Without ``tau1`` the large-chirp floor ``2 / (|mu| tau2)`` is returned.
        """
        if self.window == 0 or self.mu_local == 0:
            return math.inf
        tau2 = self.window / 2.0
        if tau1 is None:
            return 2.0 / (abs(self.mu_local) * tau2)
        return 2.0 * tau1 / math.sqrt(1.0 + (self.mu_local * tau1 * tau2) ** 2)


def _initial_scale(profile: PhaseProfile) -> float:
    if isinstance(profile, SinusoidalPhase):
        return 1.0 / abs(profile.omega_m) if profile.omega_m else math.inf
    if isinstance(profile, RevivalToyPhase):
        return min(b.width for b in profile.bumps)
    if isinstance(profile, TabulatedPhase):
        return 8.0 * profile.step
    return 1.0


def compressible_limit(
    profile: PhaseProfile,
    t_ref: float,
    threshold_rad: float = DEFAULT_THRESHOLD,
    rtol: float = 1e-3,
) -> CompressibleLimit:
    """Bisect for the largest window whose :func:`truncation_audit` passes."""
    mu = local_chirp(profile, t_ref)
    if isinstance(profile, QuadraticPhase):
        return CompressibleLimit(math.inf, mu, threshold_rad)

    def ok(w):
        try:
            return truncation_audit(profile, t_ref, w, threshold_rad).passes
        except DomainError:
            return False  # tabulated coverage exhausted

    scale = _initial_scale(profile)
    if not math.isfinite(scale):
        return CompressibleLimit(math.inf, mu, threshold_rad)
    lo, hi = 0.0, scale
    if ok(hi):
        for _ in range(60):
            lo, hi = hi, 2.0 * hi
            if not ok(hi):
                break
        else:
            return CompressibleLimit(math.inf, mu, threshold_rad)
    else:
        floor = scale * 1e-6
        while hi > floor and not ok(hi):
            hi /= 2.0
        if hi <= floor:
            return CompressibleLimit(0.0, mu, threshold_rad, flagged=True)
        lo, hi = hi, 2.0 * hi
    while hi - lo > rtol * lo:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return CompressibleLimit(lo, mu, threshold_rad)


def profile_from_params(kind: str, **params) -> PhaseProfile:
    """Build a profile from a model name and its parameters (used by the config loader)."""
    if kind == "quadratic":
        return QuadraticPhase(float(params["mu"]), float(params.get("t_center", 0.0)))
    if kind == "sinusoidal":
        return SinusoidalPhase(float(params["phi0"]), float(params["omega_m"]), float(params.get("theta", 0.0)))
    if kind == "revival_toy":
        return RevivalToyPhase(tuple(PhaseBump(*map(float, b)) for b in params["bumps"]))
    if kind == "tabulated":
        return load_tabulated_csv(params["path"])
    raise DomainError(f"unknown phase model {kind!r}")
