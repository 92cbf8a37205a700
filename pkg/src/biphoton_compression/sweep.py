"""Parameter sweeps: compression-ratio surfaces, direction scans, width scans."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from . import analytics
from .core import ChirpPair, GaussianBiphoton
from .errors import DomainError, PhysicsError

log = logging.getLogger(__name__)

Method = Literal["closed-form", "oracle"]


@dataclass(frozen=True, eq=False)
class Axis:
    name: str
    values: np.ndarray

    @classmethod
    def uniform(cls, name: str, lo: float, hi: float, count: int) -> "Axis":
        return cls(name, np.linspace(lo, hi, count))

    @property
    def min(self) -> float:
        return float(self.values[0])

    @property
    def max(self) -> float:
        return float(self.values[-1])

    @property
    def count(self) -> int:
        return int(self.values.size)

    def describe(self) -> str:
        return f"{self.name}[{self.min:.9g},{self.max:.9g},{self.count}]"


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Dense row-major values over the listed axes (first axis slowest)."""

    axes: tuple
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(a.count for a in self.axes)
        values = np.asarray(self.values, dtype=float).reshape(shape)
        nan_count = int(np.count_nonzero(~np.isfinite(values)))
        if nan_count != self.metadata.get("nan_count", 0):
            raise DomainError(f"{nan_count} non-finite cells but metadata records {self.metadata.get('nan_count', 0)}")
        object.__setattr__(self, "values", values)

    def to_csv(self, path) -> Path:
        """Two header lines (axes, metadata) followed by one row per cell."""
        path = Path(path)
        meta = "; ".join(f"{k}={_fmt(v)}" for k, v in sorted(self.metadata.items()))
        names = ",".join([a.name for a in self.axes] + ["value"])
        with path.open("w", newline="") as fh:
            fh.write("# axes: " + " ".join(a.describe() for a in self.axes) + f" columns={names}\n")
            fh.write(f"# metadata: {meta}\n")
            grids = np.meshgrid(*[a.values for a in self.axes], indexing="ij")
            cols = [g.ravel() for g in grids] + [self.values.ravel()]
            for row in zip(*cols):
                fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
        return path


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def read_sweep_csv(path) -> tuple[list[str], np.ndarray]:
    """Return the two header lines and the data rows of a sweep CSV."""
    path = Path(path)
    with path.open() as fh:
        header = [fh.readline().rstrip("\n"), fh.readline().rstrip("\n")]
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def _oracle_inverse_ratio(R: float, x: float, y: float) -> float:
    # tau1 = 1 makes (x, y) the chirp rates themselves
    state = GaussianBiphoton(1.0, R)
    return 1.0 / analytics.optimal_dispersion(state, ChirpPair(x, y)).compression_ratio


def rc_surface(
    R: float,
    x_range: tuple[float, float] = (-3.0, 3.0),
    y_range: tuple[float, float] = (-3.0, 3.0),
    n_per_axis: int = 121,
    method: Method = "closed-form",
) -> SweepResult:
    """Inverse optimal compression ratio over the dimensionless chirp plane."""
    if n_per_axis < 16:
        raise DomainError(f"n_per_axis must be >= 16, got {n_per_axis}")
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    xa = Axis.uniform("x", *x_range, n_per_axis)
    ya = Axis.uniform("y", *y_range, n_per_axis)
    if method == "closed-form":
        xx, yy = np.meshgrid(xa.values, ya.values, indexing="ij")
        values = 1.0 / analytics.optimal_ratio_from_chirps_array(R, xx, yy)
    elif method == "oracle":
        values = np.empty((n_per_axis, n_per_axis))
        for i, x in enumerate(xa.values):
            for j, y in enumerate(ya.values):
                try:
                    values[i, j] = _oracle_inverse_ratio(R, float(x), float(y))
                except PhysicsError:
                    values[i, j] = np.nan
    else:
        raise DomainError(f"unknown method {method!r}")
    nan_count = int(np.count_nonzero(~np.isfinite(values)))
    meta = {"R": float(R), "method": method, "quantity": "1/Rc", "nan_count": nan_count}
    return SweepResult((xa, ya), values, meta)


def surface_deviation(R: float, n_per_axis: int = 41, extent: float = 3.0) -> float:
    """Largest relative gap between the closed-form and oracle surfaces."""
    a = rc_surface(R, (-extent, extent), (-extent, extent), n_per_axis, "closed-form").values
    b = rc_surface(R, (-extent, extent), (-extent, extent), n_per_axis, "oracle").values
    return float(np.nanmax(np.abs(a - b) / np.abs(b)))


def steepest_drop_direction(R: float, radius: float, n_angles: int = 3600, method: Method = "closed-form") -> float:
    """Angle in ``[0, pi)`` where the inverse ratio is smallest on a circle.

    The surface is even under ``(x, y) -> (-x, -y)``, so directions are
    folded onto the half circle.
    """
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    angles = np.arange(n_angles) * (math.pi / n_angles)
    x = radius * np.cos(angles)
    y = radius * np.sin(angles)
    if method == "closed-form":
        inv = 1.0 / analytics.optimal_ratio_from_chirps_array(R, x, y)
    elif method == "oracle":
        inv = np.array([_oracle_inverse_ratio(R, float(a), float(b)) for a, b in zip(x, y)])
    else:
        raise DomainError(f"unknown method {method!r}")
    return float(angles[int(np.nanargmin(inv))])


def width_independence_scan(tau2: float, mu: float, tau1_values: Sequence[float]) -> SweepResult:
    """Optimally compressed correlation time for each ``tau1`` at fixed ``tau2`` and ``mu``.

    The chirp is antisymmetric. ``metadata['spread']`` is ``(max - min) / mean``.
    The scan expects the deep-chirp regime ``mu tau1 tau2 >= 5``; outside it
    ``metadata['regime_ok']`` is False and a warning is logged.
    """
    tau1 = np.asarray(tau1_values, dtype=float)
    if tau1.ndim != 1 or tau1.size == 0:
        raise DomainError("tau1_values must be a non-empty list")
    finals = np.array(
        [analytics.optimal_dispersion(GaussianBiphoton(t, tau2), ChirpPair.antisymmetric(mu)).final_correlation_time for t in tau1]
    )
    depth = abs(mu) * tau1 * tau2
    regime_ok = bool(np.all(depth >= 5.0))
    spread = float((finals.max() - finals.min()) / finals.mean())
    meta = {
        "tau2": float(tau2),
        "mu": float(mu),
        "spread": spread,
        "regime_ok": regime_ok,
        "min_chirp_depth": float(depth.min()),
        "asymptote": 2.0 / (abs(mu) * tau2) if mu else math.inf,
        "nan_count": 0,
    }
    if not regime_ok:
        log.warning("width scan outside the deep-chirp regime: min mu*tau1*tau2 = %.3g < 5", depth.min())
    return SweepResult((Axis("tau1", tau1),), finals, meta)
