"""Run configuration: INI-style files with dotted section names.

Example::

    [state]
    Tc_fs = 63.3
    R = 7

    [chirp]
    mu_s = 2.9538e-4
    mu_i = -2.9538e-4

    [dispersion]
    beta = optimal          ; or beta_s / beta_i in fs^2 (section absent: no dispersion)

    [grid]
    n = auto
    extent_sigmas = 8
    oversample = 4

    [outputs]
    dir = out
    report = report.json

Instead of ``mu_s``/``mu_i`` the chirp may come from modulator models in
``[chirp.signal]`` and ``[chirp.idler]`` (``model = quadratic | sinusoidal |
revival_toy | tabulated`` plus that model's parameters). Revival bumps are
written ``amplitude:center:width`` separated by commas.

A JSON report written by the CLI can be used as a config: its
``resolved_config`` entry holds these same sections.
"""
from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path
from typing import Optional

from .core import ChirpPair, DispersionPair, GaussianBiphoton, from_correlation_time
from .errors import BiphotonError, DomainError
from .grid import GridSpec
from .modulators import PhaseProfile, profile_from_params
from .pipeline import Modulation

PROFILE_KEYS = {
    "quadratic": ("mu", "t_center"),
    "sinusoidal": ("phi0", "omega_m", "theta"),
    "revival_toy": ("bumps",),
    "tabulated": ("path",),
}


class ConfigError(BiphotonError, ValueError):
    """Unreadable or invalid configuration."""


def _num(section: dict, key: str, where: str, default: Optional[float] = None) -> float:
    if key not in section:
        if default is None:
            raise ConfigError(f"[{where}] missing key {key!r}")
        return default
    try:
        value = float(section[key])
    except ValueError:
        raise ConfigError(f"[{where}] {key} = {section[key]!r} is not a number") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{where}] {key} must be finite")
    return value


def parse_bumps(text: str) -> list[tuple[float, float, float]]:
    bumps = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bump {chunk!r} must be amplitude:center:width")
        bumps.append(tuple(float(p) for p in parts))
    if not bumps:
        raise ConfigError("revival_toy needs at least one bump")
    return bumps


def format_bumps(bumps) -> str:
    return ", ".join(":".join(repr(float(v)) for v in b) for b in bumps)


def profile_from_section(section: dict, where: str, base_dir: Path = Path(".")) -> PhaseProfile:
    model = section.get("model")
    if model not in PROFILE_KEYS:
        raise ConfigError(f"[{where}] model must be one of {sorted(PROFILE_KEYS)}, got {model!r}")
    if model == "revival_toy":
        if "bumps" not in section:
            raise ConfigError(f"[{where}] missing key 'bumps'")
        params = {"bumps": parse_bumps(section["bumps"])}
    elif model == "tabulated":
        if "path" not in section:
            raise ConfigError(f"[{where}] missing key 'path'")
        path = Path(section["path"])
        params = {"path": path if path.is_absolute() else base_dir / path}
    elif model == "quadratic":
        params = {"mu": _num(section, "mu", where), "t_center": _num(section, "t_center", where, 0.0)}
    else:
        params = {
            "phi0": _num(section, "phi0", where),
            "omega_m": _num(section, "omega_m", where),
            "theta": _num(section, "theta", where, 0.0),
        }
    try:
        return profile_from_params(model, **params)
    except (OSError, DomainError) as exc:
        raise ConfigError(f"[{where}] {exc}") from exc


@dataclass
class RunConfig:
    tc_fs: float
    ratio: float
    chirp: Optional[ChirpPair] = None
    profiles: Optional[dict] = None  # {"signal": {...}, "idler": {...}} raw sections
    dispersion: Optional[DispersionPair] = None  # None means optimal
    grid: GridSpec = field(default_factory=GridSpec)
    out_dir: Optional[str] = None
    report: str = "report.json"
    base_dir: Path = field(default=Path("."), repr=False)

    def __post_init__(self):
        try:
            self.state()
        except DomainError as exc:
            raise ConfigError(f"[state] {exc}") from exc
        if (self.chirp is None) == (self.profiles is None):
            raise ConfigError("[chirp] give either mu_s/mu_i or [chirp.signal]/[chirp.idler] models")
        if self.profiles is not None:
            self.modulation()  # validate eagerly

    def state(self) -> GaussianBiphoton:
        return from_correlation_time(self.tc_fs, self.ratio)

    def modulation(self) -> Modulation:
        if self.chirp is not None:
            return Modulation.quadratic(self.chirp)
        sig = profile_from_section(self.profiles["signal"], "chirp.signal", self.base_dir)
        idl = profile_from_section(self.profiles["idler"], "chirp.idler", self.base_dir)
        return Modulation.from_profiles(sig, idl)

    def sections(self) -> dict:
        """Fully resolved configuration as ``{section: {key: str}}``."""
        out = {"state": {"Tc_fs": repr(self.tc_fs), "R": repr(self.ratio)}}
        if self.chirp is not None:
            out["chirp"] = {"mu_s": repr(self.chirp.mu_s), "mu_i": repr(self.chirp.mu_i)}
        else:
            out["chirp"] = {}
            for photon in ("signal", "idler"):
                out[f"chirp.{photon}"] = {k: str(v) for k, v in self.profiles[photon].items()}
        if self.dispersion is None:
            out["dispersion"] = {"beta": "optimal"}
        else:
            out["dispersion"] = {"beta_s": repr(self.dispersion.beta_s), "beta_i": repr(self.dispersion.beta_i)}
        out["grid"] = {
            "n": "auto" if self.grid.n is None else str(self.grid.n),
            "extent_sigmas": repr(float(self.grid.extent_sigmas)),
            "oversample": repr(float(self.grid.oversample)),
        }
        out["outputs"] = {"report": self.report}
        if self.out_dir is not None:
            out["outputs"]["dir"] = self.out_dir
        return out

    def to_ini(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        parser.read_dict(self.sections())
        buf = StringIO()
        parser.write(buf)
        return buf.getvalue()


def config_from_sections(sections: dict, base_dir: Path = Path(".")) -> RunConfig:
    if "state" not in sections:
        raise ConfigError("missing [state] section")
    state = sections["state"]
    tc = _num(state, "Tc_fs", "state")
    ratio = _num(state, "R", "state")

    chirp = None
    profiles = None
    chirp_sec = sections.get("chirp", {})
    if "chirp.signal" in sections or "chirp.idler" in sections:
        if "chirp.signal" not in sections or "chirp.idler" not in sections:
            raise ConfigError("both [chirp.signal] and [chirp.idler] are required")
        profiles = {"signal": dict(sections["chirp.signal"]), "idler": dict(sections["chirp.idler"])}
        for sec in profiles.values():
            if sec.get("model") == "tabulated" and "path" in sec:
                p = Path(sec["path"])
                sec["path"] = str(p if p.is_absolute() else (base_dir / p).resolve())
    else:
        chirp = ChirpPair(_num(chirp_sec, "mu_s", "chirp", 0.0), _num(chirp_sec, "mu_i", "chirp", 0.0))

    disp_sec = sections.get("dispersion", {})
    if disp_sec.get("beta", "").strip().lower() == "optimal":
        dispersion = None
    elif "beta" in disp_sec:
        raise ConfigError(f"[dispersion] beta must be 'optimal', got {disp_sec['beta']!r}")
    else:
        dispersion = DispersionPair(_num(disp_sec, "beta_s", "dispersion", 0.0), _num(disp_sec, "beta_i", "dispersion", 0.0))

    grid_sec = sections.get("grid", {})
    n_text = str(grid_sec.get("n", "auto")).strip().lower()
    try:
        n = None if n_text in ("auto", "0", "") else int(n_text)
        grid = GridSpec(
            n=n,
            extent_sigmas=_num(grid_sec, "extent_sigmas", "grid", 8.0),
            oversample=_num(grid_sec, "oversample", "grid", 4.0),
        )
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"[grid] {exc}") from exc

    outputs = sections.get("outputs", {})
    return RunConfig(
        tc_fs=tc,
        ratio=ratio,
        chirp=chirp,
        profiles=profiles,
        dispersion=dispersion,
        grid=grid,
        out_dir=outputs.get("dir"),
        report=outputs.get("report", "report.json"),
        base_dir=base_dir,
    )


def load_config(path) -> RunConfig:
    """Read an INI config, or the ``resolved_config`` of a JSON report."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        sections = data.get("resolved_config", data)
    else:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        parser.optionxform = str
        try:
            parser.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        sections = {name: dict(parser[name]) for name in parser.sections()}
    try:
        return config_from_sections(sections, base_dir=path.parent)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
