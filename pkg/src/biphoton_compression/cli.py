"""Command-line front end.

Exit codes: 0 success, 1 usage / configuration / I/O problems, 2 physics or
numerical failures (degenerate optimum, unresolvable grid, ...).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analytics
from .config import ConfigError, RunConfig, format_bumps, load_config, parse_bumps
from .core import ChirpPair, DispersionPair, from_correlation_time
from .errors import DomainError, PhysicsError, UsageError
from .grid import GridSpec, conditional_t1, write_grid_dump
from .hom import coherence_time, dip_fwhm, hom_curve, write_hom_csv
from .modulators import (
    DEFAULT_THRESHOLD,
    QuadraticPhase,
    RevivalToyPhase,
    SinusoidalPhase,
    compressible_limit,
    load_tabulated_csv,
    local_chirp,
    truncation_audit,
)
from .pipeline import Modulation, analytic_path, grid_path, relative_deviation
from .sweep import rc_surface, steepest_drop_direction

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PHYSICS = 2

ENV_OUT_DIR = "BIPHOTON_OUT_DIR"

# worked example: correlation time, entanglement ratio, reported compression, dispersion
EXAMPLE_TC_FS = 63.3
EXAMPLE_R = 7.0
EXAMPLE_COMPRESSION = 2.3
REPORTED_BETA_FS2 = 2400.0
MODULATOR_WIDTH_FS = 1000.0  # ps-scale revival bump


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out_dir(args, cfg: RunConfig | None = None) -> Path:
    if getattr(args, "out", None):
        path = Path(args.out)
    elif cfg is not None and cfg.out_dir:
        path = Path(cfg.out_dir)
    else:
        path = Path(os.environ.get(ENV_OUT_DIR, "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _apply_grid_n(cfg: RunConfig, grid_n) -> RunConfig:
    if grid_n is None:
        return cfg
    try:
        return replace(cfg, grid=GridSpec(grid_n, cfg.grid.extent_sigmas, cfg.grid.oversample))
    except DomainError as exc:
        raise UsageError(f"--grid-n: {exc}") from exc


def _widths(report) -> dict:
    return report.as_dict()


def run_compress(cfg: RunConfig, method: str = "both"):
    """Run the configured pipeline; returns ``(report, grid_outcome_or_None)``."""
    state = cfg.state()
    modulation = cfg.modulation()
    report = {
        "command": "compress",
        "resolved_config": cfg.sections(),
        "state": {"tau1_fs": state.tau1, "tau2_fs": state.tau2, "R": state.ratio},
        "chirp": {"mu_s": modulation.chirp.mu_s, "mu_i": modulation.chirp.mu_i},
    }
    beta = analytics.optimal_dispersion(state, modulation.chirp).beta_used if cfg.dispersion is None else cfg.dispersion
    report["beta_used"] = {"beta_s": beta.beta_s, "beta_i": beta.beta_i, "mode": "optimal" if cfg.dispersion is None else "fixed"}
    if method in ("analytic", "both"):
        a = analytic_path(state, modulation.chirp, beta)
        report["analytic"] = {
            "initial": _widths(a.initial),
            "final": _widths(a.final),
            "compression_ratio": a.compression_ratio,
        }
    g = None
    if method in ("grid", "both"):
        g = grid_path(state, modulation, beta, cfg.grid)
        report["grid"] = {
            "n": g.initial.n,
            "dt_fs": g.initial.dt,
            "initial": _widths(g.initial_widths),
            "final": _widths(g.final_widths),
            "compression_ratio": g.compression_ratio,
            "quadratic_modulation": modulation.is_quadratic,
        }
    if method == "both":
        report["deviation"] = {
            key: relative_deviation(report["grid"]["final"][key], report["analytic"]["final"][key])
            for key in report["analytic"]["final"]
        }
    return report, g


def cmd_compress(args) -> int:
    cfg = _apply_grid_n(load_config(args.config), args.grid_n)
    report, grids = run_compress(cfg, args.method)
    out = _out_dir(args, cfg)
    if grids is not None and args.dump_grid:
        write_grid_dump(grids.initial, out / "grid_initial.csv")
        write_grid_dump(grids.final, out / "grid_final.csv")
    _write_json(out / cfg.report, report)
    for path in ("analytic", "grid"):
        if path in report:
            print(f"{path:8s} Tc {report[path]['initial']['correlation_time']:.6g} -> "
                  f"{report[path]['final']['correlation_time']:.6g} fs, Rc = {report[path]['compression_ratio']:.9g}")
    if "deviation" in report:
        print(f"paths deviation (correlation time): {report['deviation']['correlation_time']:.3e}")
    print(f"report: {out / cfg.report}")
    return EXIT_OK


def _gaussian_density(t: np.ndarray, width: float) -> np.ndarray:
    sigma = width / 2.0
    return np.exp(-0.5 * (t / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def run_worked_example(spec: GridSpec = GridSpec(), method: str = "both"):
    """Worked example: Tc = 63.3 fs, R = 7 and an antisymmetric chirp tuned to Rc = 2.3.

    Returns ``(report, tables)`` where ``tables`` maps CSV names to
    ``(header, rows)``.
    """
    state = from_correlation_time(EXAMPLE_TC_FS, EXAMPLE_R)
    mu = analytics.chirp_for_ratio(state, EXAMPLE_COMPRESSION)
    chirp = ChirpPair.antisymmetric(mu)
    rc_closed, beta_closed = analytics.antisymmetric_optimum(state, mu)
    opt = analytics.optimal_dispersion(state, chirp)
    pulse_tau = EXAMPLE_TC_FS / (2.0 * math.sqrt(2.0))
    pulses = analytics.separable_state(pulse_tau)
    pulses_opt = analytics.optimal_dispersion(pulses, chirp)
    reported_beta = DispersionPair.antisymmetric(REPORTED_BETA_FS2)
    report = {
        "command": "paper-example",
        "inputs": {
            "Tc_fs": EXAMPLE_TC_FS,
            "R": EXAMPLE_R,
            "target_compression": EXAMPLE_COMPRESSION,
            "mu_rad_per_fs2": mu,
            "modulator_width_fs": MODULATOR_WIDTH_FS,
        },
        "state": {"tau1_fs": state.tau1, "tau2_fs": state.tau2},
        "biphoton": {
            "compression_ratio": opt.compression_ratio,
            "closed_form_ratio": rc_closed,
            "final_correlation_time_fs": opt.final_correlation_time,
            "optimal_beta_fs2": opt.beta_used.beta_s,
            "closed_form_beta_fs2": beta_closed,
            "reported_beta_fs2": REPORTED_BETA_FS2,
            "ratio_at_reported_beta": analytics.compression_ratio(state, chirp, reported_beta),
            "beta_note": "optimal beta differs from the reported +/-2400 fs^2 because the state is a Gaussian surrogate",
        },
        "pulses": {
            "tau_fs": pulse_tau,
            "compression_ratio": pulses_opt.compression_ratio,
            "closed_form_ratio": analytics.classical_limit_ratio(pulse_tau, mu),
        },
    }
    t1 = np.linspace(-150.0, 150.0, 601)
    initial = analytic_path(state, ChirpPair(), DispersionPair()).final
    final = analytic_path(state, chirp, opt.beta_used).final
    pulses_final = analytic_path(pulses, chirp, pulses_opt.beta_used).final
    analytic_t1 = np.column_stack(
        [
            t1,
            _gaussian_density(t1, initial.conditional_t1_width),
            _gaussian_density(t1, final.conditional_t1_width),
            _gaussian_density(t1, pulses_final.conditional_t1_width),
        ]
    )
    tables = {"conditional_t1_analytic.csv": ("t1_fs,biphoton_initial,biphoton_compressed,pulses_compressed", analytic_t1)}
    if method in ("grid", "both"):
        g = grid_path(state, Modulation.quadratic(chirp), opt.beta_used, spec)
        gp = grid_path(pulses, Modulation.quadratic(chirp), pulses_opt.beta_used, spec)
        revival = Modulation.from_profiles(
            RevivalToyPhase.single(mu, MODULATOR_WIDTH_FS), RevivalToyPhase.single(-mu, MODULATOR_WIDTH_FS)
        )
        gr = grid_path(state, revival, None, spec)
        report["grid"] = {
            "n": g.initial.n,
            "compression_ratio": g.compression_ratio,
            "pulses_compression_ratio": gp.compression_ratio,
            "revival_modulator_ratio": gr.compression_ratio,
            "revival_bumps": format_bumps([(b.amplitude, b.center, b.width) for b in revival.phi_s.bumps])
            + " / "
            + format_bumps([(b.amplitude, b.center, b.width) for b in revival.phi_i.bumps]),
        }
        report["paths_deviation"] = relative_deviation(g.compression_ratio, opt.compression_ratio)
        t1_i, c_i = conditional_t1(g.initial)
        _, c_f = conditional_t1(g.final)
        step = t1_i[1] - t1_i[0]
        tables["conditional_t1_grid.csv"] = (
            "t1_fs,initial,compressed",
            np.column_stack([t1_i, c_i / (c_i.sum() * step), c_f / (c_f.sum() * step)]),
        )
    return report, tables


def _write_columns(path: Path, header: str, data: np.ndarray) -> Path:
    with path.open("w", newline="") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
    return path


def cmd_worked_example(args) -> int:
    spec = GridSpec() if args.grid_n is None else GridSpec(args.grid_n)
    report, tables = run_worked_example(spec, args.method)
    out = _out_dir(args)
    for name, (header, rows) in tables.items():
        _write_columns(out / name, header, rows)
    _write_json(out / "worked_example.json", report)
    b = report["biphoton"]
    print(f"biphoton compression (analytic): {b['compression_ratio']:.9g}")
    if "grid" in report:
        print(f"biphoton compression (grid):     {report['grid']['compression_ratio']:.9g}")
        print(f"  with revival-type modulators:  {report['grid']['revival_modulator_ratio']:.9g}")
    print(f"matched pulses compression:      {report['pulses']['compression_ratio']:.9g}")
    if "paths_deviation" in report:
        print(f"paths deviation:                 {report['paths_deviation']:.3e}")
    print(f"optimal beta: +/-{b['optimal_beta_fs2']:.6g} fs^2 (reported +/-{REPORTED_BETA_FS2:g} fs^2; "
          f"Rc there = {b['ratio_at_reported_beta']:.6g})")
    return EXIT_OK


def cmd_surface(args) -> int:
    result = rc_surface(args.R, tuple(args.x_range), tuple(args.y_range), args.n, args.method)
    out = _out_dir(args)
    path = result.to_csv(out / f"surface_R{args.R:g}_{args.method}.csv")
    print(f"steepest drop direction: {math.degrees(steepest_drop_direction(args.R, 1.0)):.2f} deg")
    print(f"surface: {path} ({result.metadata['nan_count']} degenerate cells)")
    return EXIT_OK


def cmd_hom(args) -> int:
    cfg = _apply_grid_n(load_config(args.config), args.grid_n)
    if args.n < 1:
        raise UsageError("--n must be at least 1 delay")
    state = cfg.state()
    modulation = cfg.modulation()
    g = grid_path(state, modulation, cfg.dispersion, cfg.grid)
    if args.delay_range is None:
        half = min(4.0 * 2.0 * state.tau1, g.initial.n * g.initial.dt / 2.0)
        lo, hi = -half, half
    else:
        lo, hi = args.delay_range
    delays = np.linspace(lo, hi, args.n)
    before = hom_curve(g.initial, delays)
    after = hom_curve(g.final, delays)
    out = _out_dir(args, cfg)
    write_hom_csv(before, out / "hom_initial.csv")
    write_hom_csv(after, out / "hom_compressed.csv")
    w0, w1 = coherence_time(before), coherence_time(after)
    report = {
        "command": "hom",
        "resolved_config": cfg.sections(),
        "delays": {"min_fs": lo, "max_fs": hi, "count": args.n},
        "initial": {"coherence_time_fs": w0, "fwhm_fs": _safe_fwhm(before), "imag_max": before.imag_max},
        "compressed": {"coherence_time_fs": w1, "fwhm_fs": _safe_fwhm(after), "imag_max": after.imag_max},
        "coherence_compression_ratio": w0 / w1,
        "correlation_compression_ratio": analytic_path(state, modulation.chirp, g.beta).compression_ratio,
    }
    _write_json(out / "hom_report.json", report)
    print(f"coherence time {w0:.6g} -> {w1:.6g} fs (ratio {w0 / w1:.6g})")
    return EXIT_OK


def _safe_fwhm(curve):
    try:
        return dip_fwhm(curve)
    except PhysicsError:
        return None


def _profile_from_args(args):
    if args.config:
        cfg = load_config(args.config)
        modulation = cfg.modulation()
        return modulation.phi_s if args.photon == "signal" else modulation.phi_i
    if args.model is None:
        raise UsageError("give --config or --model")
    if args.model == "quadratic":
        return QuadraticPhase(_need(args.mu, "--mu"), args.t_center)
    if args.model == "sinusoidal":
        return SinusoidalPhase(_need(args.phi0, "--phi0"), _need(args.omega_m, "--omega-m"), args.theta)
    if args.model == "revival_toy":
        return RevivalToyPhase(tuple(parse_bumps(_need(args.bumps, "--bumps"))))
    return load_tabulated_csv(_need(args.table, "--table"))


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this model")
    return value


def cmd_modulator_check(args) -> int:
    profile = _profile_from_args(args)
    mu = local_chirp(profile, args.t_ref)
    audit = truncation_audit(profile, args.t_ref, args.window, args.threshold) if args.window else None
    limit = compressible_limit(profile, args.t_ref, args.threshold)
    print(f"model: {profile.kind}")
    print(f"local chirp: {mu:.9g} rad/fs^2")
    if audit is not None:
        print(f"window {audit.window:.6g} fs: max residual {audit.max_residual_rad:.6g} rad -> "
              f"{'pass' if audit.passes else 'fail'} (threshold {audit.threshold_rad:.6g})")
    window = "inf" if math.isinf(limit.window) else f"{limit.window:.6g} fs"
    print(f"compressible window: {window}{' (flagged: no window passes)' if limit.flagged else ''}")
    if args.out:
        report = {
            "command": "modulator-check",
            "model": profile.kind,
            "t_ref_fs": args.t_ref,
            "mu_local": mu,
            "threshold_rad": args.threshold,
            "compressible_window_fs": None if math.isinf(limit.window) else limit.window,
            "flagged": limit.flagged,
        }
        if audit is not None:
            report["audit"] = {"window_fs": audit.window, "max_residual_rad": audit.max_residual_rad, "passes": audit.passes}
        _write_json(_out_dir(args) / "modulator_check.json", report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biphoton-compress", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, config=False):
        p.add_argument("--out", help=f"output directory (default: ${ENV_OUT_DIR} or .)")
        p.add_argument("--grid-n", type=int, default=None, help="grid size per axis (power of two)")
        if config:
            p.add_argument("--config", required=True, help="INI config or JSON report")

    p = sub.add_parser("compress", help="run the modulation + dispersion pipeline")
    common(p, config=True)
    p.add_argument("--method", choices=("analytic", "grid", "both"), default="both")
    p.add_argument("--dump-grid", action="store_true", help="also write |A|^2 of the initial and final grids")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("paper-example", help="worked example (Tc = 63.3 fs, R = 7)")
    common(p)
    p.add_argument("--method", choices=("analytic", "grid", "both"), default="both")
    p.set_defaults(func=cmd_worked_example)

    p = sub.add_parser("surface", help="inverse compression ratio over the (x, y) chirp plane")
    common(p)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--x-range", type=float, nargs=2, default=(-3.0, 3.0))
    p.add_argument("--y-range", type=float, nargs=2, default=(-3.0, 3.0))
    p.add_argument("--n", type=int, default=121)
    p.add_argument("--method", choices=("closed-form", "oracle"), default="closed-form")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("hom", help="HOM dip before and after compression")
    common(p, config=True)
    p.add_argument("--delay-range", type=float, nargs=2, default=None)
    p.add_argument("--n", type=int, default=401, help="number of delays")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("modulator-check", help="audit the quadratic truncation of a phase profile")
    p.add_argument("--out")
    p.add_argument("--config", help="take the profile from this config's [chirp.*] section")
    p.add_argument("--photon", choices=("signal", "idler"), default="signal")
    p.add_argument("--model", choices=("quadratic", "sinusoidal", "revival_toy", "tabulated"))
    p.add_argument("--mu", type=float)
    p.add_argument("--t-center", type=float, default=0.0)
    p.add_argument("--phi0", type=float)
    p.add_argument("--omega-m", type=float)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--bumps", help="amplitude:center:width[, ...]")
    p.add_argument("--table", help="two-column CSV t_fs,phi_rad")
    p.add_argument("--t-ref", type=float, default=0.0)
    p.add_argument("--window", type=float, default=None)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_modulator_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
