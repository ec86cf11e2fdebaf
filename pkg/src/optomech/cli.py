"""Experiment runner: one config in, CSV series, Wigner grids and a manifest out.

Config files are flat `key = value` lines with `#` comments. Times are in
seconds and frequencies in rad/s; omega_m, omega_p and drive_amp also accept
a ratio to the cavity frequency with the suffix syntax `0.8*omega_c`.
Initial amplitudes alpha and gamma take any Python complex literal.

Required keys without a preset: omega_c, omega_m, t_end, n_samples, modes.
Optional keys: omega_p, drive_amp, g_ratio, alpha, gamma (default 0),
preset, filter, output_dir, field_dim, mirror_dim, dt, norm_tolerance,
wigner_grid_points.

`modes` is a comma list drawn from: undriven (closed-form series),
driven-analytic (coherent-averaged propagator), driven-numeric (brute-force
integration), wigner (phase-space snapshots from both propagators at
t = 0, pi/omega_m, 2pi/omega_m), compare (metrics between the two driven
routes; requires both).

A preset replaces the physics keys wholesale; configs may still set
output_dir, filter, dims and integrator overrides next to it. Each run
writes `manifest.txt` recording every expanded value, so any output can be
reproduced from the manifest alone.

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 truncation
inadequacy.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import driven, oracle, undriven, wigner
from .errors import ConfigError, IntegrationError, TruncationError
from .fock import FockDims, recommend_field_dim, recommend_mirror_dim
from .postproc import ObservableSeries, atomic_write_text, compare, filter_fast, write_series
from .system import SystemParams

MODES = ("undriven", "driven-analytic", "driven-numeric", "wigner", "compare")
PRESETS = (
    "fig2",
    "fig3",
    "fig4",
    "fig5_6",
    "fig7_8",
    "fig9",
    "fig10",
    "wigner_snapshots",
)
_PARAM_KEYS = ("omega_c", "omega_m", "omega_p", "drive_amp", "g_ratio", "alpha", "gamma")
_REQUIRED_KEYS = ("omega_c", "omega_m", "t_end", "n_samples", "modes")
_KNOWN_KEYS = _PARAM_KEYS + (
    "t_end",
    "n_samples",
    "modes",
    "preset",
    "filter",
    "output_dir",
    "field_dim",
    "mirror_dim",
    "dt",
    "norm_tolerance",
    "wigner_grid_points",
)
# Keys that stay honored next to a preset; the rest belong to the preset.
_PRESET_COMPATIBLE = (
    "preset",
    "filter",
    "output_dir",
    "field_dim",
    "mirror_dim",
    "dt",
    "norm_tolerance",
    "wigner_grid_points",
)

_WEAK_OMEGA_C = 1.0e9
_OMEGA_M_RATIO = 0.01
_DRIVE_RATIO = math.pi / 20.0
_RED, _BLUE = 0.8, 1.2
_MECH_PERIOD = 2.0 * math.pi / (_WEAK_OMEGA_C * _OMEGA_M_RATIO)
_BEAT_PERIOD = 2.0 * math.pi / (abs(_RED - 1.0) * _WEAK_OMEGA_C)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one run (or of a preset to expand)."""

    params: SystemParams | None
    t_end: float
    n_samples: int
    modes: tuple
    dims: FockDims | None = None
    preset: str | None = None
    filter: bool = False
    output_dir: str = "."
    dt: float | None = None
    norm_tolerance: float = oracle.DEFAULT_NORM_TOLERANCE
    wigner_grid_points: int = 161

    def __post_init__(self):
        if self.preset is None:
            if self.params is None:
                raise ConfigError("params are required when no preset is set")
            if not (self.t_end > 0):
                raise ConfigError("t_end must be positive")
            if self.n_samples < 2:
                raise ConfigError("n_samples must be at least 2")
            if not self.modes:
                raise ConfigError("modes must not be empty")
            bad = [m for m in self.modes if m not in MODES]
            if bad:
                raise ConfigError(f"unknown modes {bad}; valid: {', '.join(MODES)}")
            if "compare" in self.modes and not (
                "driven-analytic" in self.modes and "driven-numeric" in self.modes
            ):
                raise ConfigError(
                    "mode 'compare' needs both 'driven-analytic' and 'driven-numeric'"
                )
        elif self.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {self.preset!r}; valid: {', '.join(PRESETS)}"
            )
        if self.dt is not None and not (self.dt > 0):
            raise ConfigError("dt must be positive")
        if self.wigner_grid_points < 8:
            raise ConfigError("wigner_grid_points must be at least 8")


@dataclass(frozen=True)
class _Job:
    """One executable unit: a resolved RunConfig plus emission details."""

    config: RunConfig
    tag: str = ""
    emit_beta_variants: bool = False
    emit_closed_form_photon: bool = False


# ---------------------------------------------------------------------------
# Config parsing


def parse_config_text(text: str) -> dict:
    """key -> (raw value, line number); raises ConfigError with the line."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key=value, got {body!r}")
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {entries[key][1]})"
            )
        entries[key] = (value, lineno)
    return entries


def _fail(kv: dict, key: str, problem: str):
    raise ConfigError(f"line {kv[key][1]}: {key}: {problem}")


def _float_of(kv, key, omega_c=None, default=None):
    if key not in kv:
        return default
    raw = kv[key][0]
    if raw.endswith("*omega_c"):
        if omega_c is None:
            _fail(kv, key, "ratio syntax needs omega_c set to an absolute value")
        raw = raw[: -len("*omega_c")].strip()
        scale = omega_c
    else:
        scale = 1.0
    try:
        return float(raw) * scale
    except ValueError:
        _fail(kv, key, f"not a number: {raw!r}")


def _int_of(kv, key, default=None):
    if key not in kv:
        return default
    try:
        return int(kv[key][0])
    except ValueError:
        _fail(kv, key, f"not an integer: {kv[key][0]!r}")


def _complex_of(kv, key, default=0j):
    if key not in kv:
        return default
    try:
        return complex(kv[key][0])
    except ValueError:
        _fail(kv, key, f"not a complex number: {kv[key][0]!r}")


def _bool_of(kv, key, default=False):
    if key not in kv:
        return default
    raw = kv[key][0].lower()
    if raw in ("true", "1", "yes"):
        return True
    if raw in ("false", "0", "no"):
        return False
    _fail(kv, key, f"not a boolean: {kv[key][0]!r}")


def _dims_of(kv):
    has_f, has_m = "field_dim" in kv, "mirror_dim" in kv
    if has_f != has_m:
        raise ConfigError("field_dim and mirror_dim must be given together")
    if not has_f:
        return None
    return FockDims(_int_of(kv, "field_dim"), _int_of(kv, "mirror_dim"))


def build_config(kv: dict, preset_override: str | None = None) -> RunConfig:
    """RunConfig from parsed key/value entries; all diagnostics cite lines."""
    preset = preset_override or (kv["preset"][0] if "preset" in kv else None)
    if preset is not None:
        stray = sorted(k for k in kv if k not in _PRESET_COMPATIBLE)
        if stray:
            raise ConfigError(
                f"keys {stray} conflict with preset {preset!r}; a preset fixes the physics"
            )
        return RunConfig(
            params=None,
            t_end=1.0,
            n_samples=2,
            modes=(),
            dims=_dims_of(kv),
            preset=preset,
            filter=_bool_of(kv, "filter"),
            output_dir=kv["output_dir"][0] if "output_dir" in kv else ".",
            dt=_float_of(kv, "dt"),
            norm_tolerance=_float_of(
                kv, "norm_tolerance", default=oracle.DEFAULT_NORM_TOLERANCE
            ),
            wigner_grid_points=_int_of(kv, "wigner_grid_points", default=161),
        )
    missing = [k for k in _REQUIRED_KEYS if k not in kv]
    if missing:
        raise ConfigError(
            "missing required keys: " + ", ".join(missing)
            + " (required: " + ", ".join(_REQUIRED_KEYS) + ")"
        )
    omega_c = _float_of(kv, "omega_c")
    try:
        params = SystemParams(
            omega_c=omega_c,
            omega_m=_float_of(kv, "omega_m", omega_c),
            omega_p=_float_of(kv, "omega_p", omega_c, default=0.0),
            drive_amp=_float_of(kv, "drive_amp", omega_c, default=0.0),
            g_ratio=_float_of(kv, "g_ratio", default=0.0),
            alpha=_complex_of(kv, "alpha"),
            gamma=_complex_of(kv, "gamma"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        params=params,
        t_end=_float_of(kv, "t_end"),
        n_samples=_int_of(kv, "n_samples"),
        modes=tuple(m.strip() for m in kv["modes"][0].split(",") if m.strip()),
        dims=_dims_of(kv),
        preset=None,
        filter=_bool_of(kv, "filter"),
        output_dir=kv["output_dir"][0] if "output_dir" in kv else ".",
        dt=_float_of(kv, "dt"),
        norm_tolerance=_float_of(
            kv, "norm_tolerance", default=oracle.DEFAULT_NORM_TOLERANCE
        ),
        wigner_grid_points=_int_of(kv, "wigner_grid_points", default=161),
    )


def load_config(path: str, preset_override: str | None = None) -> RunConfig:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return build_config(parse_config_text(text), preset_override)


# ---------------------------------------------------------------------------
# Presets


def _weak(ratio: float) -> SystemParams:
    return SystemParams(
        omega_c=_WEAK_OMEGA_C,
        omega_m=_OMEGA_M_RATIO * _WEAK_OMEGA_C,
        omega_p=ratio * _WEAK_OMEGA_C,
        drive_amp=_DRIVE_RATIO * _WEAK_OMEGA_C,
        g_ratio=0.033,
        alpha=2.0 + 0.0j,
        gamma=2.0 + 0.0j,
    )


def _strong(ratio: float) -> SystemParams:
    return replace(_weak(ratio), g_ratio=0.33)


_WEAK_DIMS = FockDims(30, 35)
_STRONG_DIMS = FockDims(30, 308)


def preset_jobs(name: str) -> tuple:
    """Pure expansion of a preset into jobs; overrides are applied afterward."""
    driven_modes = ("driven-analytic", "driven-numeric", "compare")
    if name == "fig2":
        # Undriven mirror dynamics for a sweep of field intensities around
        # the cooling/heating thresholds of |alpha|^2.
        base = SystemParams(
            omega_c=1.0e8, omega_m=1.0e7, g_ratio=0.033, gamma=2.0 + 0.0j
        )
        alphas = (
            ("alpha_sq_0", 0.0),
            ("alpha_sq_4", 2.0),
            ("alpha_sq_29p8", math.sqrt(29.8)),
            ("alpha_sq_59p6", math.sqrt(59.6)),
            ("alpha_sq_64", 8.0),
        )
        return tuple(
            _Job(
                RunConfig(
                    params=replace(base, alpha=complex(a)),
                    t_end=2.0 * math.pi / base.omega_m,
                    n_samples=201,
                    modes=("undriven",),
                ),
                tag=tag,
            )
            for tag, a in alphas
        )
    if name == "fig3":
        return (
            _Job(
                RunConfig(
                    params=_weak(_RED),
                    t_end=2.0 * _BEAT_PERIOD,
                    n_samples=2001,
                    modes=("driven-analytic",),
                ),
                tag="red",
                emit_beta_variants=True,
            ),
        )
    if name == "fig4":
        return tuple(
            _Job(
                RunConfig(
                    params=_weak(r),
                    t_end=4.0 * _BEAT_PERIOD,
                    n_samples=1601,
                    modes=driven_modes,
                    dims=_WEAK_DIMS,
                ),
                tag=tag,
                emit_closed_form_photon=True,
            )
            for tag, r in (("red", _RED), ("blue", _BLUE))
        )
    if name == "fig5_6":
        jobs = [
            _Job(
                RunConfig(
                    params=_weak(r),
                    t_end=_MECH_PERIOD,
                    n_samples=2001,
                    modes=driven_modes,
                    dims=_WEAK_DIMS,
                    filter=True,
                ),
                tag=tag,
            )
            for tag, r in (("red", _RED), ("blue", _BLUE))
        ]
        jobs.append(
            _Job(
                RunConfig(
                    params=replace(_weak(_RED), omega_p=0.0, drive_amp=0.0),
                    t_end=_MECH_PERIOD,
                    n_samples=2001,
                    modes=("undriven",),
                ),
                tag="nonforced",
            )
        )
        return tuple(jobs)
    if name in ("fig7_8", "fig9", "fig10"):
        detunings = (("red", _RED), ("blue", _BLUE)) if name == "fig7_8" else (("red", _RED),)
        return tuple(
            _Job(
                RunConfig(
                    params=_strong(r),
                    t_end=5.5 * _MECH_PERIOD,
                    n_samples=1101,
                    modes=driven_modes,
                    dims=_STRONG_DIMS,
                    filter=True,
                ),
                tag=tag,
            )
            for tag, r in detunings
        )
    if name == "wigner_snapshots":
        return (
            _Job(
                RunConfig(
                    params=_strong(_RED),
                    t_end=_MECH_PERIOD,
                    n_samples=3,
                    modes=("wigner",),
                    dims=_STRONG_DIMS,
                ),
                tag="red",
            ),
        )
    raise ConfigError(f"unknown preset {name!r}; valid: {', '.join(PRESETS)}")


def expand_jobs(config: RunConfig) -> tuple:
    """Jobs to execute for a config, with preset-compatible overrides applied."""
    if config.preset is None:
        return (_Job(config),)
    jobs = []
    for job in preset_jobs(config.preset):
        jc = replace(
            job.config,
            preset=config.preset,
            output_dir=config.output_dir,
            filter=job.config.filter or config.filter,
            dims=config.dims if config.dims is not None else job.config.dims,
            dt=config.dt,
            norm_tolerance=config.norm_tolerance,
            wigner_grid_points=config.wigner_grid_points,
        )
        jobs.append(replace(job, config=jc))
    return tuple(jobs)


# ---------------------------------------------------------------------------
# Dimension and effort estimates


def auto_numeric_dims(p: SystemParams, t_end: float) -> FockDims:
    """Default truncation for the brute-force run (k_max=20 policy)."""
    mu = (abs(p.alpha) + oracle.drive_growth(p, t_end)) ** 2
    fd = max(recommend_field_dim(mu), 16)
    md = recommend_mirror_dim(abs(p.gamma), p.g_ratio, min(20, fd - 1))
    return FockDims(fd, md)


def auto_analytic_dims(p: SystemParams, t_end: float) -> FockDims:
    """Truncation for assembling the analytic state: every populated field
    level k needs mirror room for its displaced block."""
    mu = (abs(p.alpha) + oracle.drive_growth(p, t_end)) ** 2
    fd = max(recommend_field_dim(mu), 16)
    md = recommend_mirror_dim(abs(p.gamma), p.g_ratio, fd - 1)
    return FockDims(fd, md)


# ---------------------------------------------------------------------------
# Execution


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _stem(label: str, provenance: str, tag: str) -> str:
    return f"{label}_{provenance}" + (f"_{tag}" if tag else "")


class _Emitter:
    def __init__(self, out_dir: str, tag: str):
        self.out_dir = out_dir
        self.tag = tag
        self.files = []

    def series(self, s: ObservableSeries):
        name = _stem(s.label, s.provenance, self.tag) + ".csv"
        write_series(s, os.path.join(self.out_dir, name))
        self.files.append(name)

    def grid(self, grid, stem: str):
        for ext, writer in ((".csv", wigner.write_grid_csv), (".pgm", wigner.write_grid_pgm)):
            name = stem + ext
            writer(grid, os.path.join(self.out_dir, name))
            self.files.append(name)


def _analytic_series(p: SystemParams, betas) -> dict:
    out = {
        "photon_avg": driven.photon_avg(p, betas),
        "phonon_avg": driven.phonon_avg(p, betas),
        "linear_entropy_mirror": driven.linear_entropy_mirror(p, betas),
    }
    # Mandel parameters are undefined wherever the mean occupation vanishes.
    try:
        out["mandel_field"] = driven.mandel_field(p, betas) * np.ones_like(betas.t)
    except ValueError:
        pass
    try:
        out["mandel_mirror"] = driven.mandel_mirror(p, betas)
    except ValueError:
        pass
    return {
        name: ObservableSeries(betas.t, y, name, "analytic") for name, y in out.items()
    }


_FILTERABLE = ("photon_avg", "phonon_avg", "mandel_mirror", "linear_entropy_mirror")


def _run_job(job: _Job) -> tuple:
    """Execute one job; returns (files, manifest lines)."""
    cfg = job.config
    p = cfg.params
    man = []
    emit = _Emitter(cfg.output_dir, job.tag)

    def note(key, value):
        man.append(f"{key}={_fmt(value)}")

    note("tag", job.tag or "main")
    if cfg.preset:
        note("preset", cfg.preset)
    for key in _PARAM_KEYS:
        note(key, getattr(p, key))
    note("t_end", cfg.t_end)
    note("n_samples", cfg.n_samples)
    note("modes", ",".join(cfg.modes))
    note("filter", cfg.filter)

    t_grid = np.linspace(0.0, cfg.t_end, cfg.n_samples)
    window = p.beat_period
    if cfg.filter and not math.isfinite(window):
        raise ConfigError("filter window undefined: drive on cavity resonance")

    analytic = {}
    numeric = {}
    filtered = {}

    if "undriven" in cfg.modes:
        # The drive-free closed form; next to driven series it doubles as the
        # nonforced reference curve, hence the distinct labels.
        phonon = undriven.phonon_avg_closed_form(p, t_grid)
        emit.series(ObservableSeries(t_grid, phonon, "phonon_avg_undriven", "analytic"))
        emit.series(
            ObservableSeries(
                t_grid,
                np.full(t_grid.size, abs(p.alpha) ** 2),
                "photon_avg_undriven",
                "analytic",
            )
        )

    betas = None
    if "driven-analytic" in cfg.modes:
        betas = driven.integrate_betas(p, t_grid)
        note("beta_mode", betas.mode.value)
        note("antisymmetry_defect", betas.antisymmetry_defect)
        note("unitarity_defect", betas.unitarity_defect)
        prenorm = np.exp(np.real(betas.b3) + 0.5 * np.abs(betas.b1) ** 2)
        note("prenorm_min", float(prenorm.min()))
        note("prenorm_max", float(prenorm.max()))
        analytic = _analytic_series(p, betas)
        for s in analytic.values():
            emit.series(s)
        if job.emit_closed_form_photon:
            closed = driven.photon_avg_weak_closed_form(p, t_grid)
            emit.series(ObservableSeries(t_grid, closed, "photon_avg_closed", "analytic"))
        if job.emit_beta_variants:
            variants = (
                ("re_beta1_full", np.real(betas.b1)),
                ("re_beta1_rwa", np.real(driven.beta1_rwa(p, t_grid))),
                ("re_beta1_phi_to_one", np.real(driven.beta1_phi_to_one(p, t_grid))),
            )
            for label, y in variants:
                emit.series(ObservableSeries(t_grid, y, label, "analytic"))

    if "driven-numeric" in cfg.modes:
        dims = cfg.dims or auto_numeric_dims(p, cfg.t_end)
        icfg = oracle.recommend_integrator_config(
            p, cfg.t_end, dims, cfg.norm_tolerance
        )
        if cfg.dt is not None:
            icfg = replace(icfg, dt=cfg.dt)
        run = oracle.evolve_numeric(p, dims, icfg, t_grid)
        numeric = oracle.observables_numeric(run)
        for s in numeric.values():
            emit.series(s)
        note("field_dim", dims.field_dim)
        note("mirror_dim", dims.mirror_dim)
        note("dt", icfg.dt)
        note("norm_tolerance", icfg.norm_tolerance)
        note("n_steps", run.n_steps)
        note("norm_drift", run.norm_drift)
        note("leak_max", run.leak_max)

    if cfg.filter:
        for name in _FILTERABLE:
            for route, route_name in ((analytic, "analytic"), (numeric, "numeric")):
                if name in route:
                    f = filter_fast(route[name], window)
                    filtered[(name, route_name)] = f
                    emit.series(replace(f, label=f"{name}_{route_name}"))
        note("filter_window", window)

    if "compare" in cfg.modes:
        for name in sorted(set(analytic) & set(numeric)):
            metrics = compare(analytic[name], numeric[name])
            for mkey, mval in metrics.items():
                note(f"compare_{name}_{mkey}", mval)
        for name in _FILTERABLE:
            fa = filtered.get((name, "analytic"))
            fn = filtered.get((name, "numeric"))
            if fa is not None and fn is not None:
                metrics = compare(fa, fn)
                for mkey, mval in metrics.items():
                    note(f"compare_filtered_{name}_{mkey}", mval)

    if "wigner" in cfg.modes:
        dims_n = cfg.dims or auto_numeric_dims(p, cfg.t_end)
        dims_a = auto_analytic_dims(p, cfg.t_end)
        note("wigner_numeric_field_dim", dims_n.field_dim)
        note("wigner_numeric_mirror_dim", dims_n.mirror_dim)
        note("wigner_analytic_field_dim", dims_a.field_dim)
        note("wigner_analytic_mirror_dim", dims_a.mirror_dim)
        note("wigner_grid_points", cfg.wigner_grid_points)
        for source, dims_s in (
            (wigner.StateSource.ANALYTIC, dims_a),
            (wigner.StateSource.NUMERIC, dims_n),
        ):
            snaps = wigner.snapshot_set(
                p, source, dims_s, n_grid=cfg.wigner_grid_points
            )
            for i, snap in enumerate(snaps):
                stem = _stem(
                    f"wigner_{snap.subsystem}_t{i // 2}", snap.source.value, job.tag
                )
                emit.grid(snap.grid, stem)
                note(f"{stem}_mass", snap.grid.total_mass())
                note(f"{stem}_min", float(snap.grid.values.min()))

    for name in emit.files:
        man.append(f"output={name}")
    return emit.files, man


def run(config: RunConfig) -> list:
    """Execute a RunConfig (expanding its preset); returns the files written."""
    try:
        os.makedirs(config.output_dir, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output_dir {config.output_dir!r}: {exc}") from exc
    jobs = expand_jobs(config)
    sections = []
    files = []
    for job in jobs:
        job_files, man = _run_job(job)
        files.extend(job_files)
        sections.append(f"[job {job.tag or 'main'}]\n" + "\n".join(man))
    manifest = os.path.join(config.output_dir, "manifest.txt")
    atomic_write_text(manifest, "\n\n".join(sections) + "\n")
    files.append("manifest.txt")
    return files


def validate(config: RunConfig) -> str:
    """Check a config and report recommended dims and effort, without running."""
    lines = []
    for job in expand_jobs(config):
        cfg = job.config
        p = cfg.params
        dims = cfg.dims or auto_numeric_dims(p, cfg.t_end)
        lines.append(f"job {job.tag or 'main'}: ok")
        for key in _PARAM_KEYS:
            lines.append(f"  {key}={_fmt(getattr(p, key))}")
        lines.append(f"  t_end={_fmt(cfg.t_end)} n_samples={cfg.n_samples}")
        lines.append(f"  modes={','.join(cfg.modes)} filter={_fmt(cfg.filter)}")
        lines.append(
            f"  recommended_field_dim={dims.field_dim}"
            f" recommended_mirror_dim={dims.mirror_dim}"
        )
        if "driven-numeric" in cfg.modes or "wigner" in cfg.modes:
            icfg = oracle.recommend_integrator_config(p, cfg.t_end, dims, cfg.norm_tolerance)
            dt = cfg.dt if cfg.dt is not None else icfg.dt
            n_steps = math.ceil(cfg.t_end / dt)
            state_mb = dims.joint * 16 * (cfg.n_samples + 8) / 1e6
            lines.append(
                f"  dt={_fmt(dt)} est_steps={n_steps} est_state_memory_mb={state_mb:.1f}"
            )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage problems to exit code 1
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="simulate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "execute a config"), ("validate", "check a config")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", required=True, help="path to key=value config file")
        s.add_argument("--preset", help="preset name, overriding the config file")
        s.add_argument("--out", help="output directory")
        s.add_argument("--filter", action="store_true", help="also emit filtered series")
        s.add_argument("--dims", help="truncation as FIELD,MIRROR")
    return parser


def _apply_flags(config: RunConfig, args) -> RunConfig:
    if args.out:
        config = replace(config, output_dir=args.out)
    if args.filter:
        config = replace(config, filter=True)
    if args.dims:
        try:
            fd, md = (int(x) for x in args.dims.split(","))
        except ValueError as exc:
            raise ConfigError(f"--dims expects FIELD,MIRROR integers, got {args.dims!r}") from exc
        config = replace(config, dims=FockDims(fd, md))
    return config


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = _apply_flags(load_config(args.config, args.preset), args)
        if args.command == "validate":
            print(validate(config))
            return 0
        files = run(config)
        print(f"wrote {len(files)} files to {config.output_dir}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except TruncationError as exc:
        print(f"truncation inadequacy: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
