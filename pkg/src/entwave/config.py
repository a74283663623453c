"""Experiment configuration: flat key = value text with sections.

Unknown keys are rejected by name; every numeric bound is checked at parse
time so failures happen before any computation starts.  The resolved
configuration is echoed into the output directory for exact re-runs.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    # gas
    gamma: float = 5.0 / 3.0
    mu: float = 0.15
    lam: float = 0.0
    kappa: float = 0.3
    # wave
    delta: float = 0.05
    rho_minus: float = 1.0
    theta_minus: float = 1.0
    # grid
    grid_mode: str = "auto"
    L: float = 0.0
    n1: int = 4096
    n2: int = 8
    n3: int = 8
    # run
    t_end: float = 400.0
    safety: float = 0.4
    observer_dt: float = 0.25
    collapse_transverse: bool = True
    checkpoint_dt: float = 0.0
    # perturbation
    amplitude: float = 0.01
    pert_width: float = 8.0
    mass_mode: str = "nonzero"
    seed: int = 0
    # fits
    fit_lo_frac: float = 0.25
    fit_hi_frac: float = 1.0
    # diagnostics
    kernel_c: float = 0.125
    dissipation_const: float = 1.0
    cross_const: float = 0.05
    # profile
    xi_halfwidth: float = 12.0
    profile_points: int = 4097


_SCHEMA = {
    "gas": {"gamma": float, "mu": float, "lam": float, "kappa": float},
    "wave": {"delta": float, "rho_minus": float, "theta_minus": float},
    "grid": {"grid_mode": str, "L": float, "n1": int, "n2": int, "n3": int},
    "run": {
        "t_end": float,
        "safety": float,
        "observer_dt": float,
        "collapse_transverse": bool,
        "checkpoint_dt": float,
    },
    "perturbation": {
        "amplitude": float,
        "pert_width": float,
        "mass_mode": str,
        "seed": int,
    },
    "fits": {"fit_lo_frac": float, "fit_hi_frac": float},
    "diagnostics": {"kernel_c": float, "dissipation_const": float, "cross_const": float},
    "profile": {"xi_halfwidth": float, "profile_points": int},
}

_RANGES = [
    ("gamma", lambda c: c.gamma > 1.0, "gamma must exceed 1"),
    ("mu", lambda c: c.mu > 0.0, "mu must be positive"),
    ("lam", lambda c: c.mu + c.lam >= 0.0, "mu + lam must be nonnegative"),
    ("kappa", lambda c: c.kappa > 0.0, "kappa must be positive"),
    ("delta", lambda c: 0.0 <= c.delta <= 0.2, "delta must lie in [0, 0.2]"),
    ("rho_minus", lambda c: c.rho_minus > 0.0, "rho_minus must be positive"),
    ("theta_minus", lambda c: c.theta_minus > 0.0, "theta_minus must be positive"),
    ("grid_mode", lambda c: c.grid_mode in ("auto", "manual"), "grid_mode must be auto or manual"),
    ("L", lambda c: c.grid_mode == "auto" or c.L > 0.0, "manual grid requires L > 0"),
    ("n1", lambda c: c.n1 >= 128, "n1 must be at least 128"),
    ("n2", lambda c: c.n2 >= 4 and (c.n2 & (c.n2 - 1)) == 0, "n2 must be a power of two >= 4"),
    ("n3", lambda c: c.n3 >= 4 and (c.n3 & (c.n3 - 1)) == 0, "n3 must be a power of two >= 4"),
    ("t_end", lambda c: c.t_end >= 0.0, "t_end must be nonnegative"),
    ("safety", lambda c: 0.0 < c.safety <= 1.0, "safety must lie in (0, 1]"),
    ("observer_dt", lambda c: c.observer_dt > 0.0, "observer_dt must be positive"),
    ("checkpoint_dt", lambda c: c.checkpoint_dt >= 0.0, "checkpoint_dt must be nonnegative"),
    ("amplitude", lambda c: c.amplitude >= 0.0, "amplitude must be nonnegative"),
    ("pert_width", lambda c: c.pert_width > 0.0, "pert_width must be positive"),
    ("mass_mode", lambda c: c.mass_mode in ("nonzero", "zero"), "mass_mode must be nonzero or zero"),
    ("fit_lo_frac", lambda c: 0.0 <= c.fit_lo_frac < c.fit_hi_frac, "fit window fractions must satisfy 0 <= lo < hi"),
    ("fit_hi_frac", lambda c: c.fit_hi_frac <= 1.0, "fit_hi_frac must not exceed 1"),
    ("kernel_c", lambda c: c.kernel_c > 0.0, "kernel_c must be positive"),
    ("dissipation_const", lambda c: c.dissipation_const > 0.0, "dissipation_const must be positive"),
    ("cross_const", lambda c: c.cross_const >= 0.0, "cross_const must be nonnegative"),
    ("xi_halfwidth", lambda c: c.xi_halfwidth > 0.0, "xi_halfwidth must be positive"),
    ("profile_points", lambda c: c.profile_points >= 256, "profile_points must be at least 256"),
]


def _convert(raw: str, typ, key: str):
    try:
        if typ is bool:
            low = raw.strip().lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if typ is int:
            val = int(raw)
        elif typ is float:
            val = float(raw)
        else:
            val = raw.strip()
        return val
    except ValueError as err:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as {typ.__name__}") from err


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    for key, check, msg in _RANGES:
        if not check(cfg):
            raise ConfigError(f"key {key!r}: {msg} (got {getattr(cfg, key)!r})")
    return cfg


def parse_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive (L vs l)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            known = ", ".join(sorted(_SCHEMA))
            raise ConfigError(f"unknown section [{section}]; known sections: {known}")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                known = ", ".join(sorted(_SCHEMA[section]))
                raise ConfigError(
                    f"unknown key {key!r} in [{section}]; known keys: {known}"
                )
            values[key] = _convert(raw, _SCHEMA[section][key], key)
    return validate(ExperimentConfig(**values))


def emit_config(cfg: ExperimentConfig) -> str:
    lines = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        for key in keys:
            val = getattr(cfg, key)
            if isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)


def write_resolved(cfg: ExperimentConfig, outdir) -> None:
    from pathlib import Path

    path = Path(outdir) / "config.resolved.ini"
    path.write_text(emit_config(cfg))
