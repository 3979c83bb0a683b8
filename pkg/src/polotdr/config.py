"""Scenario configuration: a flat ``key = value`` text file.

Blank lines and ``#`` comments are ignored. Unknown keys, bad types and
violated constraints raise :class:`ConfigError` naming the key and line.
:func:`format_config` writes the resolved form, which parses back to an
identical :class:`ScenarioConfig`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .estimators import Scheme
from .fiber import FiberSpec
from .metrics import DiffMode
from .noise import NoiseConfig

SWEEPS = ("theta_mis", "theta_cap", "distance_profile", "monte_carlo")
GRID_POINTS = 64


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line

    def __str__(self):
        where = []
        if self.key is not None:
            where.append(f"key '{self.key}'")
        if self.line is not None:
            where.append(f"line {self.line}")
        prefix = f"{', '.join(where)}: " if where else ""
        return prefix + self.args[0]


@dataclass(frozen=True)
class ScenarioConfig:
    fiber: FiberSpec
    noise: NoiseConfig
    sweep: str
    schemes: tuple = (Scheme.SISO, Scheme.SIMO, Scheme.MIMO)
    sweep_grid: tuple = ()
    n_fibers: int = 1
    master_seed: int = 1
    diff_mode: DiffMode = DiffMode.TEMPORAL
    name: str = ""
    theta_mis: float = 0.0
    preset_theta_cap: float | None = None
    preset_beta: float | None = None
    preset_gamma: float | None = None
    segment_z_m: float | None = None
    simo_launch: str = "x"
    exclude_flagged: bool = False
    workers: int = 1

    @property
    def simo_column(self):
        return 0 if self.simo_launch == "x" else 1

    @property
    def has_preset(self):
        return None not in (self.preset_theta_cap, self.preset_beta, self.preset_gamma)


def _float(text):
    value = float(text)
    if math.isnan(value):
        raise ValueError("NaN is not allowed")
    return value


def _int(text):
    return int(text, 0)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _opt_float(text):
    return None if text.strip().lower() in ("auto", "none", "") else _float(text)


def _float_list(text):
    return tuple(_float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _schemes(text):
    items = [x for x in text.split(",") if x.strip()]
    if not items:
        raise ValueError("at least one scheme is required")
    out = []
    for x in items:
        s = Scheme.parse(x)
        if s not in out:
            out.append(s)
    return tuple(out)


def _sweep(text):
    t = text.strip().lower().replace("-", "_")
    if t not in SWEEPS:
        raise ValueError(f"expected one of {', '.join(SWEEPS)}")
    return t


def _launch(text):
    t = text.strip().lower()
    if t not in ("x", "y"):
        raise ValueError("expected x or y")
    return t


# key -> (parser, default); None default marks a required key
KEYS = {
    "sweep": (_sweep, None),
    "length_m": (_float, None),
    "name": (str.strip, ""),
    "segment_length_m": (_float, 10.0),
    "alpha_db_per_km": (_float, 0.2),
    "scatterers_per_segment": (_int, 20),
    "group_index": (_float, 1.468),
    "linewidth_hz": (_float, 75.0),
    "dt_s": (_float, 160e-6),
    "n_samples": (_int, 12_500),
    "snr_db": (_float, 30.0),
    "theta_jitter_rad_per_sqrt_s": (_float, 0.0),
    "schemes": (_schemes, "SISO,SIMO,MIMO"),
    "sweep_grid": (_float_list, ""),
    "n_fibers": (_int, "auto"),
    "master_seed": (_int, 1),
    "diff_mode": (DiffMode.parse, "temporal"),
    "theta_mis": (_float, 0.0),
    "preset_theta_cap": (_opt_float, "auto"),
    "preset_beta": (_opt_float, "auto"),
    "preset_gamma": (_opt_float, "auto"),
    "segment_z_m": (_opt_float, "auto"),
    "simo_launch": (_launch, "x"),
    "exclude_flagged": (_bool, False),
    "workers": (_int, 1),
}


def default_grid(sweep):
    if sweep == "theta_mis":
        return tuple(float(x) for x in np.linspace(0.0, np.pi, GRID_POINTS))
    if sweep == "theta_cap":
        return tuple(float(x) for x in np.linspace(0.0, np.pi / 2, GRID_POINTS))
    return ()


def read_pairs(text):
    """``{key: (raw_value, line_number)}`` from config text."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in pairs:
            raise ConfigError(f"duplicate key (first set on line {pairs[key][1]})", key=key, line=lineno)
        pairs[key] = (value, lineno)
    return pairs


def build_config(pairs):
    values, lines = {}, {}
    for key, (parser, default) in KEYS.items():
        if key in pairs:
            raw, lineno = pairs[key]
            lines[key] = lineno
            try:
                values[key] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value {raw!r}: {exc}", key=key, line=lineno) from None
        elif default is None:
            raise ConfigError("missing required key", key=key)
        else:
            values[key] = parser(default) if isinstance(default, str) and key != "n_fibers" else default

    def fail(key, msg):
        raise ConfigError(msg, key=key, line=lines.get(key))

    sweep = values["sweep"]
    if values["n_fibers"] == "auto":
        values["n_fibers"] = 50 if sweep == "monte_carlo" else 1
    try:
        fiber = FiberSpec(
            values["length_m"],
            values["segment_length_m"],
            values["alpha_db_per_km"],
            values["scatterers_per_segment"],
            values["group_index"],
        )
    except ValueError as exc:
        key = next((k for k in ("segment_length_m", "alpha_db_per_km", "scatterers_per_segment",
                                "group_index", "length_m") if k in str(exc)), None)
        fail(key, f"constraint violated: {exc}")
    try:
        noise = NoiseConfig(
            values["linewidth_hz"],
            values["dt_s"],
            values["n_samples"],
            values["snr_db"],
            values["theta_jitter_rad_per_sqrt_s"],
        )
    except ValueError as exc:
        key = next((k for k in ("linewidth_hz", "dt_s", "n_samples", "snr_db",
                                "theta_jitter_rad_per_sqrt_s") if k in str(exc)), None)
        fail(key, f"constraint violated: {exc}")

    if values["n_fibers"] < 1:
        fail("n_fibers", "constraint violated: n_fibers must be >= 1")
    if sweep == "distance_profile" and values["n_fibers"] != 1:
        fail("n_fibers", "constraint violated: distance_profile runs exactly one fiber")
    if values["workers"] < 1:
        fail("workers", "constraint violated: workers must be >= 1")
    if not 0 <= values["master_seed"] < 2**64:
        fail("master_seed", "constraint violated: master_seed must fit in 64 unsigned bits")
    grid = values["sweep_grid"] or default_grid(sweep)
    if sweep in ("theta_mis", "theta_cap") and not grid:
        fail("sweep_grid", "constraint violated: sweep needs a nonempty grid")
    z = values["segment_z_m"]
    if z is None:
        z = fiber.segment_length_m / 2
    if z < 0:
        fail("segment_z_m", "constraint violated: segment_z_m must be >= 0")
    name = values["name"] or sweep

    return ScenarioConfig(
        fiber=fiber,
        noise=noise,
        sweep=sweep,
        schemes=values["schemes"],
        sweep_grid=tuple(grid),
        n_fibers=values["n_fibers"],
        master_seed=values["master_seed"],
        diff_mode=values["diff_mode"],
        name=name,
        theta_mis=values["theta_mis"],
        preset_theta_cap=values["preset_theta_cap"],
        preset_beta=values["preset_beta"],
        preset_gamma=values["preset_gamma"],
        segment_z_m=float(z),
        simo_launch=values["simo_launch"],
        exclude_flagged=values["exclude_flagged"],
        workers=values["workers"],
    )


def parse_config_text(text, overrides=None):
    pairs = read_pairs(text)
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError("unknown key", key=key)
        pairs[key] = (str(value), None)
    return build_config(pairs)


def parse_config(path, overrides=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), overrides)


def _fmt(value):
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, (Scheme, DiffMode)):
        return value.value
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def config_items(cfg):
    """Resolved ``(key, value)`` pairs in documented order."""
    flat = {
        "sweep": cfg.sweep,
        "name": cfg.name,
        "length_m": cfg.fiber.length_m,
        "segment_length_m": cfg.fiber.segment_length_m,
        "alpha_db_per_km": cfg.fiber.alpha_db_per_km,
        "scatterers_per_segment": cfg.fiber.scatterers_per_segment,
        "group_index": cfg.fiber.group_index,
        "linewidth_hz": cfg.noise.linewidth_hz,
        "dt_s": cfg.noise.dt_s,
        "n_samples": cfg.noise.n_samples,
        "snr_db": cfg.noise.snr_db,
        "theta_jitter_rad_per_sqrt_s": cfg.noise.theta_jitter_rad_per_sqrt_s,
        "schemes": cfg.schemes,
        "sweep_grid": cfg.sweep_grid,
        "n_fibers": cfg.n_fibers,
        "master_seed": cfg.master_seed,
        "diff_mode": cfg.diff_mode,
        "theta_mis": cfg.theta_mis,
        "preset_theta_cap": cfg.preset_theta_cap,
        "preset_beta": cfg.preset_beta,
        "preset_gamma": cfg.preset_gamma,
        "segment_z_m": cfg.segment_z_m,
        "simo_launch": cfg.simo_launch,
        "exclude_flagged": cfg.exclude_flagged,
        "workers": cfg.workers,
    }
    return [(k, _fmt(v)) for k, v in flat.items()]


def format_config(cfg):
    return "".join(f"{k} = {v}\n" for k, v in config_items(cfg))


def with_overrides(cfg, **changes):
    """Re-resolve ``cfg`` with some keys replaced (values as config text)."""
    pairs = {k: (v, None) for k, v in config_items(cfg)}
    for k, v in changes.items():
        if k not in KEYS:
            raise ConfigError("unknown key", key=k)
        pairs[k] = (_fmt(v) if not isinstance(v, str) else v, None)
    return build_config(pairs)

