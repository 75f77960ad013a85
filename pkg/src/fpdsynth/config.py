"""Run configuration (YAML; JSON is accepted since it is a YAML subset).

Schema::

    divider:
      f0: 2.6e9          # Hz
      fbw: 0.03
      n_way: 3
      order: 3
      z0: 50.0
      ripple_db: 0.04321
      g_preset: paper-3rd-order-20dB   # optional, overrides the recursion
    sweep:               # omit or null for synthesis only
      start: 2.4e9
      stop: 2.8e9
      points: 2001
    outputs: [touchstone, csv, svg, netlist, report]
    loss:
      qu: null           # unloaded Q, null = lossless
    refine:
      enabled: false
      target_rl_db: 20.0
      max_iter: 400
    microstrip:
      eps_r: 10.7
      h: 1.27e-3
      tan_delta: 0.0023
      z0: 50.0
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .prototype import PRESETS
from .synthesis import DividerSpec

__all__ = ["ConfigError", "SweepGrid", "RunConfig", "load_config", "parse_config", "dump_config", "OUTPUT_KINDS"]

OUTPUT_KINDS = ("touchstone", "csv", "svg", "netlist", "report")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepGrid:
    start: float = 2.4e9
    stop: float = 2.8e9
    points: int = 2001

    def __post_init__(self):
        if not (0 < self.start < self.stop):
            raise ConfigError(f"sweep: need 0 < start < stop, got start={self.start}, stop={self.stop}")
        if self.points < 2:
            raise ConfigError(f"sweep.points: need >= 2, got {self.points}")


@dataclass(frozen=True)
class RunConfig:
    f0: float = 2.6e9
    fbw: float = 0.03
    n_way: int = 3
    order: int = 3
    z0: float = 50.0
    ripple_db: float = 0.04321
    g_preset: str | None = "paper-3rd-order-20dB"
    sweep: SweepGrid | None = field(default_factory=SweepGrid)
    outputs: tuple[str, ...] = ("touchstone", "csv", "svg", "report")
    qu: float | None = None
    refine: bool = False
    target_rl_db: float = 20.0
    max_iter: int = 400
    eps_r: float = 10.7
    h: float = 1.27e-3
    tan_delta: float = 0.0023
    line_z0: float = 50.0

    @property
    def spec(self) -> DividerSpec:
        return DividerSpec(self.f0, self.fbw, self.n_way, self.order, self.z0, self.ripple_db)


def _num(section: dict, key: str, where: str, default, kind=float):
    val = section.get(key)
    if val is None:
        return default
    try:
        if isinstance(val, bool):
            raise TypeError
        out = float(val)  # YAML reads 2.6e9 as a string
        if not math.isfinite(out):
            raise ValueError
        if kind is int:
            if not out.is_integer():
                raise ValueError
            return int(out)
        return out
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {val!r}") from None


def _section(data: dict, key: str) -> dict:
    sec = data.get(key) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{key}: expected a mapping, got {type(sec).__name__}")
    return sec


def parse_config(data) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a mapping")
    unknown = set(data) - {"divider", "sweep", "outputs", "loss", "refine", "microstrip"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    d = RunConfig()
    div = _section(data, "divider")
    preset = div.get("g_preset", d.g_preset)
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"divider.g_preset: unknown preset {preset!r}")

    if "sweep" in data and data["sweep"] is None:
        grid = None
    else:
        sw = _section(data, "sweep")
        grid = SweepGrid(
            _num(sw, "start", "sweep", d.sweep.start),
            _num(sw, "stop", "sweep", d.sweep.stop),
            _num(sw, "points", "sweep", d.sweep.points, int),
        )
    outputs = data.get("outputs", list(d.outputs))
    if outputs is None:
        outputs = []
    if not isinstance(outputs, (list, tuple)) or any(o not in OUTPUT_KINDS for o in outputs):
        raise ConfigError(f"outputs: expected a list drawn from {OUTPUT_KINDS}, got {outputs!r}")

    loss = _section(data, "loss")
    ref = _section(data, "refine")
    ms = _section(data, "microstrip")
    enabled = ref.get("enabled", d.refine)
    if not isinstance(enabled, bool):
        raise ConfigError(f"refine.enabled: expected true/false, got {enabled!r}")
    try:
        cfg = RunConfig(
            f0=_num(div, "f0", "divider", d.f0),
            fbw=_num(div, "fbw", "divider", d.fbw),
            n_way=_num(div, "n_way", "divider", d.n_way, int),
            order=_num(div, "order", "divider", d.order, int),
            z0=_num(div, "z0", "divider", d.z0),
            ripple_db=_num(div, "ripple_db", "divider", d.ripple_db),
            g_preset=preset,
            sweep=grid,
            outputs=tuple(outputs),
            qu=_num(loss, "qu", "loss", None),
            refine=enabled,
            target_rl_db=_num(ref, "target_rl_db", "refine", d.target_rl_db),
            max_iter=_num(ref, "max_iter", "refine", d.max_iter, int),
            eps_r=_num(ms, "eps_r", "microstrip", d.eps_r),
            h=_num(ms, "h", "microstrip", d.h),
            tan_delta=_num(ms, "tan_delta", "microstrip", d.tan_delta),
            line_z0=_num(ms, "z0", "microstrip", d.line_z0),
        )
        cfg.spec  # validates the divider fields
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"divider: {exc}") from None
    if cfg.qu is not None and not cfg.qu > 0:
        raise ConfigError(f"loss.qu: must be > 0, got {cfg.qu}")
    if cfg.g_preset is not None and PRESETS[cfg.g_preset].order != cfg.order:
        raise ConfigError(f"divider.g_preset: {cfg.g_preset!r} does not match order {cfg.order}")
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML/JSON: {exc}") from None
    return parse_config(data)


def to_dict(cfg: RunConfig) -> dict:
    return {
        "divider": {
            "f0": cfg.f0,
            "fbw": cfg.fbw,
            "n_way": cfg.n_way,
            "order": cfg.order,
            "z0": cfg.z0,
            "ripple_db": cfg.ripple_db,
            "g_preset": cfg.g_preset,
        },
        "sweep": None if cfg.sweep is None else asdict(cfg.sweep),
        "outputs": list(cfg.outputs),
        "loss": {"qu": cfg.qu},
        "refine": {"enabled": cfg.refine, "target_rl_db": cfg.target_rl_db, "max_iter": cfg.max_iter},
        "microstrip": {"eps_r": cfg.eps_r, "h": cfg.h, "tan_delta": cfg.tan_delta, "z0": cfg.line_z0},
    }


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)
