"""Tracker parameters and the flat ``key = value`` config file format."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import InputError, ParameterError

# alternate spellings accepted in config files
_ALIASES = {"lambda": "lam"}


@dataclass(frozen=True)
class TrackerConfig:
    delta: float = 0.25          # search region growth per side, fraction of box size
    passes: int = 3              # MBD scan passes per update
    refresh_interval: int = 10   # frames between full-image saliency recomputation
    block: int = 5               # adaptive threshold block side
    lam: float = 7.0             # adaptive threshold offset
    se_rows: int = 5
    se_cols: int = 3
    q_diag: float = 0.01
    r_diag: float = 0.1
    max_dim: int = 300
    min_contrast: float = 10.0   # raw MBD units
    global_gate: bool = True     # also require saliency above the region's Otsu level

    def __post_init__(self):
        if self.passes < 1:
            raise ParameterError("passes must be >= 1")
        if self.refresh_interval < 1:
            raise ParameterError("refresh_interval must be >= 1")
        if self.block < 1 or self.block % 2 == 0:
            raise ParameterError(f"block must be odd and >= 1, got {self.block}")
        for name in ("se_rows", "se_cols"):
            value = getattr(self, name)
            if value < 1 or value % 2 == 0:
                raise ParameterError(f"{name} must be odd and >= 1, got {value}")
        if self.delta < 0 or self.lam < 0 or self.min_contrast < 0:
            raise ParameterError("delta, lam and min_contrast must be nonnegative")
        if self.q_diag < 0 or self.r_diag <= 0:
            raise ParameterError("q_diag must be >= 0 and r_diag > 0")
        if self.max_dim < 1:
            raise ParameterError("max_dim must be >= 1")

    def replace(self, **changes) -> "TrackerConfig":
        return dataclasses.replace(self, **changes)


def _field_types():
    return {f.name: f.type for f in dataclasses.fields(TrackerConfig)}


def _coerce(key, raw: str, kind):
    raw = raw.strip()
    try:
        if kind in (bool, "bool"):
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind in (int, "int"):
            return int(raw)
        return float(raw)
    except ValueError:
        raise InputError(f"bad value for {key!r}: {raw!r}") from None


def parse_overrides(pairs: dict) -> dict:
    """Map user-facing key/string pairs to typed ``TrackerConfig`` fields."""
    types = _field_types()
    out = {}
    for key, raw in pairs.items():
        name = _ALIASES.get(key, key)
        if name not in types:
            raise InputError(f"unknown config key {key!r}")
        out[name] = _coerce(key, str(raw), types[name])
    return out


def read_config_pairs(path) -> dict:
    """Typed field values from a ``key = value`` file; ``#`` starts a comment."""
    pairs = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value
    return parse_overrides(pairs)


def load_config(path, base: TrackerConfig | None = None) -> TrackerConfig:
    base = base or TrackerConfig()
    return base.replace(**read_config_pairs(path))


def dump_config(config: TrackerConfig) -> str:
    return "".join(f"{f.name} = {getattr(config, f.name)}\n"
                   for f in dataclasses.fields(config))
