"""Pipeline configuration: ``key = value`` text files plus command-line overrides."""

from __future__ import annotations

import dataclasses
import hashlib
import typing
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import DormancyError


class ConfigError(DormancyError, ValueError):
    pass


@dataclass
class PipelineConfig:
    # paths
    papers: str | None = None
    citations: str | None = None
    index: str | None = None
    triads: str | None = None
    output_dir: str = "out"
    # corpus window
    y_min: int = 1970
    y_max: int = 2020
    # selection
    citation_pct: float = 0.95
    b_pct: float = 0.99
    b_per_field: bool = False
    horizon: int | None = None
    # triads
    prince_cutoff_year: int | None = None
    prince_strict: bool = True
    st_inclusive: bool = True
    # stats
    min_csb: int = 10
    min_cpr: int = 10
    ratio_mode: str = "either"
    table_mode: str = "both"
    aggregation: str = "macro"
    e_nsb_variant: str = "conjunctive"
    kde_bandwidth: float | None = None
    kde_points: int = 512
    kde_reflect: bool = True
    # execution
    workers: int = 1
    seed: int = 42
    # simulate
    n_papers: int = 10_000
    refs_per_paper: int = 10
    attachment_offset: float = 1.0
    recency_half_life: float = 5.0
    fields: int = 5
    n_planted: int = 3
    sleep_years: int = 20
    burst_size: int = 50
    burst_years: int = 5
    n_st: int = 6
    n_sb_only: int = 6
    n_pr_only: int = 8

    def validate(self) -> "PipelineConfig":
        for name in ("citation_pct", "b_pct"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.ratio_mode not in ("either", "both") or self.table_mode not in ("either", "both"):
            raise ConfigError("ratio_mode/table_mode must be 'either' or 'both'")
        if self.aggregation not in ("macro", "micro"):
            raise ConfigError("aggregation must be 'macro' or 'micro'")
        if self.e_nsb_variant not in ("conjunctive", "plain"):
            raise ConfigError("e_nsb_variant must be 'conjunctive' or 'plain'")
        if self.kde_bandwidth is not None and not self.kde_bandwidth > 0:
            raise ConfigError("kde_bandwidth must be positive")
        return self

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {format_value(v)}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]

    def updated(self, values: dict) -> "PipelineConfig":
        return dataclasses.replace(self, **values)


def format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


_TYPES = typing.get_type_hints(PipelineConfig)


def field_type(name: str):
    """Underlying scalar type of a config field (``X | None`` unwrapped)."""
    tp = _TYPES[name]
    args = [a for a in typing.get_args(tp) if a is not type(None)]
    return args[0] if args else tp


def parse_value(name: str, text: str):
    if name not in _TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    text = text.strip()
    optional = type(None) in typing.get_args(_TYPES[name])
    if optional and text.lower() in ("none", "null", ""):
        return None
    tp = field_type(name)
    try:
        if tp is bool:
            low = text.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        return tp(text)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {text!r}") from None


def parse_config_text(text: str) -> dict:
    values = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        values[key] = parse_value(key, val)
    return values


def load_config(path=None, overrides: dict | None = None) -> PipelineConfig:
    cfg = PipelineConfig()
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        cfg = cfg.updated(parse_config_text(p.read_text()))
    if overrides:
        cfg = cfg.updated(overrides)
    return cfg.validate()
