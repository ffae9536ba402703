"""Flat ``key = value`` configuration files.

Blank lines and lines starting with ``#`` are ignored.  The same format is
used for analysis runs and for trader-population specs, e.g.::

    n_traders   = 100000
    mu_alpha    = 0.5
    sigma_alpha = 0.1
    alpha_dist  = normal
    n_grid      = 100, 1000, 10000, 100000
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import InvalidSpecError
from .trader_sim import TraderPopulationSpec


def read_keyvalue(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidSpecError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise InvalidSpecError(f"{path}:{lineno}: empty key")
            out[key] = value
    return out


def _to_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise InvalidSpecError(f"not a boolean: {text!r}")


def _coerce(name: str, kind, text: str):
    try:
        if kind in (bool, "bool"):
            return _to_bool(text)
        if kind in (int, "int"):
            return int(float(text)) if "e" in text.lower() else int(text)
        if kind in (float, "float"):
            return float(text)
    except ValueError:
        raise InvalidSpecError(f"{name}: cannot parse {text!r}") from None
    return text


def _int_list(name: str, text: str) -> tuple[int, ...]:
    return tuple(_coerce(name, int, t.strip()) for t in text.split(",") if t.strip())


@dataclass(frozen=True)
class SimulationConfig:
    spec: TraderPopulationSpec
    n_grid: tuple[int, ...] = (100, 1_000, 10_000, 100_000)
    n_seeds: int = 1
    workers: int = 1


def load_simulation_config(path: str | Path) -> SimulationConfig:
    """Parse a population spec file; unknown keys are an error."""
    values = read_keyvalue(path)
    spec_fields = {f.name: f.type for f in fields(TraderPopulationSpec)}
    kwargs = {}
    extra = {}
    for key, text in values.items():
        if key in spec_fields:
            kwargs[key] = _coerce(key, spec_fields[key], text)
        elif key == "n_grid":
            extra["n_grid"] = _int_list(key, text)
        elif key in ("n_seeds", "workers"):
            extra[key] = _coerce(key, int, text)
        else:
            raise InvalidSpecError(f"{path}: unknown key {key!r}")
    cfg = SimulationConfig(TraderPopulationSpec(**kwargs), **extra)
    if not cfg.n_grid or any(b <= a for a, b in zip(cfg.n_grid, cfg.n_grid[1:])) or cfg.n_grid[0] < 1:
        raise InvalidSpecError("n_grid must be a strictly ascending list of positive counts")
    if cfg.n_seeds < 1 or cfg.workers < 1:
        raise InvalidSpecError("n_seeds and workers must be >= 1")
    return cfg


@dataclass(frozen=True)
class RunConfig:
    price_volume_path: str = ""
    risk_free_path: str = ""
    window: int = 125
    annualization: float = 252.0
    rho_mode: str = "estimated"
    segments: tuple[str, ...] = field(default_factory=tuple)
    output_dir: str = "."
    seed: int = 0
    yield_percent: bool = False
    mode: str = "reconstruction"
    ks_mode: str = "levels"
    workers: int = 1

    def __post_init__(self):
        if self.window < 3:
            raise InvalidSpecError(f"window must be >= 3, got {self.window}")
        if not self.annualization > 0:
            raise InvalidSpecError("annualization must be positive")
        if self.rho_mode not in ("estimated", "zero"):
            raise InvalidSpecError("rho_mode must be 'estimated' or 'zero'")
        if self.mode not in ("reconstruction", "point"):
            raise InvalidSpecError("mode must be 'reconstruction' or 'point'")
        if self.ks_mode not in ("levels", "increments"):
            raise InvalidSpecError("ks_mode must be 'levels' or 'increments'")
        if self.workers < 1:
            raise InvalidSpecError("workers must be >= 1")

    @property
    def dt_years(self) -> float:
        return 1.0 / self.annualization


_RUN_TYPES = {f.name: f.type for f in fields(RunConfig)}


def run_config_values(path: str | Path) -> dict:
    """Typed values from a run config file, ready to pass to :class:`RunConfig`."""
    out = {}
    for key, text in read_keyvalue(path).items():
        if key not in _RUN_TYPES:
            raise InvalidSpecError(f"{path}: unknown key {key!r}")
        if key == "segments":
            out[key] = tuple(s.strip() for s in text.split(",") if s.strip())
        else:
            out[key] = _coerce(key, _RUN_TYPES[key], text)
    return out
