"""Scenario files: ``[section]`` headers with ``key = value`` lines."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Set, Tuple, Union

SCENARIOS = ("flat2d", "minkowski2d", "hodograph", "uncoupled", "vacuum-flat", "vacuum-curved", "matter")

_RUN = ({"t_start", "t_end"}, {"rel_tol", "abs_tol", "n_samples"})
_GRID2D = ({"x_min", "x_max", "y_min", "y_max", "nx", "ny"}, set())

# scenario -> section -> (required keys, optional keys)
SCHEMA: Dict[str, Dict[str, Tuple[Set[str], Set[str]]]] = {
    "flat2d": {"params": ({"l"}, {"c", "cprime", "const"}), "grid": _GRID2D},
    "minkowski2d": {"params": ({"l"}, {"c", "cprime", "const"}), "grid": _GRID2D},
    "hodograph": {
        "params": ({"a"}, {"A", "B", "normC", "form"}),
        "grid": ({"r_min", "r_max", "theta_min", "theta_max", "nr", "ntheta"}, set()),
    },
    "uncoupled": {
        "params": ({"lambda", "b"}, set()),
        "initial": (set(), {"sign", "phi"}),
        "run": _RUN,
    },
    "vacuum-flat": {
        "params": ({"lambda", "K", "Lambda"}, {"R0"}),
        "initial": ({"y"}, {"H_sign", "phi"}),
        "run": _RUN,
    },
    "vacuum-curved": {
        "params": ({"lambda", "K", "Lambda"}, {"alpha"}),
        "initial": ({"u", "z"}, set()),
        "run": _RUN,
    },
    "matter": {
        "params": ({"lambda", "Lambda", "omega"}, {"K", "k", "rho0", "R0", "rho_rad0", "close"}),
        "initial": ({"phidot", "phiddot"}, {"phi"}),
        "run": _RUN,
    },
}

INT_KEYS = {"nx", "ny", "nr", "ntheta", "n_samples", "k", "sign", "H_sign"}
STR_KEYS = {"form", "close", "name", "title", "dir"}

Value = Union[float, int, str]


class ConfigError(ValueError):
    """Malformed scenario file; the message names the offending key."""


@dataclass
class ScenarioConfig:
    scenario: str
    params: Dict[str, Value] = field(default_factory=dict)
    initial: Dict[str, Value] = field(default_factory=dict)
    run: Dict[str, Value] = field(default_factory=dict)
    grid: Dict[str, Value] = field(default_factory=dict)
    title: str = ""
    out_dir: Optional[str] = None
    source: Optional[Path] = None

    def get(self, section: str, key: str, default=None):
        return getattr(self, section).get(key, default)


def _convert(section: str, key: str, raw: str) -> Value:
    raw = raw.strip()
    if key in STR_KEYS:
        return raw
    try:
        if key in INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        kind = "an integer" if key in INT_KEYS else "a number"
        raise ConfigError(f"[{section}] {key}: expected {kind}, got {raw!r}") from None


def parse_config(text: str, source: Optional[Path] = None) -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep K and k apart
    try:
        cp.read_string(text, source=str(source) if source else "<string>")
    except configparser.Error as exc:
        raise ConfigError(f"unparsable config: {exc}") from None

    if not cp.has_section("scenario"):
        raise ConfigError("[scenario] name: missing section")
    sc = dict(cp["scenario"])
    if "name" not in sc:
        raise ConfigError("[scenario] name: required key missing")
    for key in sc:
        if key not in ("name", "title"):
            raise ConfigError(f"[scenario] {key}: unknown key")
    name = sc["name"].strip()
    if name not in SCHEMA:
        raise ConfigError(f"[scenario] name: unknown scenario {name!r} (choose from {', '.join(SCENARIOS)})")
    schema = SCHEMA[name]

    cfg = ScenarioConfig(scenario=name, title=sc.get("title", name).strip(), source=source)
    for section in cp.sections():
        if section == "scenario":
            continue
        if section == "output":
            for key, raw in cp[section].items():
                if key != "dir":
                    raise ConfigError(f"[output] {key}: unknown key")
                cfg.out_dir = raw.strip()
            continue
        if section not in schema:
            raise ConfigError(f"[{section}]: section not used by scenario {name!r}")
        required, optional = schema[section]
        values = {}
        for key, raw in cp[section].items():
            if key not in required | optional:
                raise ConfigError(f"[{section}] {key}: unknown key")
            values[key] = _convert(section, key, raw)
        setattr(cfg, section, values)

    for section, (required, _) in schema.items():
        present = getattr(cfg, section)
        for key in sorted(required):
            if key not in present:
                raise ConfigError(f"[{section}] {key}: required key missing")
    _check_ranges(cfg)
    return cfg


def _check_ranges(cfg: ScenarioConfig) -> None:
    run, grid = cfg.run, cfg.grid
    if run:
        if not run["t_end"] > run["t_start"]:
            raise ConfigError("[run] t_end: must exceed t_start")
        for key in ("rel_tol", "abs_tol"):
            if key in run and not run[key] > 0:
                raise ConfigError(f"[run] {key}: must be positive")
        if "n_samples" in run and run["n_samples"] < 2:
            raise ConfigError("[run] n_samples: need at least 2")
    for lo, hi in (("x_min", "x_max"), ("y_min", "y_max"), ("r_min", "r_max"), ("theta_min", "theta_max")):
        if lo in grid and not grid[hi] > grid[lo]:
            raise ConfigError(f"[grid] {hi}: must exceed {lo}")
    for key in ("nx", "ny", "nr", "ntheta"):
        if key in grid and grid[key] < 2:
            raise ConfigError(f"[grid] {key}: need at least 2")
    if "r_min" in grid and not grid["r_min"] > 0:
        raise ConfigError("[grid] r_min: must be positive")
    if cfg.params.get("form", "corrected") not in ("corrected", "literal"):
        raise ConfigError("[params] form: expected 'corrected' or 'literal'")
    if cfg.params.get("close", "K") not in ("K", "rho0", "none"):
        raise ConfigError("[params] close: expected 'K', 'rho0' or 'none'")
    if cfg.params.get("k", 0) not in (-1, 0, 1):
        raise ConfigError("[params] k: must be -1, 0 or 1")
    for key in ("sign", "H_sign"):
        if cfg.initial.get(key, 1) not in (-1, 1):
            raise ConfigError(f"[initial] {key}: must be +1 or -1")


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, source=path)
