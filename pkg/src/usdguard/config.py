"""Declarative run configuration: defaults, file merge, flag overrides.

A run is described by one nested JSON document; command-line
``--set key=value`` flags override individual (dotted) fields and
``--seed`` overrides the simulation seed.  Validation failures carry
the dotted field path.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


DEFAULTS: dict[str, Any] = {
    "alpha": 0.5,
    "phi": 0.0,
    "nu": 0.01,
    "n_cut": 64,
    "decoy": {"kind": "cat", "r": 0.5, "amplitudes": None},
    "channel": {"g": 0.9, "e": 0.01, "d0": 0.01, "d1": 0.01},
    "eve": None,
    "simulation": {"n_pulses": 100000, "seed": 1, "z": 5.0, "chunk_size": 65536},
    "loss": {"mu": 0.5, "eta_b": 0.5, "eta_d": 0.2, "p_d": 0.01},
    "sweep": None,
    "tolerances": {"num_tol": 1e-10, "tail_tol": 1e-12, "degeneracy_tol": 1e-8},
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _parse_set_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text  # bare words (e.g. decoy kinds) are strings


def _apply_set(cfg: dict, key: str, value: Any) -> None:
    parts = key.split(".")
    node = cfg
    for part in parts[:-1]:
        nxt = node.get(part)
        if not isinstance(nxt, dict):
            nxt = {}
            node[part] = nxt
        node = nxt
    node[parts[-1]] = value


def load_config(
    path: str | None = None,
    sets: list[str] | None = None,
    seed: int | None = None,
) -> dict:
    """Resolve the effective config: defaults <- file <- --set <- --seed."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {path}: {exc}")
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top-level value must be an object")
        cfg = _deep_merge(cfg, loaded)
    for item in sets or []:
        if "=" not in item:
            raise ConfigError("--set", f"expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        _apply_set(cfg, key.strip(), _parse_set_value(value.strip()))
    if seed is not None:
        cfg["simulation"]["seed"] = seed
    return cfg


def require_number(cfg: dict, field: str, lo: float | None = None, hi: float | None = None) -> float:
    value = _lookup(cfg, field)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(field, f"expected a number, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(field, f"must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(field, f"must be <= {hi}, got {value}")
    return float(value)


def require_int(cfg: dict, field: str, lo: int | None = None) -> int:
    value = _lookup(cfg, field)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(field, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(field, f"must be >= {lo}, got {value}")
    return value


def _lookup(cfg: dict, field: str) -> Any:
    node: Any = cfg
    for part in field.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(field, "missing value")
        node = node[part]
    return node
