"""Scenario configuration: JSON parsing, validation, defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .godunov import PRESETS

__all__ = ["ScenarioConfig", "ConfigError", "parse_config", "apply_overrides"]

DEFAULT_X_MAX = 4.0
DEFAULT_CELLS = 2000
DEFAULT_CFL = 0.45
DEFAULT_SNAPSHOT_COUNT = 11


class ConfigError(ValueError):
    """Schema violation; the message names the offending field."""


@dataclass
class ScenarioConfig:
    preset: str
    params: dict = field(default_factory=dict)
    x_max: float = DEFAULT_X_MAX
    cells: int = DEFAULT_CELLS
    cfl: float = DEFAULT_CFL
    t_end: float = 10.0
    snapshot_times: list = field(default_factory=list)
    epsilon: Optional[float] = None  # selects the viscous oracle when set
    output_dir: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(
                f"preset: unknown preset {self.preset!r}; valid presets: {sorted(PRESETS)}"
            )
        missing = [p for p in PRESETS[self.preset] if p not in self.params]
        if missing:
            raise ConfigError(f"params: preset {self.preset!r} requires {missing}")
        extra = [p for p in self.params if p not in PRESETS[self.preset]]
        if extra:
            raise ConfigError(f"params: preset {self.preset!r} does not accept {extra}")
        if self.t_end < 0.0:
            raise ConfigError(f"t_end: must be non-negative, got {self.t_end}")
        if self.cells < 8:
            raise ConfigError(f"cells: need at least 8, got {self.cells}")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigError(f"cfl: must lie in (0, 1), got {self.cfl}")
        if self.x_max <= 0.0:
            raise ConfigError(f"x_max: must be positive, got {self.x_max}")
        if self.epsilon is not None and self.epsilon <= 0.0:
            raise ConfigError(f"epsilon: must be positive, got {self.epsilon}")
        if not self.snapshot_times:
            count = DEFAULT_SNAPSHOT_COUNT
            self.snapshot_times = [self.t_end * i / (count - 1) for i in range(count)]
        self.snapshot_times = sorted(float(t) for t in self.snapshot_times)
        if self.snapshot_times[0] < 0.0 or self.snapshot_times[-1] > self.t_end:
            raise ConfigError(
                f"snapshot_times: must lie within [0, t_end={self.t_end}]"
            )


_SCALAR_FIELDS = {
    "x_max": float,
    "cells": int,
    "cfl": float,
    "t_end": float,
    "epsilon": float,
    "output_dir": str,
    "seed": int,
}


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario document.

    Preset parameters may appear at the top level or under "params".
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"document: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError("document: expected a JSON object")
    doc = dict(doc)

    if "preset" not in doc:
        raise ConfigError("preset: required field is missing")
    preset = doc.pop("preset")
    if not isinstance(preset, str):
        raise ConfigError(f"preset: expected a string, got {preset!r}")

    params = doc.pop("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params: expected an object")
    params = {k: v for k, v in params.items()}
    # accept preset parameters given at the top level
    for key in list(doc):
        if preset in PRESETS and key in PRESETS[preset]:
            params[key] = doc.pop(key)

    kwargs = {}
    for key, cast in _SCALAR_FIELDS.items():
        if key in doc:
            value = doc.pop(key)
            if value is not None:
                try:
                    value = cast(value)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{key}: expected {cast.__name__}, got {value!r}") from exc
            kwargs[key] = value

    if "snapshot_times" in doc:
        times = doc.pop("snapshot_times")
        if not isinstance(times, list):
            raise ConfigError("snapshot_times: expected a list of instants")
        try:
            kwargs["snapshot_times"] = [float(t) for t in times]
        except (TypeError, ValueError) as exc:
            raise ConfigError("snapshot_times: entries must be numbers") from exc

    if doc:
        raise ConfigError(f"document: unknown fields {sorted(doc)}")

    for key, value in params.items():
        if not isinstance(value, (int, float)):
            raise ConfigError(f"params.{key}: expected a number, got {value!r}")

    return ScenarioConfig(preset=preset, params=params, **kwargs)


def apply_overrides(config: ScenarioConfig, overrides) -> ScenarioConfig:
    """Apply ``key=value`` strings on top of a parsed config.

    Keys address config fields or preset parameters (``alpha=0.5``).
    """
    doc = {
        "preset": config.preset,
        "params": dict(config.params),
        "x_max": config.x_max,
        "cells": config.cells,
        "cfl": config.cfl,
        "t_end": config.t_end,
        "snapshot_times": list(config.snapshot_times),
        "epsilon": config.epsilon,
        "output_dir": config.output_dir,
        "seed": config.seed,
    }
    touched = set()
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        if key in doc and key != "params":
            doc[key] = value
            touched.add(key)
        else:
            doc["params"][key] = value
    if "t_end" in touched and "snapshot_times" not in touched:
        doc.pop("snapshot_times")  # regenerate the default instants
    if doc["epsilon"] is None:
        doc.pop("epsilon")
    if doc["output_dir"] is None:
        doc.pop("output_dir")
    return parse_config(json.dumps(doc))
