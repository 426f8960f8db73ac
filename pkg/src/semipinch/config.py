"""Engine/run configuration: TOML file plus dotted flag overrides."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .agent import AgentParams
from .errors import ConfigError
from .pinch import PinchThresholds
from .scene import SceneConfig
from .techniques import TechniqueId, TechniqueParams

SECTIONS = {
    "pinch": PinchThresholds,
    "params": TechniqueParams,
    "scene": SceneConfig,
    "agent": AgentParams,
}


@dataclass(frozen=True)
class EngineConfig:
    techniques: tuple[TechniqueId, ...] = (TechniqueId.SEMI_DWELL,)
    targets: tuple[int, ...] = (2, 4, 6)
    trials: int = 15
    seed: int = 0
    pinch: PinchThresholds = field(default_factory=PinchThresholds)
    params: TechniqueParams = field(default_factory=TechniqueParams)
    scene: SceneConfig = field(default_factory=SceneConfig)
    agent: AgentParams = field(default_factory=AgentParams)
    out: Path = Path("out")
    trace_out: Optional[Path] = None
    jobs: int = 1

    def validate(self) -> "EngineConfig":
        if not self.techniques:
            raise ConfigError("at least one technique is required")
        if not self.targets:
            raise ConfigError("at least one target count is required")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        for n in self.targets:
            replace(self.scene, target_count=n).validate()
        return self

    def to_dict(self) -> dict:
        """Provenance view; output locations and worker count are excluded."""
        return {
            "techniques": [t.value for t in self.techniques],
            "targets": list(self.targets),
            "trials": self.trials,
            "seed": self.seed,
            **{name: dataclasses.asdict(getattr(self, name)) for name in SECTIONS},
        }

    def digest(self) -> str:
        return digest_of(self.to_dict())


def digest_of(obj: Any) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def engine_dict(technique: TechniqueId, pinch: PinchThresholds, params: TechniqueParams) -> dict:
    return {
        "technique": technique.value,
        "pinch": dataclasses.asdict(pinch),
        "params": dataclasses.asdict(params),
    }


def trial_seeds(seed: int, technique: TechniqueId, target_count: int, trial: int) -> tuple[int, int]:
    """Derive (scene_seed, agent_seed).

    The scene seed ignores the technique so every technique sees the same
    layouts for a given (target_count, trial).
    """
    tech_index = list(TechniqueId).index(technique)

    def draw(*key: int) -> int:
        hi, lo = np.random.SeedSequence(seed, spawn_key=key).generate_state(2, np.uint32)
        return (int(hi) << 32) | int(lo)

    return draw(0, target_count, trial), draw(1, tech_index, target_count, trial)


def _coerce(section: str, cls, key: str, value):
    names = {f.name: f for f in dataclasses.fields(cls)}
    if key not in names:
        raise ConfigError(f"unknown setting {section}.{key}")
    default = getattr(cls(), key)
    try:
        if isinstance(default, bool):
            if isinstance(value, str):
                return value.strip().lower() in ("1", "true", "yes", "on")
            return bool(value)
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key}: cannot interpret {value!r}") from None


def _parse_list(value) -> tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        items = value
    elif isinstance(value, int):
        items = [value]
    else:
        items = [s for s in str(value).split(",") if s.strip()]
    try:
        return tuple(int(x) for x in items)
    except ValueError:
        raise ConfigError(f"cannot parse target counts from {value!r}") from None


def _parse_techniques(value) -> tuple[TechniqueId, ...]:
    if isinstance(value, str):
        if value.strip().lower() == "all":
            return tuple(TechniqueId)
        value = [s for s in value.split(",") if s.strip()]
    return tuple(TechniqueId.parse(v) for v in value)


def load_config_file(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def build_config(file_data: dict | None = None, overrides: dict | None = None) -> EngineConfig:
    """Merge file settings with flag overrides (flags win) into a validated config.

    Both inputs use the same shape: top-level ``technique``/``techniques``,
    ``targets``, ``trials``, ``seed`` and one table per section. Override
    keys may also be dotted (``"agent.reaction_time"``).
    """
    merged: dict = {}
    sections: dict[str, dict] = {name: {} for name in SECTIONS}
    for source in (file_data or {}, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key in SECTIONS and isinstance(value, dict):
                sections[key].update(value)
            elif "." in key:
                sec, _, sub = key.partition(".")
                if sec not in SECTIONS:
                    raise ConfigError(f"unknown setting {key}")
                sections[sec][sub] = value
            else:
                merged[key] = value

    kwargs: dict = {}
    for key, value in merged.items():
        if key in ("technique", "techniques"):
            kwargs["techniques"] = _parse_techniques(value)
        elif key == "targets":
            kwargs["targets"] = _parse_list(value)
        elif key in ("trials", "seed", "jobs"):
            try:
                kwargs[key] = int(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: cannot interpret {value!r}") from None
        elif key in ("out", "trace_out"):
            kwargs[key] = Path(value)
        else:
            raise ConfigError(f"unknown setting {key}")
    for name, cls in SECTIONS.items():
        values = {k: _coerce(name, cls, k, v) for k, v in sections[name].items()}
        kwargs[name] = cls(**values)
    return EngineConfig(**kwargs).validate()
