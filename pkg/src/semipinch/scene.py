"""Grid-world layouts of selectable spheres."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .core import Vec3
from .errors import ConfigError


@dataclass(frozen=True)
class SceneConfig:
    distance: float = 13.5
    spacing: float = 1.0
    columns: int = 16
    rows: int = 7
    object_count: int = 40
    visual_radius: float = 0.2
    collider_scale: float = 3.0
    target_count: int = 4
    seed: int = 0

    def validate(self) -> "SceneConfig":
        if self.distance <= 0:
            raise ConfigError("scene.distance must be > 0")
        if self.spacing <= 0:
            raise ConfigError("scene.spacing must be > 0")
        if self.columns < 1 or self.rows < 1:
            raise ConfigError("scene.columns and scene.rows must be >= 1")
        if self.visual_radius <= 0:
            raise ConfigError("scene.visual_radius must be > 0")
        if self.collider_scale <= 0:
            raise ConfigError("scene.collider_scale must be > 0")
        if not 1 <= self.object_count <= self.columns * self.rows:
            raise ConfigError(
                f"scene.object_count must be in [1, columns*rows={self.columns * self.rows}]"
            )
        if not 1 <= self.target_count <= self.object_count:
            raise ConfigError(f"scene.target_count must be in [1, object_count={self.object_count}]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("scene.seed must be a 64-bit unsigned integer")
        return self


@dataclass(frozen=True)
class SceneObject:
    id: int
    position: Vec3
    visual_radius: float
    collider_radius: float
    is_target: bool


@dataclass(frozen=True)
class Scene:
    objects: tuple[SceneObject, ...]
    center: Vec3 = Vec3(0.0, 0.0, 13.5)
    config: SceneConfig | None = field(default=None, compare=False)

    @cached_property
    def centers(self) -> np.ndarray:
        return np.array([o.position for o in self.objects], dtype=float).reshape(-1, 3)

    @cached_property
    def collider_radii(self) -> np.ndarray:
        return np.array([o.collider_radius for o in self.objects], dtype=float)

    @cached_property
    def ids(self) -> np.ndarray:
        return np.array([o.id for o in self.objects], dtype=int)

    @cached_property
    def by_id(self) -> dict[int, SceneObject]:
        return {o.id: o for o in self.objects}

    @property
    def target_ids(self) -> frozenset[int]:
        return frozenset(o.id for o in self.objects if o.is_target)

    @property
    def distractor_ids(self) -> frozenset[int]:
        return frozenset(o.id for o in self.objects if not o.is_target)

    def is_distractor(self, object_id: int) -> bool:
        return not self.by_id[object_id].is_target

    def to_dict(self) -> dict:
        return {
            "center": list(self.center),
            "objects": [
                {
                    "id": o.id,
                    "pos": list(o.position),
                    "r": o.visual_radius,
                    "collider": o.collider_radius,
                    "target": o.is_target,
                }
                for o in self.objects
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scene":
        objs = tuple(
            SceneObject(int(o["id"]), Vec3(*o["pos"]), float(o["r"]), float(o["collider"]), bool(o["target"]))
            for o in data["objects"]
        )
        return cls(tuple(sorted(objs, key=lambda o: o.id)), Vec3(*data.get("center", (0.0, 0.0, 0.0))))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def slot_positions(config: SceneConfig) -> list[Vec3]:
    """Centers of every grid slot, row-major from bottom-left, centered on the view axis."""
    cx = (config.columns - 1) / 2.0
    cy = (config.rows - 1) / 2.0
    return [
        Vec3((c - cx) * config.spacing, (r - cy) * config.spacing, config.distance)
        for r in range(config.rows)
        for c in range(config.columns)
    ]


def generate(config: SceneConfig) -> Scene:
    """Place ``object_count`` spheres in random distinct slots and mark targets."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    slots = slot_positions(config)
    chosen = np.sort(rng.choice(len(slots), size=config.object_count, replace=False))
    targets = set(rng.choice(config.object_count, size=config.target_count, replace=False).tolist())
    collider = config.collider_scale * config.visual_radius
    objects = tuple(
        SceneObject(i, slots[s], config.visual_radius, collider, i in targets)
        for i, s in enumerate(chosen.tolist())
    )
    return Scene(objects, Vec3(0.0, 0.0, config.distance), config)


def angular_extent(config: SceneConfig) -> tuple[float, float]:
    """Horizontal and vertical visual angle (degrees) spanned by the slot centers."""
    if config.distance <= 0:
        raise ConfigError("scene.distance must be > 0")
    half_w = (config.columns - 1) * config.spacing / 2.0
    half_h = (config.rows - 1) * config.spacing / 2.0
    return (
        2.0 * math.degrees(math.atan(half_w / config.distance)),
        2.0 * math.degrees(math.atan(half_h / config.distance)),
    )


def config_dict(config: SceneConfig) -> dict:
    return asdict(config)
