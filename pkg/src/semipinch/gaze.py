"""Gaze-ray resolution against inflated colliders, and highlight status."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import AbstractSet, Optional

import numpy as np

from .core import InputFrame
from .scene import Scene


@dataclass(frozen=True)
class GazeStatus:
    gazed_object: Optional[int] = None
    gaze_enter_time: Optional[float] = None


class Highlight(enum.Enum):
    NONE = "none"
    GAZED = "gazed"
    GROUPED = "grouped"


def resolve(frame: InputFrame, scene: Scene) -> Optional[int]:
    """Object whose collider the gaze ray hits first; ties go to the lowest id."""
    if not scene.objects:
        return None
    ray = frame.gaze
    o = np.asarray(ray.origin, dtype=float)
    d = np.asarray(ray.direction, dtype=float)
    oc = o - scene.centers
    b = oc @ d
    c = np.einsum("ij,ij->i", oc, oc) - scene.collider_radii**2
    disc = b * b - c
    hit = disc >= 0.0
    if not hit.any():
        return None
    sq = np.sqrt(np.where(hit, disc, 0.0))
    near = -b - sq
    far = -b + sq
    t = np.where(near >= 0.0, near, far)
    t = np.where(hit & (t >= 0.0), t, np.inf)
    best = int(np.argmin(t))  # first minimum; objects are stored in id order
    if not np.isfinite(t[best]):
        return None
    return int(scene.ids[best])


def update_gaze_status(status: GazeStatus, resolved: Optional[int], now: float) -> GazeStatus:
    if resolved == status.gazed_object:
        return status
    if resolved is None:
        return GazeStatus()
    return GazeStatus(resolved, now)


def highlight(object_id: int, status: GazeStatus, members: AbstractSet[int]) -> Highlight:
    if object_id in members:
        return Highlight.GROUPED
    if status.gazed_object == object_id:
        return Highlight.GAZED
    return Highlight.NONE
