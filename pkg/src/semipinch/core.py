"""Geometry and input-frame vocabulary.

World frame: +y up, the user sits at the origin looking down +z, and the
user's left is -x. Quaternions are stored scalar-first ``(w, x, y, z)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import NotTracked

FORWARD_AXIS = (0.0, 0.0, 1.0)


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other):  # type: ignore[override]
        return Vec3(self.x + other[0], self.y + other[1], self.z + other[2])

    def __sub__(self, other):
        return Vec3(self.x - other[0], self.y - other[1], self.z - other[2])

    def scale(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1] + self.z * other[2]

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)


class Orientation(NamedTuple):
    """Unit quaternion, scalar first."""

    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def normalized(self) -> "Orientation":
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if n == 0.0:
            raise ValueError("cannot normalize a zero quaternion")
        return Orientation(self.w / n, self.x / n, self.y / n, self.z / n)

    def conjugate(self) -> "Orientation":
        return Orientation(self.w, -self.x, -self.y, -self.z)

    def __mul__(self, o):  # type: ignore[override]
        w1, x1, y1, z1 = self
        w2, x2, y2, z2 = o
        return Orientation(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def rotate(self, v) -> Vec3:
        p = Orientation(0.0, v[0], v[1], v[2])
        r = self * p * self.conjugate()
        return Vec3(r.x, r.y, r.z)


IDENTITY = Orientation()


def quat_from_axis_angle(axis, degrees: float) -> Orientation:
    ax = Vec3(*axis).normalized()
    half = math.radians(degrees) / 2.0
    s = math.sin(half)
    return Orientation(math.cos(half), ax.x * s, ax.y * s, ax.z * s)


@dataclass(frozen=True, slots=True)
class HandPose:
    thumb_tip: Vec3
    index_tip: Vec3
    palm_center: Vec3
    palm_orientation: Orientation = IDENTITY
    tracked: bool = True


UNTRACKED = HandPose(Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(0, 0, 0), IDENTITY, False)


@dataclass(frozen=True, slots=True)
class GazeRay:
    origin: Vec3
    direction: Vec3

    @classmethod
    def toward(cls, origin, point) -> "GazeRay":
        o = Vec3(*origin)
        return cls(o, (Vec3(*point) - o).normalized())


@dataclass(frozen=True, slots=True)
class InputFrame:
    timestamp: float
    gaze: GazeRay
    dominant: HandPose
    non_dominant: HandPose


def pinch_distance(hand: HandPose) -> float:
    """Fingertip aperture in meters; raises NotTracked for a lost hand."""
    if not hand.tracked:
        raise NotTracked("hand is not tracked")
    return math.dist(hand.thumb_tip, hand.index_tip)


def ray_sphere_hit(ray: GazeRay, center, radius: float) -> Optional[float]:
    """Distance along ``ray`` to the first non-negative sphere intersection."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    d = ray.direction
    oc = ray.origin - center
    b = oc.dot(d)
    c = oc.dot(oc) - radius * radius
    disc = b * b - c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    near = -b - sq
    if near >= 0.0:
        return near
    far = -b + sq
    return far if far >= 0.0 else None


def angular_delta(a: Orientation, b: Orientation) -> float:
    """Geodesic angle between two orientations in degrees, in [0, 180]."""
    rel = a.conjugate() * b
    vec = math.sqrt(rel.x**2 + rel.y**2 + rel.z**2)
    return math.degrees(2.0 * math.atan2(vec, abs(rel.w)))


def twist_angle(q: Orientation, axis=FORWARD_AXIS) -> Optional[float]:
    """Signed rotation of ``q`` about ``axis`` in degrees, (-180, 180].

    Uses the swing-twist decomposition. Returns None when the twist is
    undefined (q is a half-turn about an axis perpendicular to ``axis``).
    """
    ax = Vec3(*axis).normalized()
    proj = q.x * ax.x + q.y * ax.y + q.z * ax.z
    if math.hypot(q.w, proj) < 1e-9:
        return None
    angle = math.degrees(2.0 * math.atan2(proj, q.w))
    if angle > 180.0:
        angle -= 360.0
    elif angle <= -180.0:
        angle += 360.0
    return angle


def wrap_degrees(angle: float) -> float:
    """Map an angle to (-180, 180]."""
    angle = math.fmod(angle, 360.0)
    if angle > 180.0:
        angle -= 360.0
    elif angle <= -180.0:
        angle += 360.0
    return angle
