"""Subselection triggers.

Each step function is pure: it takes the per-frame context plus whatever
episode state the trigger needs and returns the new state and an optional
toggle request. :class:`Technique` bundles the state for the session.

Semi-techniques are active only while the dominant hand holds a semi-pinch.
FullDH is active while the non-dominant hand holds a full pinch.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Union

from .core import HandPose, Vec3, twist_angle, wrap_degrees
from .errors import ConfigError
from .gaze import GazeStatus
from .pinch import TIME_EPS, PinchState

# Displacement/angle slack for float noise in interpolated trajectories.
MOTION_EPS = 1e-9
INDICATOR_FULL_SCALE = 90.0


class TechniqueId(enum.Enum):
    FULL_DH = "fulldh"
    SEMI_NDH = "semindh"
    SEMI_DWELL = "semidwell"
    SEMI_SWIPE = "semiswipe"
    SEMI_TILT = "semitilt"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "TechniqueId":
        key = text.strip().lower()
        for t in cls:
            if key in (t.value, t.label.lower()):
                return t
        raise ConfigError(f"unknown technique {text!r}; expected one of {[t.value for t in cls]}")


_LABELS = {
    TechniqueId.FULL_DH: "FullDH",
    TechniqueId.SEMI_NDH: "SemiNDH",
    TechniqueId.SEMI_DWELL: "SemiDwell",
    TechniqueId.SEMI_SWIPE: "SemiSwipe",
    TechniqueId.SEMI_TILT: "SemiTilt",
}


@dataclass(frozen=True)
class TechniqueParams:
    dwell_time: float = 0.5
    swipe_distance: float = 0.10
    tilt_angle: float = 30.0
    tilt_gain: float = 3.0
    handedness: str = "right"

    def __post_init__(self):
        for name in ("dwell_time", "swipe_distance", "tilt_angle", "tilt_gain"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"params.{name} must be > 0")
        if self.handedness not in ("right", "left"):
            raise ConfigError("params.handedness must be 'right' or 'left'")

    @property
    def side(self) -> float:
        """+1 for a right dominant hand, -1 mirrors swipe and tilt for a left one."""
        return 1.0 if self.handedness == "right" else -1.0


@dataclass(frozen=True)
class TechniqueContext:
    dh_state: PinchState
    ndh_state: PinchState
    dh_pose: HandPose
    ndh_pose: HandPose
    gaze: GazeStatus
    now: float
    mode_active: bool


def mode_active(technique: TechniqueId, dh_state: PinchState, ndh_state: PinchState) -> bool:
    if technique is TechniqueId.FULL_DH:
        return ndh_state is PinchState.FULL_PINCH
    return dh_state is PinchState.SEMI_PINCH


class IndicatorKind(enum.Enum):
    NONE = "none"
    SWIPE = "swipe"
    TILT = "tilt"


@dataclass(frozen=True)
class IndicatorState:
    kind: IndicatorKind = IndicatorKind.NONE
    progress: float = 0.0
    anchor: Union[Vec3, float, None] = None
    target: Optional[int] = None
    angle: float = 0.0  # tilt only: indicator rotation in degrees, before clamping


NO_INDICATOR = IndicatorState()


@dataclass(frozen=True)
class ToggleRequested:
    object_id: int
    time: float


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def semidwell_step(
    ctx: TechniqueContext, params: TechniqueParams, consumed: Optional[tuple[int, float]] = None
) -> tuple[Optional[tuple[int, float]], Optional[ToggleRequested]]:
    """Toggle once per gaze episode after ``dwell_time`` of gaze in mode.

    ``consumed`` identifies the last episode (object, gaze entry time) that
    already fired; a new episode needs the gaze to leave and come back.
    """
    g = ctx.gaze
    if not ctx.mode_active or g.gazed_object is None or g.gaze_enter_time is None:
        return consumed, None
    episode = (g.gazed_object, g.gaze_enter_time)
    if episode == consumed:
        return consumed, None
    if ctx.now - g.gaze_enter_time >= params.dwell_time - TIME_EPS:
        return episode, ToggleRequested(g.gazed_object, ctx.now)
    return consumed, None


def semiswipe_step(
    ctx: TechniqueContext, params: TechniqueParams, indicator: IndicatorState
) -> tuple[IndicatorState, Optional[ToggleRequested]]:
    target = ctx.gaze.gazed_object
    if not ctx.mode_active or target is None or not ctx.dh_pose.tracked:
        if ctx.mode_active and target is not None and indicator.target == target:
            return indicator, None  # lost hand: hold
        return NO_INDICATOR, None
    palm = ctx.dh_pose.palm_center
    if indicator.kind is not IndicatorKind.SWIPE or indicator.target != target:
        return IndicatorState(IndicatorKind.SWIPE, 0.0, palm, target), None
    # Leftward is -x for a right dominant hand.
    travel = params.side * (indicator.anchor.x - palm.x)
    if travel >= params.swipe_distance - MOTION_EPS:
        return IndicatorState(IndicatorKind.SWIPE, 0.0, palm, target), ToggleRequested(target, ctx.now)
    progress = _clamp01(max(0.0, travel) / params.swipe_distance)
    return replace(indicator, progress=progress), None


def semitilt_step(
    ctx: TechniqueContext, params: TechniqueParams, indicator: IndicatorState
) -> tuple[IndicatorState, Optional[ToggleRequested]]:
    target = ctx.gaze.gazed_object
    if not ctx.mode_active or target is None:
        return NO_INDICATOR, None
    roll = twist_angle(ctx.dh_pose.palm_orientation) if ctx.dh_pose.tracked else None
    if roll is None:
        return indicator, None
    if indicator.kind is not IndicatorKind.TILT or indicator.target != target:
        return IndicatorState(IndicatorKind.TILT, 0.0, roll, target, 0.0), None
    delta = params.side * wrap_degrees(roll - indicator.anchor)
    angle = params.tilt_gain * max(0.0, delta)
    if delta >= params.tilt_angle - MOTION_EPS:
        return IndicatorState(IndicatorKind.TILT, 0.0, roll, target, 0.0), ToggleRequested(target, ctx.now)
    clamped = min(max(angle, 0.0), INDICATOR_FULL_SCALE)
    return replace(indicator, progress=clamped / INDICATOR_FULL_SCALE, angle=angle), None


def _rising_full(prev: Optional[PinchState], state: PinchState) -> bool:
    return prev is not None and prev is not PinchState.FULL_PINCH and state is PinchState.FULL_PINCH


def semindh_step(ctx: TechniqueContext, prev_ndh: Optional[PinchState]) -> Optional[ToggleRequested]:
    if not _rising_full(prev_ndh, ctx.ndh_state):
        return None
    if not ctx.mode_active or ctx.gaze.gazed_object is None:
        return None
    return ToggleRequested(ctx.gaze.gazed_object, ctx.now)


def fulldh_step(ctx: TechniqueContext, prev_dh: Optional[PinchState]) -> Optional[ToggleRequested]:
    # A DH pinch with the mode off is a finalize candidate; the session decides.
    if not _rising_full(prev_dh, ctx.dh_state):
        return None
    if not ctx.mode_active or ctx.gaze.gazed_object is None:
        return None
    return ToggleRequested(ctx.gaze.gazed_object, ctx.now)


class Technique:
    """Stateful wrapper stepping one trigger strategy frame by frame."""

    def __init__(self, technique: TechniqueId, params: TechniqueParams | None = None):
        self.id = technique
        self.params = params or TechniqueParams()
        self.reset()

    def reset(self) -> None:
        self.indicator = NO_INDICATOR
        self._consumed: Optional[tuple[int, float]] = None
        self._prev_dh: Optional[PinchState] = None
        self._prev_ndh: Optional[PinchState] = None

    def mode_active(self, dh_state: PinchState, ndh_state: PinchState) -> bool:
        return mode_active(self.id, dh_state, ndh_state)

    def step(self, ctx: TechniqueContext) -> Optional[ToggleRequested]:
        toggle = None
        t = self.id
        if t is TechniqueId.SEMI_DWELL:
            self._consumed, toggle = semidwell_step(ctx, self.params, self._consumed)
        elif t is TechniqueId.SEMI_SWIPE:
            self.indicator, toggle = semiswipe_step(ctx, self.params, self.indicator)
        elif t is TechniqueId.SEMI_TILT:
            self.indicator, toggle = semitilt_step(ctx, self.params, self.indicator)
        elif t is TechniqueId.SEMI_NDH:
            toggle = semindh_step(ctx, self._prev_ndh)
        else:
            toggle = fulldh_step(ctx, self._prev_dh)
        self._prev_dh = ctx.dh_state
        self._prev_ndh = ctx.ndh_state
        return toggle
