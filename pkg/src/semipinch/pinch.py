"""Per-hand pinch state machine with hysteresis bands and a hold debounce."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import ClockError, ConfigError

# Absorbs float noise in frame-time differences (k/90 - j/90 etc.).
TIME_EPS = 1e-9


class PinchState(enum.Enum):
    FULL_PINCH = "FullPinch"
    SEMI_PINCH = "SemiPinch"
    FULL_RELEASE = "FullRelease"


class PinchEdge(enum.Enum):
    ENTERED_SEMI = "EnteredSemi"
    ENTERED_FULL = "EnteredFull"
    ENTERED_RELEASE = "EnteredRelease"


_EDGE_FOR = {
    PinchState.SEMI_PINCH: PinchEdge.ENTERED_SEMI,
    PinchState.FULL_PINCH: PinchEdge.ENTERED_FULL,
    PinchState.FULL_RELEASE: PinchEdge.ENTERED_RELEASE,
}


@dataclass(frozen=True)
class PinchThresholds:
    """Fingertip-distance thresholds in meters.

    Semi-pinch is entered inside ``[semi_lower, semi_upper]``, release at
    ``release_enter`` and above. The bands between ``full_enter`` and
    ``semi_lower`` and between ``semi_upper`` and ``release_enter`` are
    sticky: whatever state the hand was in persists.
    """

    full_enter: float = 0.015
    semi_lower: float = 0.02
    semi_upper: float = 0.07
    release_enter: float = 0.10

    def __post_init__(self):
        vals = (self.full_enter, self.semi_lower, self.semi_upper, self.release_enter)
        if any(v <= 0 for v in vals):
            raise ConfigError("pinch thresholds must all be > 0")
        if not (self.full_enter < self.semi_lower < self.semi_upper < self.release_enter):
            raise ConfigError(
                "pinch thresholds must satisfy full_enter < semi_lower < semi_upper < release_enter"
            )


def next_state(state: PinchState, distance: Optional[float], th: PinchThresholds) -> PinchState:
    """Pure transition function; ``None`` distance (untracked) holds the state."""
    if distance is None:
        return state
    if state is PinchState.FULL_RELEASE:
        if th.semi_lower <= distance <= th.semi_upper:
            return PinchState.SEMI_PINCH
    elif state is PinchState.SEMI_PINCH:
        if distance >= th.release_enter:
            return PinchState.FULL_RELEASE
        if distance <= th.full_enter:
            return PinchState.FULL_PINCH
    else:
        if th.semi_lower <= distance <= th.semi_upper:
            return PinchState.SEMI_PINCH
        if distance >= th.release_enter:
            return PinchState.FULL_RELEASE
    return state


@dataclass
class PinchTracker:
    thresholds: PinchThresholds = field(default_factory=PinchThresholds)
    state: PinchState = PinchState.FULL_RELEASE
    hold_start: Optional[float] = None
    last_time: Optional[float] = None

    def step(self, frame_time: float, distance: Optional[float]) -> tuple[PinchState, list[PinchEdge]]:
        if self.last_time is not None and frame_time <= self.last_time:
            raise ClockError(f"frame time {frame_time!r} does not follow {self.last_time!r}")
        self.last_time = frame_time
        new = next_state(self.state, distance, self.thresholds)
        if new is self.state:
            return new, []
        self.state = new
        self.hold_start = frame_time if new is PinchState.FULL_PINCH else None
        return new, [_EDGE_FOR[new]]

    def debounced_full_hold(self, now: float, dwell: float = 0.25) -> bool:
        """True once FullPinch has been held continuously for ``dwell`` seconds."""
        if self.state is not PinchState.FULL_PINCH or self.hold_start is None:
            return False
        return now - self.hold_start >= dwell - TIME_EPS
