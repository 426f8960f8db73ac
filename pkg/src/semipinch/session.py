"""Group membership and trial lifecycle driven by input frames."""
from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import InputFrame, NotTracked, pinch_distance
from .gaze import GazeStatus, resolve, update_gaze_status
from .pinch import PinchEdge, PinchState, PinchThresholds, PinchTracker
from .scene import Scene
from .techniques import (
    IndicatorState,
    Technique,
    TechniqueContext,
    TechniqueId,
    TechniqueParams,
)

FINALIZE_HOLD = 0.25


class Phase(enum.Enum):
    IDLE = "Idle"
    SELECTING = "Selecting"
    FINALIZED = "Finalized"


class EventKind(enum.Enum):
    TRIAL_STARTED = "TrialStarted"
    SUBSELECT_TOGGLED = "SubselectToggled"
    GROUP_CLEARED = "GroupCleared"
    GROUP_FINALIZED = "GroupFinalized"
    TRIAL_ENDED = "TrialEnded"


@dataclass(frozen=True)
class InteractionEvent:
    time: float
    kind: EventKind
    object: Optional[int] = None
    now_grouped: Optional[bool] = None
    is_distractor: Optional[bool] = None

    def to_dict(self) -> dict:
        d = {"time": self.time, "kind": self.kind.value}
        if self.kind is EventKind.SUBSELECT_TOGGLED:
            d.update(object=self.object, now_grouped=self.now_grouped, is_distractor=self.is_distractor)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InteractionEvent":
        return cls(
            float(d["time"]),
            EventKind(d["kind"]),
            d.get("object"),
            d.get("now_grouped"),
            d.get("is_distractor"),
        )


@dataclass(frozen=True)
class GroupState:
    members: frozenset[int] = frozenset()
    phase: Phase = Phase.IDLE


def apply_toggle(
    group: GroupState, object_id: int, *, time: float, is_distractor: bool
) -> tuple[GroupState, Optional[InteractionEvent]]:
    """Flip one object's membership. Outside Selecting the toggle is dropped."""
    if group.phase is not Phase.SELECTING:
        return group, None
    grouped = object_id not in group.members
    members = group.members | {object_id} if grouped else group.members - {object_id}
    event = InteractionEvent(time, EventKind.SUBSELECT_TOGGLED, object_id, grouped, is_distractor)
    return GroupState(members, group.phase), event


@dataclass
class Session:
    """One user's interaction state.

    Per frame: step both pinch trackers, apply lifecycle edges, resolve gaze
    (objects are only visible while Selecting), step the technique, apply its
    toggle, then check the debounced finalize.
    """

    scene: Scene
    technique: TechniqueId
    params: TechniqueParams = field(default_factory=TechniqueParams)
    thresholds: PinchThresholds = field(default_factory=PinchThresholds)
    finalize_hold: float = FINALIZE_HOLD

    def __post_init__(self):
        self.dh = PinchTracker(self.thresholds)
        self.ndh = PinchTracker(self.thresholds)
        self.trigger = Technique(self.technique, self.params)
        self.group = GroupState()
        self.gaze = GazeStatus()
        self.events: list[InteractionEvent] = []
        self.ignored_toggles = 0
        self.frames_seen = 0

    @property
    def members(self) -> frozenset[int]:
        return self.group.members

    @property
    def phase(self) -> Phase:
        return self.group.phase

    @property
    def indicator(self) -> IndicatorState:
        return self.trigger.indicator

    def step(self, frame: InputFrame) -> list[InteractionEvent]:
        now = frame.timestamp
        dh_state, dh_edges = self.dh.step(now, _distance(frame.dominant))
        ndh_state, _ = self.ndh.step(now, _distance(frame.non_dominant))
        self.frames_seen += 1
        out: list[InteractionEvent] = []

        released = PinchEdge.ENTERED_RELEASE in dh_edges
        if released and self.group.phase is Phase.SELECTING:
            self.group = GroupState(frozenset(), Phase.SELECTING)
            out.append(InteractionEvent(now, EventKind.GROUP_CLEARED))
        elif released:
            self.group = GroupState(frozenset(), Phase.SELECTING)
            self.gaze = GazeStatus()
            out.append(InteractionEvent(now, EventKind.TRIAL_STARTED))

        selecting = self.group.phase is Phase.SELECTING
        resolved = resolve(frame, self.scene) if selecting else None
        self.gaze = update_gaze_status(self.gaze, resolved, now)

        active = self.trigger.mode_active(dh_state, ndh_state)
        ctx = TechniqueContext(dh_state, ndh_state, frame.dominant, frame.non_dominant, self.gaze, now, active)
        toggle = self.trigger.step(ctx)
        if toggle is not None and selecting:
            self.group, ev = apply_toggle(
                self.group,
                toggle.object_id,
                time=now,
                is_distractor=self.scene.is_distractor(toggle.object_id),
            )
            if ev is None:
                self.ignored_toggles += 1
            else:
                out.append(ev)

        if selecting and self._finalize_ready(now, ndh_state):
            self.group = GroupState(self.group.members, Phase.FINALIZED)
            out.append(InteractionEvent(now, EventKind.GROUP_FINALIZED))
            out.append(InteractionEvent(now, EventKind.TRIAL_ENDED))

        self.events.extend(out)
        return out

    def _finalize_ready(self, now: float, ndh_state: PinchState) -> bool:
        if not self.dh.debounced_full_hold(now, self.finalize_hold):
            return False
        # FullDH: a DH pinch only finalizes while the NDH mode pinch is off.
        return self.technique is not TechniqueId.FULL_DH or ndh_state is not PinchState.FULL_PINCH

    def run(self, frames: Iterable[InputFrame]) -> list[InteractionEvent]:
        for f in frames:
            self.step(f)
        return self.events


def _distance(hand) -> Optional[float]:
    try:
        return pinch_distance(hand)
    except NotTracked:
        return None


def replay(frames: Iterable[InputFrame], scene: Scene, technique: TechniqueId, **kwargs) -> list[InteractionEvent]:
    return Session(scene, technique, **kwargs).run(frames)


EVENT_COLUMNS = ("time", "kind", "object", "now_grouped", "is_distractor")


def events_to_jsonl(events: Iterable[InteractionEvent]) -> str:
    return "".join(json.dumps(e.to_dict(), separators=(",", ":")) + "\n" for e in events)


def events_from_jsonl(text: str) -> list[InteractionEvent]:
    return [InteractionEvent.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def events_to_csv(events: Iterable[InteractionEvent]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVENT_COLUMNS)
    for e in events:
        d = e.to_dict()
        w.writerow([_csv_cell(d.get(c)) for c in EVENT_COLUMNS])
    return buf.getvalue()
