"""Scripted scenarios and brute-force oracles for differential testing.

A scenario file is JSONL: a header line carrying the scene, technique and
expectation block, followed by keyframes in the trace frame schema. Keyframes
are expanded to a 90 Hz stream: hand poses are linearly interpolated (the
palm quaternion with normalized lerp), the gaze ray is held from the most
recent keyframe.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import AbstractSet, Iterable, Optional, Sequence

from .core import HandPose, InputFrame, Orientation, Vec3, angular_delta
from .errors import IncompleteTrial, ParseError, VersionError
from .metrics import TRIAL_METRIC_FIELDS, TrialMetrics, trial_metrics
from .pinch import PinchState, PinchThresholds
from .scene import Scene
from .session import EventKind, InteractionEvent, Session
from .techniques import TechniqueId, TechniqueParams
from .trace import frame_from_dict, frame_to_dict

SCENARIO_SCHEMA = "semipinch.scenario/v1"
SCENARIO_RATE = 90.0
SCENARIO_DIR = Path(__file__).with_name("scenarios")


@dataclass
class ScriptedScenario:
    name: str
    technique: TechniqueId
    scene: Scene
    keyframes: list[InputFrame]
    expect: dict = field(default_factory=dict)
    params: TechniqueParams = field(default_factory=TechniqueParams)
    covers: tuple[str, ...] = ()
    description: str = ""

    def frames(self) -> list[InputFrame]:
        return interpolate(self.keyframes, SCENARIO_RATE)

    def to_jsonl(self) -> str:
        head = {
            "schema": SCENARIO_SCHEMA,
            "name": self.name,
            "description": self.description,
            "technique": self.technique.value,
            "params": asdict(self.params),
            "scene": self.scene.to_dict(),
            "covers": list(self.covers),
            "expect": self.expect,
        }
        lines = [json.dumps(head, separators=(",", ":"))]
        lines += [json.dumps(frame_to_dict(k), separators=(",", ":")) for k in self.keyframes]
        return "\n".join(lines) + "\n"


def parse_scenario(text: str) -> ScriptedScenario:
    lines = [(i, raw) for i, raw in enumerate(text.splitlines(), start=1) if raw.strip()]
    if not lines:
        raise ParseError("empty scenario", 1)
    records = []
    for lineno, raw in lines:
        try:
            records.append((lineno, json.loads(raw)))
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON ({exc.msg})", lineno) from None
    lineno, head = records[0]
    if head.get("schema") != SCENARIO_SCHEMA:
        raise VersionError(f"unsupported scenario schema {head.get('schema')!r}")
    keyframes = []
    for lineno, obj in records[1:]:
        try:
            keyframes.append(frame_from_dict(obj))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad keyframe ({exc!r})", lineno) from None
    return ScriptedScenario(
        name=head["name"],
        technique=TechniqueId.parse(head["technique"]),
        scene=Scene.from_dict(head["scene"]),
        keyframes=keyframes,
        expect=head.get("expect", {}),
        params=TechniqueParams(**head.get("params", {})),
        covers=tuple(head.get("covers", ())),
        description=head.get("description", ""),
    )


def load_scenario(path) -> ScriptedScenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def bundled_scenarios() -> list[ScriptedScenario]:
    return [load_scenario(p) for p in sorted(SCENARIO_DIR.glob("*.jsonl"))]


# -- keyframe expansion --------------------------------------------------------

def _lerp(a: Vec3, b: Vec3, u: float) -> Vec3:
    return Vec3(a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, a.z + (b.z - a.z) * u)


def _nlerp(a: Orientation, b: Orientation, u: float) -> Orientation:
    if sum(x * y for x, y in zip(a, b)) < 0:
        b = Orientation(-b.w, -b.x, -b.y, -b.z)
    return Orientation(*(x + (y - x) * u for x, y in zip(a, b))).normalized()


def _lerp_hand(a: HandPose, b: HandPose, u: float) -> HandPose:
    if not (a.tracked and b.tracked):
        return a
    return HandPose(
        _lerp(a.thumb_tip, b.thumb_tip, u),
        _lerp(a.index_tip, b.index_tip, u),
        _lerp(a.palm_center, b.palm_center, u),
        _nlerp(a.palm_orientation, b.palm_orientation, u),
        True,
    )


def interpolate(keyframes: Sequence[InputFrame], rate: float = SCENARIO_RATE) -> list[InputFrame]:
    """Expand keyframes to frames at ``t0 + k/rate`` up to the last keyframe."""
    if not keyframes:
        return []
    t0, t_end = keyframes[0].timestamp, keyframes[-1].timestamp
    n = math.floor((t_end - t0) * rate + 1e-6)
    out = []
    seg = 0
    for k in range(n + 1):
        t = t0 + k / rate
        while seg + 1 < len(keyframes) - 1 and keyframes[seg + 1].timestamp <= t + 1e-9:
            seg += 1
        a = keyframes[seg]
        b = keyframes[seg + 1] if seg + 1 < len(keyframes) else a
        span = b.timestamp - a.timestamp
        u = 0.0 if span <= 0 else min(1.0, max(0.0, (t - a.timestamp) / span))
        if b is not a and abs(t - b.timestamp) <= 1e-9:
            out.append(replace(b, timestamp=t))
            continue
        out.append(InputFrame(t, a.gaze, _lerp_hand(a.dominant, b.dominant, u), _lerp_hand(a.non_dominant, b.non_dominant, u)))
    return out


# -- running -------------------------------------------------------------------

@dataclass
class Divergence:
    frame: Optional[int]
    field: str
    expected: object
    actual: object

    def __str__(self) -> str:
        where = f"frame {self.frame}" if self.frame is not None else "end of run"
        return f"{where}: {self.field} expected {self.expected!r}, got {self.actual!r}"


@dataclass
class ScenarioResult:
    name: str
    passed: bool
    divergence: Optional[Divergence]
    events: list[InteractionEvent]
    event_frames: list[int]
    transitions: dict[str, list[tuple[int, str, str]]]
    metrics: Optional[TrialMetrics]
    covered: tuple[str, ...]


def run_scenario(scenario: ScriptedScenario, thresholds: Optional[PinchThresholds] = None) -> ScenarioResult:
    frames = scenario.frames()
    session = Session(scenario.scene, scenario.technique, scenario.params, thresholds or PinchThresholds())
    events: list[InteractionEvent] = []
    event_frames: list[int] = []
    transitions: dict[str, list[tuple[int, str, str]]] = {"dh": [], "ndh": []}
    for i, frame in enumerate(frames):
        before = {"dh": session.dh.state, "ndh": session.ndh.state}
        out = session.step(frame)
        for hand, tracker in (("dh", session.dh), ("ndh", session.ndh)):
            if tracker.state is not before[hand]:
                transitions[hand].append((i, before[hand].value, tracker.state.value))
        events.extend(out)
        event_frames.extend([i] * len(out))

    metrics = None
    try:
        metrics = trial_metrics(events, frames, scenario.scene)
    except IncompleteTrial:
        pass

    div = _diff(scenario.expect, events, event_frames, transitions, metrics)
    return ScenarioResult(
        scenario.name, div is None, div, events, event_frames, transitions, metrics, scenario.covers
    )


def _diff(expect, events, event_frames, transitions, metrics) -> Optional[Divergence]:
    if "events" in expect:
        want = expect["events"]
        for i, (w, e, f) in enumerate(zip(want, events, event_frames)):
            got = {"kind": e.kind.value, "object": e.object, "now_grouped": e.now_grouped, "frame": f}
            for key in ("kind", "object", "now_grouped", "frame"):
                if key in w and w[key] != got[key]:
                    return Divergence(f, f"events[{i}].{key}", w[key], got[key])
        if len(want) != len(events):
            if len(events) > len(want):
                extra = events[len(want)]
                return Divergence(event_frames[len(want)], f"events[{len(want)}]", None, extra.kind.value)
            return Divergence(None, "events.length", len(want), len(events))
    for hand in ("dh", "ndh"):
        key = f"{hand}_transitions"
        if key not in expect:
            continue
        want = [tuple(t) for t in expect[key]]
        got = [(a, b) for _, a, b in transitions[hand]]
        for i, (w, g) in enumerate(zip(want, got)):
            if w != g:
                return Divergence(transitions[hand][i][0], f"{key}[{i}]", list(w), list(g))
        if len(want) != len(got):
            frame = transitions[hand][len(want)][0] if len(got) > len(want) else None
            return Divergence(frame, f"{key}.length", len(want), len(got))
    if "metrics" in expect:
        if metrics is None:
            return Divergence(None, "metrics", expect["metrics"], None)
        for key, w in expect["metrics"].items():
            g = getattr(metrics, key)
            if g != w:
                return Divergence(None, f"metrics.{key}", w, g)
    return None


def coverage_tags() -> set[str]:
    """Every tag the scenario suite is required to exercise."""
    tags = set()
    s = PinchState
    for a, b in ((s.FULL_RELEASE, s.SEMI_PINCH), (s.SEMI_PINCH, s.FULL_RELEASE),
                 (s.SEMI_PINCH, s.FULL_PINCH), (s.FULL_PINCH, s.SEMI_PINCH)):
        tags.add(f"pinch:{a.value}->{b.value}")
    for t in TechniqueId:
        tags.add(f"{t.value}:toggle")
        tags.add(f"{t.value}:ignore")
    return tags


# -- brute-force metrics fold --------------------------------------------------

def oracle_fold(
    events: Sequence[InteractionEvent],
    targets: AbstractSet[int],
    frames: Iterable[InputFrame] = (),
) -> TrialMetrics:
    """Naive recomputation of the per-trial measures.

    Membership is rebuilt from toggle parity after the last clear instead of
    being tracked incrementally; accidental picks are judged against the
    target set rather than the event's own distractor flag.
    """
    kinds = [e.kind for e in events]
    if EventKind.TRIAL_STARTED not in kinds:
        raise IncompleteTrial("no TrialStarted")
    s = kinds.index(EventKind.TRIAL_STARTED)
    if EventKind.TRIAL_ENDED not in kinds[s + 1 :]:
        raise IncompleteTrial("no TrialEnded")
    e_idx = kinds.index(EventKind.TRIAL_ENDED, s + 1)
    window = events[s + 1 : e_idx]

    last_reset = -1
    for i, ev in enumerate(window):
        if ev.kind in (EventKind.GROUP_CLEARED, EventKind.TRIAL_STARTED):
            last_reset = i
    flips: dict[int, int] = {}
    for ev in window[last_reset + 1 :]:
        if ev.kind is EventKind.SUBSELECT_TOGGLED:
            flips[ev.object] = flips.get(ev.object, 0) + 1
    members = {o for o, n in flips.items() if n % 2 == 1}

    ons = [ev for ev in window if ev.kind is EventKind.SUBSELECT_TOGGLED and ev.now_grouped]
    subs = len(ons)
    accidental = len([ev for ev in ons if ev.object not in targets])
    missed = len([t for t in targets if t not in members])
    wrong = len([m for m in members if m not in targets])
    size = len(members)

    t0, t1 = events[s].time, events[e_idx].time
    poses = [f.dominant for f in frames if t0 <= f.timestamp <= t1 and f.dominant.tracked]
    steps = list(zip(poses, poses[1:]))
    movement = math.fsum(math.dist(a.palm_center, b.palm_center) for a, b in steps)
    rotation = math.fsum(angular_delta(a.palm_orientation, b.palm_orientation) for a, b in steps)

    return TrialMetrics(
        tct=t1 - t0,
        subselections=subs,
        accidental_subselections=accidental,
        accidental_ratio=(100.0 * accidental / subs) if subs > 0 else 0.0,
        missed_targets=missed,
        grouped_distractors=wrong,
        final_group_size=size,
        error_rate=(100.0 * (missed + wrong) / size) if size > 0 else 0.0,
        hand_movement=movement,
        hand_rotation=rotation,
        error_free=(missed + wrong) == 0,
        valid=missed / len(targets) <= 0.5 if targets else True,
        empty_group=size == 0,
        no_subselections=subs == 0,
    )


def metric_mismatches(a: TrialMetrics, b: TrialMetrics) -> list[str]:
    return [f for f in TRIAL_METRIC_FIELDS if getattr(a, f) != getattr(b, f)]
