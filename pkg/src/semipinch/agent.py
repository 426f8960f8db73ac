"""Synthetic user that performs grouping trials against any technique.

The agent is closed-loop: it drives its own :class:`Session` with the frames
it synthesizes and watches the resulting events, the way a participant
watches outline feedback. Every frame it emits is recorded, so feeding the
same frames to a fresh session reproduces the event log exactly.

Gaze model: the aim point switches instantly, but the reported gaze ray
only updates on gaze-sample boundaries (``gaze_rate``). Each saccade to a
target first lands for one gaze sample on the nearest distractor (an
undershoot) before the corrective hop onto the target.

Hand model: piecewise-linear aperture, palm translation and roll at fixed
speeds.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import FORWARD_AXIS, GazeRay, HandPose, InputFrame, Vec3, quat_from_axis_angle
from .errors import ConfigError
from .pinch import PinchThresholds
from .scene import Scene
from .session import EventKind, InteractionEvent, Phase, Session
from .techniques import TechniqueId, TechniqueParams

PINCH_CLICK = (TechniqueId.FULL_DH, TechniqueId.SEMI_NDH)


@dataclass(frozen=True)
class AgentParams:
    frame_rate: float = 90.0
    gaze_rate: float = 30.0
    reaction_time: float = 0.2
    gaze_jitter_sigma: float = 0.0  # degrees, per gaze sample
    hand_speed: float = 0.5  # m/s
    roll_speed: float = 180.0  # deg/s
    pinch_speed: float = 0.5  # m/s of fingertip aperture change
    premature_trigger_prob: float = 0.0
    seed: int = 0
    relaxed_aperture: float = 0.05
    release_aperture: float = 0.12
    closed_aperture: float = 0.005
    max_retries: int = 3
    max_duration: float = 60.0

    def __post_init__(self):
        for name in ("frame_rate", "gaze_rate", "hand_speed", "roll_speed", "pinch_speed", "max_duration"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"agent.{name} must be > 0")
        if self.reaction_time < 0 or self.gaze_jitter_sigma < 0:
            raise ConfigError("agent.reaction_time and agent.gaze_jitter_sigma must be >= 0")
        if not 0.0 <= self.premature_trigger_prob <= 1.0:
            raise ConfigError("agent.premature_trigger_prob must be in [0, 1]")
        if self.gaze_rate > self.frame_rate:
            raise ConfigError("agent.gaze_rate cannot exceed agent.frame_rate")
        if self.max_retries < 0:
            raise ConfigError("agent.max_retries must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Intent:
    time: float
    intended: int
    actual: Optional[int]
    now_grouped: Optional[bool]
    kind: str  # "primary", "retry" or "correction"
    premature: bool = False


@dataclass
class TrialRun:
    frames: list[InputFrame]
    events: list[InteractionEvent]
    intents: list[Intent]
    completed: bool
    members: frozenset[int] = field(default_factory=frozenset)


class _Timeout(Exception):
    pass


def hand_pose(palm, aperture: float, roll: float = 0.0) -> HandPose:
    """Tracked hand with the given fingertip aperture (m) and roll about +z (deg)."""
    palm = Vec3(*palm)
    q = quat_from_axis_angle(FORWARD_AXIS, roll)
    a = aperture / 2.0
    thumb = palm + q.rotate((-a, 0.0, 0.08))
    index = palm + q.rotate((a, 0.0, 0.08))
    return HandPose(thumb, index, palm, q, True)


DH_REST = Vec3(0.2, -0.3, 0.4)
NDH_REST = Vec3(-0.2, -0.3, 0.4)


class _Hand:
    def __init__(self, palm: Vec3, aperture: float):
        self.palm = palm
        self.aperture = aperture
        self.roll = 0.0

    def pose(self) -> HandPose:
        return hand_pose(self.palm, self.aperture, self.roll)


def nearest_order(scene: Scene, ids, start) -> list[int]:
    """Greedy nearest-neighbor tour over ``ids`` from point ``start``."""
    left = sorted(ids)
    here = Vec3(*start)
    out = []
    while left:
        nxt = min(left, key=lambda i: (math.dist(here, scene.by_id[i].position), i))
        out.append(nxt)
        left.remove(nxt)
        here = scene.by_id[nxt].position
    return out


def landing_object(scene: Scene, target: int) -> Optional[int]:
    """Nearest distractor to ``target``: where an undershooting saccade lands."""
    pos = scene.by_id[target].position
    cands = sorted(scene.distractor_ids)
    if not cands:
        return None
    return min(cands, key=lambda i: (math.dist(pos, scene.by_id[i].position), i))


class _Actor:
    def __init__(self, scene, technique, params, agent, thresholds):
        self.scene = scene
        self.tech = technique
        self.params = params
        self.agent = agent
        self.session = Session(scene, technique, params, thresholds)
        self.rng = np.random.default_rng(agent.seed)
        self.frames: list[InputFrame] = []
        self.intents: list[Intent] = []
        self.k = 0
        self.limit = int(agent.max_duration * agent.frame_rate)
        self.eye = Vec3(0.0, 0.0, 0.0)
        self.aim = scene.center
        self.ray: Optional[GazeRay] = None
        self.dh = _Hand(DH_REST, agent.relaxed_aperture)
        self.ndh = _Hand(NDH_REST, agent.relaxed_aperture)
        top = max((o.position.y for o in scene.objects), default=0.0)
        spacing = scene.config.spacing if scene.config else 1.0
        self.neutral = Vec3(scene.center.x, top + 2.0 * spacing, scene.center.z)

    # -- frame emission ------------------------------------------------------
    def _sample_index(self, k: int) -> int:
        return math.floor(k * self.agent.gaze_rate / self.agent.frame_rate + 1e-9)

    def _is_gaze_boundary(self, k: int) -> bool:
        return k == 0 or self._sample_index(k) != self._sample_index(k - 1)

    def _sample_ray(self) -> GazeRay:
        ray = GazeRay.toward(self.eye, self.aim)
        sigma = self.agent.gaze_jitter_sigma
        if sigma <= 0:
            return ray
        d = ray.direction
        up = Vec3(0.0, 1.0, 0.0) if abs(d.y) < 0.9 else Vec3(1.0, 0.0, 0.0)
        u = Vec3(up.y * d.z - up.z * d.y, up.z * d.x - up.x * d.z, up.x * d.y - up.y * d.x).normalized()
        v = Vec3(d.y * u.z - d.z * u.y, d.z * u.x - d.x * u.z, d.x * u.y - d.y * u.x)
        a, b = self.rng.normal(0.0, sigma, size=2)
        jittered = d + u.scale(math.tan(math.radians(a))) + v.scale(math.tan(math.radians(b)))
        return GazeRay(self.eye, jittered.normalized())

    def emit(self) -> bool:
        """Emit one frame; returns True if the gaze sample was refreshed."""
        if self.k >= self.limit:
            raise _Timeout
        fresh = self._is_gaze_boundary(self.k) or self.ray is None
        if fresh:
            self.ray = self._sample_ray()
        frame = InputFrame(self.k / self.agent.frame_rate, self.ray, self.dh.pose(), self.ndh.pose())
        self.frames.append(frame)
        self.session.step(frame)
        self.k += 1
        return fresh

    def idle(self, seconds: float) -> None:
        for _ in range(round(seconds * self.agent.frame_rate)):
            self.emit()

    def _ramp(self, get: Callable[[], float], put: Callable[[float], None], target: float, rate: float) -> None:
        start = get()
        delta = target - start
        step = rate / self.agent.frame_rate
        n = max(1, math.ceil(abs(delta) / step - 1e-9))
        for i in range(1, n + 1):
            put(target if i == n else start + delta * i / n)
            self.emit()

    def aperture(self, hand: _Hand, target: float) -> None:
        self._ramp(lambda: hand.aperture, lambda v: setattr(hand, "aperture", v), target, self.agent.pinch_speed)

    def move_palm_x(self, hand: _Hand, dx: float) -> None:
        p = hand.palm
        self._ramp(
            lambda: hand.palm.x,
            lambda v: setattr(hand, "palm", Vec3(v, p.y, p.z)),
            p.x + dx,
            self.agent.hand_speed,
        )

    def roll_by(self, hand: _Hand, degrees: float) -> None:
        self._ramp(lambda: hand.roll, lambda v: setattr(hand, "roll", v), hand.roll + degrees, self.agent.roll_speed)

    def look(self, point) -> None:
        """Shift the aim and emit frames until a gaze sample reports it."""
        self.aim = Vec3(*point)
        while not self.emit():
            pass

    def look_at(self, object_id: int) -> None:
        self.look(self.scene.by_id[object_id].position)

    def wait_until(self, pred: Callable[[], bool], timeout: float) -> bool:
        for _ in range(math.ceil(timeout * self.agent.frame_rate)):
            if pred():
                return True
            self.emit()
        return pred()

    # -- task logic ----------------------------------------------------------
    def fire(self, target: int, kind: str, premature: bool = False) -> None:
        """Perform the technique's trigger gesture once and log what it hit."""
        mark = len(self.session.events)
        start = self.k / self.agent.frame_rate
        side = self.params.side
        if self.tech is TechniqueId.SEMI_DWELL:
            self.wait_until(lambda: self._toggles_since(mark), self.params.dwell_time + 0.5)
        elif self.tech is TechniqueId.SEMI_SWIPE:
            self.move_palm_x(self.dh, -side * self.params.swipe_distance)
            self.move_palm_x(self.dh, side * self.params.swipe_distance)
        elif self.tech is TechniqueId.SEMI_TILT:
            self.roll_by(self.dh, side * self.params.tilt_angle)
            self.roll_by(self.dh, -side * self.params.tilt_angle)
        else:
            hand = self.ndh if self.tech is TechniqueId.SEMI_NDH else self.dh
            self.aperture(hand, self.agent.closed_aperture)
            self.aperture(hand, self.agent.relaxed_aperture)
        hits = self._toggles_since(mark)
        ev = hits[0] if hits else None
        self.intents.append(
            Intent(
                ev.time if ev else start,
                target,
                ev.object if ev else None,
                ev.now_grouped if ev else None,
                kind,
                premature,
            )
        )

    def _toggles_since(self, mark: int) -> list[InteractionEvent]:
        return [e for e in self.session.events[mark:] if e.kind is EventKind.SUBSELECT_TOGGLED]

    def refixate(self, object_id: int) -> None:
        # Dwell only re-arms on a fresh gaze episode.
        if self.session.gaze.gazed_object == object_id:
            self.look(self.neutral)
        self.look_at(object_id)

    def prologue(self) -> None:
        a = self.agent
        self.idle(a.reaction_time)
        self.aperture(self.dh, a.release_aperture)
        if not self.wait_until(lambda: self.session.phase is Phase.SELECTING, 1.0):
            raise _Timeout
        self.idle(a.reaction_time)
        if self.tech is TechniqueId.FULL_DH:
            self.aperture(self.dh, a.relaxed_aperture)
            self.aperture(self.ndh, a.closed_aperture)
        elif self.tech is not TechniqueId.SEMI_DWELL:
            self.aperture(self.dh, a.relaxed_aperture)

    def acquire(self, target: int) -> None:
        a = self.agent
        premature = self.tech in PINCH_CLICK and self.rng.random() < a.premature_trigger_prob
        landing = landing_object(self.scene, target)
        if landing is not None:
            self.look_at(landing)
        if premature:
            self.fire(target, "primary", premature=True)
            self.look_at(target)
        else:
            self.look_at(target)
            if self.tech is TechniqueId.SEMI_DWELL and self.dh.aperture != a.relaxed_aperture:
                self.aperture(self.dh, a.relaxed_aperture)
            self.fire(target, "primary")
        for _ in range(a.max_retries):
            if target in self.session.members:
                break
            self.idle(a.reaction_time)
            self.refixate(target)
            self.fire(target, "retry")
        self.idle(a.reaction_time)

    def correct(self) -> None:
        targets = self.scene.target_ids
        for _ in range(self.agent.max_retries):
            wrong = self.session.members ^ targets
            if not wrong:
                return
            self.idle(self.agent.reaction_time)
            for obj in nearest_order(self.scene, wrong, self.aim):
                self.refixate(obj)
                self.idle(1.0 / self.agent.gaze_rate)  # deliberate settle before acting
                self.fire(obj, "correction")
                self.idle(self.agent.reaction_time)

    def finalize(self) -> None:
        a = self.agent
        if self.tech is TechniqueId.FULL_DH:
            self.aperture(self.ndh, a.relaxed_aperture)
        self.aperture(self.dh, a.closed_aperture)
        ended = lambda: any(e.kind is EventKind.TRIAL_ENDED for e in self.session.events)
        if not self.wait_until(ended, self.session.finalize_hold + 0.5):
            raise _Timeout

    def run(self) -> TrialRun:
        completed = False
        try:
            self.prologue()
            for t in nearest_order(self.scene, self.scene.target_ids, self.aim):
                self.acquire(t)
            self.correct()
            self.finalize()
            completed = True
        except _Timeout:
            pass
        return TrialRun(self.frames, list(self.session.events), self.intents, completed, self.session.members)


def run_trial(
    scene: Scene,
    technique: TechniqueId,
    agent: AgentParams | None = None,
    params: TechniqueParams | None = None,
    thresholds: PinchThresholds | None = None,
) -> TrialRun:
    """Synthesize one trial: ITI release, serial subselection, 250 ms finalize.

    Targets are visited in nearest-neighbor order from the layout center.
    With ``premature_trigger_prob`` a pinch-click trigger (FullDH, SemiNDH)
    fires while the gaze still rests on the landing distractor, one gaze
    sample before it would reach the target; the agent then retries the
    target and, before finalizing, toggles off anything wrongly grouped.
    Retries and corrections are deliberate and never premature.
    """
    if not scene.target_ids:
        raise ConfigError("scene has no targets")
    actor = _Actor(
        scene,
        technique,
        params or TechniqueParams(),
        agent or AgentParams(),
        thresholds or PinchThresholds(),
    )
    return actor.run()
