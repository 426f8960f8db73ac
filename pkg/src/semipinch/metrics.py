"""Per-trial and per-block interaction measures."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import AbstractSet, Iterable, Optional, Sequence

from .core import InputFrame, angular_delta
from .errors import EmptyBlock, IncompleteTrial
from .scene import Scene
from .session import EventKind, InteractionEvent


@dataclass(frozen=True)
class TrialMetrics:
    tct: float
    subselections: int
    accidental_subselections: int
    accidental_ratio: float  # percent
    missed_targets: int
    grouped_distractors: int
    final_group_size: int
    error_rate: float  # percent
    hand_movement: float  # m
    hand_rotation: float  # degrees
    error_free: bool
    valid: bool
    empty_group: bool  # error_rate reported as 0 for 0/0
    no_subselections: bool  # accidental_ratio reported as 0 for 0/0

    def to_dict(self) -> dict:
        return asdict(self)


TRIAL_METRIC_FIELDS = tuple(f.name for f in fields(TrialMetrics))


def percent(num: int, den: int) -> float:
    return 100.0 * num / den if den else 0.0


def is_valid(missed: int, target_count: int) -> bool:
    """Trials missing more than half of their targets are excluded."""
    return 2 * missed <= target_count


def trial_window(events: Sequence[InteractionEvent]) -> tuple[int, int]:
    """Indices of the first TrialStarted and the TrialEnded that follows it."""
    start = next((i for i, e in enumerate(events) if e.kind is EventKind.TRIAL_STARTED), None)
    if start is None:
        raise IncompleteTrial("event log has no TrialStarted")
    end = next(
        (i for i in range(start + 1, len(events)) if events[i].kind is EventKind.TRIAL_ENDED), None
    )
    if end is None:
        raise IncompleteTrial("event log has no TrialEnded after TrialStarted")
    return start, end


def palm_path(frames: Iterable[InputFrame], t0: float, t1: float) -> tuple[float, float]:
    """Summed DH palm translation (m) and geodesic rotation (deg) over [t0, t1]."""
    moves: list[float] = []
    turns: list[float] = []
    prev = None
    for f in frames:
        if f.timestamp < t0 or f.timestamp > t1 or not f.dominant.tracked:
            continue
        if prev is not None:
            moves.append(math.dist(prev.palm_center, f.dominant.palm_center))
            turns.append(angular_delta(prev.palm_orientation, f.dominant.palm_orientation))
        prev = f.dominant
    return math.fsum(moves), math.fsum(turns)


def trial_metrics(
    events: Sequence[InteractionEvent],
    frames: Iterable[InputFrame],
    scene: Scene | AbstractSet[int],
    *,
    count_toggle_offs: bool = False,
) -> TrialMetrics:
    """Fold one trial's event log (and DH frames) into its measures.

    ``scene`` may be a Scene or the set of target ids. With
    ``count_toggle_offs`` the subselection denominator also includes
    ungroup toggles.
    """
    targets = scene.target_ids if isinstance(scene, Scene) else frozenset(scene)
    start, end = trial_window(events)
    t0, t1 = events[start].time, events[end].time

    members: set[int] = set()
    subs = accidental = 0
    for e in events[start + 1 : end]:
        if e.kind is EventKind.GROUP_CLEARED or e.kind is EventKind.TRIAL_STARTED:
            members.clear()
        elif e.kind is EventKind.SUBSELECT_TOGGLED:
            if e.now_grouped:
                members.add(e.object)
                subs += 1
                if e.is_distractor:
                    accidental += 1
            else:
                members.discard(e.object)
                if count_toggle_offs:
                    subs += 1

    missed = len(targets - members)
    grouped_distractors = len(members - targets)
    move, turn = palm_path(frames, t0, t1)
    return TrialMetrics(
        tct=t1 - t0,
        subselections=subs,
        accidental_subselections=accidental,
        accidental_ratio=percent(accidental, subs),
        missed_targets=missed,
        grouped_distractors=grouped_distractors,
        final_group_size=len(members),
        error_rate=percent(missed + grouped_distractors, len(members)),
        hand_movement=move,
        hand_rotation=turn,
        error_free=missed == 0 and grouped_distractors == 0,
        valid=is_valid(missed, len(targets)),
        empty_group=not members,
        no_subselections=subs == 0,
    )


@dataclass(frozen=True)
class BlockMetrics:
    technique: str
    target_count: int
    trials: int
    valid_trials: int
    mean_tct: float
    success_rate: float
    inverse_efficiency: Optional[float]
    mean_accidental_ratio: float
    mean_error_rate: float
    mean_hand_movement: float
    mean_hand_rotation: float


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def block_metrics(trials: Sequence[TrialMetrics], technique: str = "", target_count: int = 0) -> BlockMetrics:
    """Aggregate a condition block.

    TCT, movement and rotation average over valid trials only; accidental
    ratio and error rate over every trial. Inverse efficiency is mean TCT
    divided by the fraction of valid trials that are error-free.
    """
    if not trials:
        raise EmptyBlock("block has no trials")
    valid = [t for t in trials if t.valid]
    if not valid:
        raise EmptyBlock("block has no valid trials")
    mean_tct = _mean([t.tct for t in valid])
    success = sum(t.error_free for t in valid) / len(valid)
    return BlockMetrics(
        technique=technique,
        target_count=target_count,
        trials=len(trials),
        valid_trials=len(valid),
        mean_tct=mean_tct,
        success_rate=success,
        inverse_efficiency=mean_tct / success if success > 0 else None,
        mean_accidental_ratio=_mean([t.accidental_ratio for t in trials]),
        mean_error_rate=_mean([t.error_rate for t in trials]),
        mean_hand_movement=_mean([t.hand_movement for t in valid]),
        mean_hand_rotation=_mean([t.hand_rotation for t in valid]),
    )
