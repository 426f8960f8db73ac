"""Regenerate the bundled scenario files.

Every expectation below is derived by hand from the keyframes, not by
running the engine. Keyframes sit on the 90 Hz grid (frame f is at f/90 s)
unless noted; between keyframes fingertip aperture changes linearly, so the
frame where a threshold is crossed follows from simple arithmetic, worked
in the comments.

    python tools/build_scenarios.py
"""
from __future__ import annotations

from pathlib import Path

from semipinch.agent import DH_REST, NDH_REST, hand_pose
from semipinch.conformance import SCENARIO_DIR, ScriptedScenario
from semipinch.core import GazeRay, InputFrame, Vec3
from semipinch.scene import Scene, SceneObject
from semipinch.techniques import TechniqueId

RATE = 90.0
EYE = Vec3(0.0, 0.0, 0.0)

# Objects 0 and 1 are targets, 2 and 3 distractors; 2 m apart, 10 m away.
SCENE = Scene(
    tuple(
        SceneObject(i, Vec3(x, 0.0, 10.0), 0.2, 0.6, i < 2)
        for i, x in enumerate((-2.0, 0.0, 2.0, 4.0))
    ),
    Vec3(1.0, 0.0, 10.0),
)
NOWHERE = Vec3(0.0, 5.0, 10.0)
FR, S, F = "FullRelease", "SemiPinch", "FullPinch"


def K(f, gaze=None, dh=0.05, ndh=0.05, dx=0.0, roll=0.0, t=None):
    """Keyframe at frame ``f`` (or explicit time ``t``)."""
    aim = NOWHERE if gaze is None else SCENE.by_id[gaze].position
    return InputFrame(
        f / RATE if t is None else t,
        GazeRay.toward(EYE, aim),
        hand_pose(DH_REST + Vec3(dx, 0.0, 0.0), dh, roll),
        hand_pose(NDH_REST, ndh),
    )


# DH semi at f0 (0.05 m). Release ramp 0.05 -> 0.12 over f10..f20 is
# 0.007 m/frame: >= 0.10 first at f18 (0.106), so TrialStarted at f18.
# Back down 0.12 -> 0.05 over f20..f30: <= 0.07 first at f28 (0.064).
PROLOGUE = [K(0), K(10), K(20, dh=0.12), K(30)]
PROLOGUE_DH = [[FR, S], [S, FR], [FR, S]]


def ev(kind, frame, obj=None, on=None):
    d = {"kind": kind, "frame": frame}
    if obj is not None:
        d.update(object=obj, now_grouped=on)
    return d


def started():
    return ev("TrialStarted", 18)


def finalized(frame):
    return [ev("GroupFinalized", frame), ev("TrialEnded", frame)]


def scenarios():
    out = []

    # Aperture wanders inside both gap bands after entering semi: no further
    # transitions on either hand, and no release so no trial.
    out.append(ScriptedScenario(
        "gap_band_hold", TechniqueId.SEMI_DWELL, SCENE,
        [K(0), K(10, dh=0.075), K(20, dh=0.095), K(30, dh=0.075), K(40, dh=0.095),
         K(50, dh=0.0705), K(60, dh=0.0995), K(70, dh=0.07), K(80, dh=0.0195),
         K(90, dh=0.0155), K(100, dh=0.0195), K(110, dh=0.0155), K(120)],
        {"events": [], "dh_transitions": [[FR, S]], "ndh_transitions": [[FR, S]]},
        covers=("pinch:FullRelease->SemiPinch",),
        description="semi-pinch held through the 7-10 cm and 1.5-2 cm bands",
    ))

    # Gaze on 0 from f30 to f79. 45 frames later (f75) dwell reaches 500 ms.
    # Release 0.05 -> 0.12 over f90..f100: >= 0.10 at f98, clearing the group.
    out.append(ScriptedScenario(
        "dwell_toggle_then_clear", TechniqueId.SEMI_DWELL, SCENE,
        PROLOGUE + [K(30, 0), K(80), K(90), K(100, dh=0.12), K(110, dh=0.12)],
        {"events": [started(), ev("SubselectToggled", 75, 0, True), ev("GroupCleared", 98)],
         "dh_transitions": PROLOGUE_DH + [[S, FR]]},
        covers=("semidwell:toggle", "pinch:SemiPinch->FullRelease", "pinch:FullRelease->SemiPinch"),
        description="dwell toggles at exactly 500 ms; releasing the DH clears the group",
    ))

    # Gaze leaves 499 ms after acquisition; the last gazed frame is f74
    # (444 ms after f30), so dwell never reaches 500 ms.
    out.append(ScriptedScenario(
        "dwell_499ms", TechniqueId.SEMI_DWELL, SCENE,
        PROLOGUE + [K(30, 0), K(None, t=30 / RATE + 0.499), K(120)],
        {"events": [started()]},
        covers=("semidwell:ignore",),
        description="gaze leaves before the dwell threshold",
    ))

    # Two seconds on one object toggle it once. Pinch 0.05 -> 0.005 over
    # f215..f225 is 0.0045 m/frame: <= 0.015 at f223; the hold reaches
    # 250 ms after 23 frames (22 frames = 244 ms), so finalize at f246.
    out.append(ScriptedScenario(
        "dwell_once_per_episode", TechniqueId.SEMI_DWELL, SCENE,
        PROLOGUE + [K(30, 0), K(210), K(215), K(225, dh=0.005), K(260, dh=0.005)],
        {"events": [started(), ev("SubselectToggled", 75, 0, True), *finalized(246)],
         "dh_transitions": PROLOGUE_DH + [[S, F]],
         "metrics": {"subselections": 1, "accidental_subselections": 0, "missed_targets": 1,
                     "grouped_distractors": 0, "final_group_size": 1, "error_rate": 100.0,
                     "valid": True, "error_free": False}},
        covers=("semidwell:toggle", "pinch:SemiPinch->FullPinch"),
        description="a long dwell toggles once, then a held full pinch finalizes",
    ))

    # Palm moves 10 cm left over f35..f53: toggle on f53. Moving back right
    # does nothing. Finalize: full at f88, hold met at f111.
    out.append(ScriptedScenario(
        "swipe_left_toggles", TechniqueId.SEMI_SWIPE, SCENE,
        PROLOGUE + [K(30, 0), K(35, 0), K(53, 0, dx=-0.10), K(71, 0), K(75), K(80),
                    K(90, dh=0.005), K(120, dh=0.005)],
        {"events": [started(), ev("SubselectToggled", 53, 0, True), *finalized(111)],
         "dh_transitions": PROLOGUE_DH + [[S, F]],
         "metrics": {"subselections": 1, "missed_targets": 1, "final_group_size": 1}},
        covers=("semiswipe:toggle", "pinch:SemiPinch->FullPinch"),
        description="leftward swipe of the swipe distance toggles the gazed object",
    ))

    out.append(ScriptedScenario(
        "swipe_right_ignored", TechniqueId.SEMI_SWIPE, SCENE,
        PROLOGUE + [K(30, 0), K(35, 0), K(60, 0, dx=0.15), K(70, 0, dx=0.15), K(75, dx=0.15)],
        {"events": [started()]},
        covers=("semiswipe:ignore",),
        description="rightward swipe never toggles",
    ))

    # Roll 0 -> 30 deg over f35..f45 (exact at the keyframe): toggle on f45.
    out.append(ScriptedScenario(
        "tilt_right_toggles", TechniqueId.SEMI_TILT, SCENE,
        PROLOGUE + [K(30, 0), K(35, 0), K(45, 0, roll=30.0), K(60, 0, roll=30.0), K(65, roll=30.0)],
        {"events": [started(), ev("SubselectToggled", 45, 0, True)]},
        covers=("semitilt:toggle",),
        description="rightward roll of the tilt angle toggles the gazed object",
    ))

    out.append(ScriptedScenario(
        "tilt_left_ignored", TechniqueId.SEMI_TILT, SCENE,
        PROLOGUE + [K(30, 0), K(35, 0), K(45, 0, roll=-40.0), K(60, 0, roll=-40.0), K(65, roll=-40.0)],
        {"events": [started()]},
        covers=("semitilt:ignore",),
        description="leftward roll never toggles",
    ))

    # NDH 0.05 -> 0.005 over f30..f40 is 0.0045 m/frame: full at f38 with no
    # gaze (ignored); back up from f50: >= 0.02 at f54. Second pinch on
    # object 0 is full at f78 (toggle), held while gaze moves to object 1
    # at f90, released at f104: one toggle only.
    out.append(ScriptedScenario(
        "ndh_pinch", TechniqueId.SEMI_NDH, SCENE,
        PROLOGUE + [K(40, ndh=0.005), K(50, ndh=0.005), K(60), K(70, 0), K(80, 0, ndh=0.005),
                    K(90, 1, ndh=0.005), K(100, 1, ndh=0.005), K(110, 1), K(120)],
        {"events": [started(), ev("SubselectToggled", 78, 0, True)],
         "ndh_transitions": [[FR, S], [S, F], [F, S], [S, F], [F, S]],
         "dh_transitions": PROLOGUE_DH},
        covers=("semindh:toggle", "semindh:ignore", "pinch:SemiPinch->FullPinch",
                "pinch:FullPinch->SemiPinch"),
        description="NDH pinch toggles the gazed object once even when held across a gaze change",
    ))

    # NDH full at f38 (mode on). DH clicks swing 0.05 -> 0.005 -> 0.05 over
    # 5 + 5 frames at 0.009 m/frame: full on the 4th frame down (0.014),
    # semi on the 2nd frame up (0.023). Clicks: distractor 3 on (f59) and
    # off (f74), target 0 (f94), target 1 (f114). NDH back to semi at f129;
    # DH full at f148, hold met at f171.
    out.append(ScriptedScenario(
        "fulldh_correction", TechniqueId.FULL_DH, SCENE,
        PROLOGUE + [K(40, ndh=0.005),
                    K(50, 3, ndh=0.005), K(55, 3, ndh=0.005), K(60, 3, dh=0.005, ndh=0.005), K(65, 3, ndh=0.005),
                    K(70, 3, ndh=0.005), K(75, 3, dh=0.005, ndh=0.005), K(80, 3, ndh=0.005),
                    K(85, 0, ndh=0.005), K(90, 0, ndh=0.005), K(95, 0, dh=0.005, ndh=0.005), K(100, 0, ndh=0.005),
                    K(105, 1, ndh=0.005), K(110, 1, ndh=0.005), K(115, 1, dh=0.005, ndh=0.005), K(120, 1, ndh=0.005),
                    K(125, ndh=0.005), K(135), K(140), K(150, dh=0.005), K(180, dh=0.005)],
        {"events": [started(), ev("SubselectToggled", 59, 3, True), ev("SubselectToggled", 74, 3, False),
                    ev("SubselectToggled", 94, 0, True), ev("SubselectToggled", 114, 1, True),
                    *finalized(171)],
         "dh_transitions": PROLOGUE_DH + [[S, F], [F, S]] * 4 + [[S, F]],
         "ndh_transitions": [[FR, S], [S, F], [F, S]],
         "metrics": {"subselections": 3, "accidental_subselections": 1,
                     "accidental_ratio": 100.0 * 1 / 3, "missed_targets": 0, "grouped_distractors": 0,
                     "final_group_size": 2, "error_rate": 0.0, "error_free": True, "valid": True}},
        covers=("fulldh:toggle", "pinch:SemiPinch->FullPinch", "pinch:FullPinch->SemiPinch"),
        description="a distractor picked by mistake is toggled off before finalizing",
    ))

    # NDH relaxed, so the mode is off: a short DH click on object 0
    # (full f44..f46) neither toggles nor finalizes.
    out.append(ScriptedScenario(
        "fulldh_without_mode", TechniqueId.FULL_DH, SCENE,
        PROLOGUE + [K(35, 0), K(40, 0), K(45, 0, dh=0.005), K(50, 0), K(60, 0)],
        {"events": [started()], "dh_transitions": PROLOGUE_DH + [[S, F], [F, S]]},
        covers=("fulldh:ignore",),
        description="DH pinch without the NDH mode pinch is not a subselection",
    ))
    return out


def main(directory: Path = SCENARIO_DIR) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for sc in scenarios():
        (directory / f"{sc.name}.jsonl").write_text(sc.to_jsonl(), encoding="utf-8")
        print(f"wrote {sc.name}")


if __name__ == "__main__":
    main()
