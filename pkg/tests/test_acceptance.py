"""Acceptance criteria 1-8. Each test prints one PASS/FAIL line.

Run just this suite with ``pytest tests/test_acceptance.py -v``.
"""
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import line_scene, make_frame
from semipinch.agent import AgentParams, DH_REST, NDH_REST, hand_pose, run_trial
from semipinch.cli import EXIT_OK, main
from semipinch.conformance import bundled_scenarios, metric_mismatches, oracle_fold, run_scenario
from semipinch.core import Vec3, quat_from_axis_angle, twist_angle
from semipinch.errors import EmptyBlock
from semipinch.gaze import GazeStatus
from semipinch.metrics import block_metrics, trial_metrics
from semipinch.pinch import PinchState, PinchThresholds, PinchTracker
from semipinch.scene import SceneConfig, angular_extent, generate
from semipinch.session import EventKind, InteractionEvent, Session
from semipinch.techniques import (
    NO_INDICATOR,
    TechniqueContext,
    TechniqueId,
    TechniqueParams,
    semidwell_step,
    semiswipe_step,
    semitilt_step,
)

FR, S, F = PinchState.FULL_RELEASE, PinchState.SEMI_PINCH, PinchState.FULL_PINCH


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail

    return emit


# 1 ---------------------------------------------------------------------------

def test_1_geometry_regression(verdict):
    t0 = time.perf_counter()
    w, h = angular_extent(SceneConfig())
    elapsed = time.perf_counter() - t0
    ok = abs(w - 58.12) <= 0.05 and abs(h - 25.06) <= 0.05 and elapsed < 1.0
    verdict(1, "window angular extent", ok, f"{w:.4f} x {h:.4f} deg (target 58.12 x 25.06 +-0.05), {elapsed * 1e3:.2f} ms")


# 2 ---------------------------------------------------------------------------

def _trajectory(rng, n=200):
    kind = rng.integers(3)
    if kind == 0:  # random walk over the full range
        d = np.cumsum(rng.normal(0.0, 0.006, n)) + rng.uniform(0.0, 0.13)
    elif kind == 1:  # uniform jumps
        d = rng.uniform(0.0, 0.15, n)
    else:  # dwell inside bands, hopping between them
        centers = rng.choice([0.0175, 0.085, 0.045, 0.008, 0.12], size=n // 20 + 1)
        d = np.repeat(centers, 20)[:n] + rng.uniform(-0.0024, 0.0024, n)
    return np.clip(d, 0.0, 0.2)


def test_2_pinch_hysteresis(verdict):
    th = PinchThresholds()
    rng = np.random.default_rng(20240)
    t0 = time.perf_counter()
    changes_in_band = direct_jumps = samples_in_band = 0
    for _ in range(1000):
        tr = PinchTracker(th)
        prev = tr.state
        for k, d in enumerate(_trajectory(rng).tolist()):
            state, _ = tr.step(k / 90, d)
            in_band = th.full_enter < d < th.semi_lower or th.semi_upper < d < th.release_enter
            samples_in_band += in_band
            if in_band and state is not prev:
                changes_in_band += 1
            if prev is FR and state is F:
                direct_jumps += 1
            prev = state
    elapsed = time.perf_counter() - t0
    ok = changes_in_band == 0 and direct_jumps == 0 and elapsed < 5.0
    verdict(
        2, "hysteresis over 1000 trajectories", ok,
        f"{changes_in_band} changes at {samples_in_band} in-band samples, {direct_jumps} FullRelease->FullPinch, {elapsed:.2f} s",
    )


# 3 ---------------------------------------------------------------------------

def _dwell_toggle_frame(start_frame):
    """Frame index of the toggle for gaze acquired at ``start_frame`` (frames at k/90)."""
    consumed = None
    t_acq = start_frame / 90
    pose = hand_pose(DH_REST, 0.05)
    for k in range(start_frame, start_frame + 200):
        ctx = TechniqueContext(S, S, pose, pose, GazeStatus(0, t_acq), k / 90, True)
        consumed, tog = semidwell_step(ctx, TechniqueParams(), consumed)
        if tog:
            return k - start_frame
    return None


def _finalize_frame(lead):
    """Frames from full-pinch entry to GroupFinalized in a live session."""
    scene = line_scene()
    s = Session(scene, TechniqueId.SEMI_DWELL)
    k = 0
    for d in [0.05] * lead + [0.12, 0.05]:
        s.step(make_frame(k / 90, scene, dh=d))
        k += 1
    entry = k
    for j in range(60):
        out = s.step(make_frame((entry + j) / 90, scene, dh=0.005))
        if any(e.kind is EventKind.GROUP_FINALIZED for e in out):
            return j
    return None


def test_3_timing_exactness(verdict):
    dwell = {start: _dwell_toggle_frame(start) for start in range(0, 400, 7)}
    # In a live session: acquisition at frame 30, toggle 45 frames later.
    live = {s.name: run_scenario(s) for s in bundled_scenarios()}["dwell_toggle_then_clear"]
    live_frame = live.event_frames[1] if len(live.events) > 1 else None
    final = {lead: _finalize_frame(lead) for lead in (1, 5, 17, 40)}
    ok = set(dwell.values()) == {45} and live_frame == 75 and set(final.values()) == {23}
    verdict(
        3, "90 Hz timing", ok,
        f"dwell toggles {sorted(set(dwell.values()))} frames after acquisition (46th frame, t=0.5 s); "
        f"session toggle at frame {live_frame} for acquisition at 30; finalize {sorted(set(final.values()))} frames after full-pinch entry "
        f"({23 / 90 * 1e3:.1f} ms >= 250, {22 / 90 * 1e3:.1f} ms < 250)",
    )


# 4 ---------------------------------------------------------------------------

def _ctx(k, tech, dx=0.0, roll=0.0):
    pose = hand_pose(DH_REST + Vec3(dx, 0, 0), 0.05, roll)
    return TechniqueContext(S, S, pose, hand_pose(NDH_REST, 0.05), GazeStatus(0, 0.0), k / 90, True)


def test_4_technique_arithmetic(verdict):
    p = TechniqueParams()
    problems = []

    # Tilt: 0.05 deg steps; toggle on the first sample with delta >= 30.
    ind, fired, worst = NO_INDICATOR, None, 0.0
    for k in range(0, 700):
        roll = 0.05 * k
        ind, tog = semitilt_step(_ctx(k, TechniqueId.SEMI_TILT, roll=roll), p, ind)
        if tog:
            fired = k
            break
        delta = twist_angle(quat_from_axis_angle((0, 0, 1), roll))
        worst = max(worst, abs(ind.angle - 3.0 * delta))
    if fired is None or abs(0.05 * fired - 30.0) > 1e-9 or 0.05 * (fired - 1) >= 30.0:
        problems.append(f"tilt toggled at step {fired}")
    if worst > 1e-9:
        problems.append(f"tilt angle off by {worst}")

    # Swipe: 1 mm steps leftward; toggle exactly at 0.10 m.
    ind, fired = NO_INDICATOR, None
    for k in range(0, 200):
        ind, tog = semiswipe_step(_ctx(k, TechniqueId.SEMI_SWIPE, dx=-0.001 * k), p, ind)
        if tog:
            fired = k
            break
    if fired != 100:
        problems.append(f"swipe toggled at {fired} mm")

    # Rightward motion and leftward roll never advance progress.
    ind, peak = NO_INDICATOR, 0.0
    for k in range(200):
        ind, tog = semiswipe_step(_ctx(k, TechniqueId.SEMI_SWIPE, dx=0.002 * k), p, ind)
        peak = max(peak, ind.progress, 1.0 if tog else 0.0)
    ind2, peak2 = NO_INDICATOR, 0.0
    for k in range(200):
        ind2, tog = semitilt_step(_ctx(k, TechniqueId.SEMI_TILT, roll=-0.5 * k), p, ind2)
        peak2 = max(peak2, ind2.progress, 1.0 if tog else 0.0)
    if peak or peak2:
        problems.append(f"wrong-direction progress {peak}, {peak2}")

    verdict(
        4, "tilt and swipe arithmetic", not problems,
        "; ".join(problems) or f"tilt fires at 30.00 deg with angle = 3x delta (max err {worst:.1e}); swipe fires at 100 mm; wrong directions stay at 0",
    )


# 5 ---------------------------------------------------------------------------

def test_5_end_to_end_oracle(verdict):
    t0 = time.perf_counter()
    bad = []
    n = 0
    for tech in TechniqueId:
        for count in (2, 4, 6):
            for seed in range(15):
                scene = generate(SceneConfig(target_count=count, seed=seed))
                run = run_trial(scene, tech, AgentParams(seed=seed))
                n += 1
                toggles = [e for e in run.events if e.kind is EventKind.SUBSELECT_TOGGLED]
                if not run.completed:
                    bad.append((tech.value, count, seed, "incomplete"))
                    continue
                m = trial_metrics(run.events, run.frames, scene)
                if m.error_rate != 0 or m.accidental_ratio != 0 or len(toggles) != count:
                    bad.append((tech.value, count, seed, m.error_rate, m.accidental_ratio, len(toggles)))
    elapsed = time.perf_counter() - t0
    ok = not bad and n == 225 and elapsed < 30.0
    verdict(5, "zero-noise agent", ok, f"{n} trials, {len(bad)} deviating {bad[:3]}, {elapsed:.1f} s")


# 6 ---------------------------------------------------------------------------

def _fuzz_log(rng):
    n_obj = int(rng.integers(2, 12))
    targets = set(rng.choice(n_obj, size=int(rng.integers(1, n_obj + 1)), replace=False).tolist())
    t = float(rng.uniform(0, 3))
    events = [InteractionEvent(t, EventKind.TRIAL_STARTED)]
    members: set[int] = set()
    for _ in range(int(rng.integers(0, 25))):
        t += float(rng.exponential(0.4))
        if rng.random() < 0.08:
            members.clear()
            events.append(InteractionEvent(t, EventKind.GROUP_CLEARED))
            continue
        obj = int(rng.integers(0, n_obj))
        on = obj not in members
        members ^= {obj}
        events.append(InteractionEvent(t, EventKind.SUBSELECT_TOGGLED, obj, on, obj not in targets))
    t += float(rng.uniform(0.25, 1.0))
    events += [InteractionEvent(t, EventKind.GROUP_FINALIZED), InteractionEvent(t, EventKind.TRIAL_ENDED)]
    frames = []
    ts = np.sort(rng.uniform(events[0].time - 0.5, t + 0.5, size=int(rng.integers(0, 12))))
    for k, ft in enumerate(ts.tolist()):
        palm = Vec3(*rng.normal(0, 0.2, 3).tolist())
        q = quat_from_axis_angle(rng.normal(0, 1, 3).tolist() if k % 3 else (0, 0, 1), float(rng.uniform(-90, 90)))
        hand = hand_pose(palm, 0.05)
        hand = replace(hand, palm_orientation=q, tracked=bool(rng.random() > 0.1))
        frames.append(replace(make_frame(ft), dominant=hand))
    return events, targets, frames


def _brute_block(trials, target_counts):
    # Exclusion from scratch: more than half the targets missed -> invalid.
    valid = [m for m, n in zip(trials, target_counts) if not m.missed_targets > n / 2]
    if not valid:
        return None
    mean_tct = sum(m.tct for m in valid) / len(valid)
    success = sum(1 for m in valid if m.missed_targets == 0 and m.grouped_distractors == 0) / len(valid)
    return len(valid), mean_tct, success, (mean_tct / success if success else None)


def test_6_metrics_differential(verdict):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    mismatches = []
    results = []
    for i in range(10_000):
        events, targets, frames = _fuzz_log(rng)
        a = trial_metrics(events, frames, targets)
        b = oracle_fold(events, targets, frames)
        diff = metric_mismatches(a, b)
        if diff:
            mismatches.append((i, diff))
        results.append((a, len(targets)))

    ie_bad = 0
    blocks = 0
    excluded = 0
    for start in range(0, len(results), 15):
        chunk = results[start : start + 15]
        trials, counts = [m for m, _ in chunk], [n for _, n in chunk]
        brute = _brute_block(trials, counts)
        excluded += sum(not m.valid for m in trials)
        try:
            b = block_metrics(trials)
        except EmptyBlock:
            ie_bad += brute is not None
            continue
        blocks += 1
        nv, mean_tct, success, ie = brute
        same = b.valid_trials == nv and math.isclose(b.mean_tct, mean_tct, rel_tol=1e-12) and b.success_rate == success
        if ie is None:
            same = same and b.inverse_efficiency is None
        else:
            same = same and math.isclose(b.inverse_efficiency, ie, rel_tol=1e-12)
        ie_bad += not same
    elapsed = time.perf_counter() - t0
    ok = not mismatches and ie_bad == 0 and excluded > 0
    verdict(
        6, "metrics vs naive fold", ok,
        f"10000 logs, {len(mismatches)} field mismatches {mismatches[:3]}; {blocks} blocks IE-checked, {ie_bad} off, "
        f"{excluded} trials excluded by the half-missed rule; {elapsed:.1f} s",
    )


# 7 ---------------------------------------------------------------------------

def test_7_determinism_and_replay(verdict, tmp_path):
    args = ["run", "--all-techniques", "--targets", "2,4,6", "--trials", "15", "--seed", "77"]
    a = main(args + ["--out", str(tmp_path / "a"), "--trace-out", str(tmp_path / "tr")])
    b = main(args + ["--out", str(tmp_path / "b")])
    same = all(
        (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in ("trials.csv", "blocks.csv")
    )
    traces = sorted((tmp_path / "tr").glob("*.trace.jsonl"))
    replay_bad = []
    for trace in traces[::9]:
        out = tmp_path / "rp" / trace.name
        code = main(["replay", str(trace), "--out", str(out)])
        recorded = trace.with_name(trace.name.replace(".trace.", ".events."))
        if code != EXIT_OK or (out / "events.jsonl").read_text() != recorded.read_text():
            replay_bad.append(trace.name)
    ok = a == b == EXIT_OK and same and not replay_bad and len(traces) == 225
    verdict(
        7, "determinism and replay", ok,
        f"CSVs byte-identical={same}; {len(traces[::9])} of {len(traces)} traces replayed, {len(replay_bad)} mismatched",
    )


# 8 ---------------------------------------------------------------------------

def test_8_premature_fulldh(verdict):
    rows = []
    for count in (2, 4, 6):
        for seed in range(15):
            scene = generate(SceneConfig(target_count=count, seed=seed))
            run = run_trial(scene, TechniqueId.FULL_DH, AgentParams(premature_trigger_prob=1.0, seed=seed))
            m = trial_metrics(run.events, run.frames, scene) if run.completed else None
            rows.append((count, seed, m))
    scripted = {s.name: s for s in bundled_scenarios()}["fulldh_correction"]
    sm = run_scenario(scripted).metrics
    failing = [(c, s) for c, s, m in rows if m is None or not (m.accidental_ratio > 0 and m.error_rate == 0)]
    asr = [m.accidental_ratio for _, _, m in rows if m]
    ok = not failing and sm.accidental_ratio > 0 and sm.error_rate == 0
    verdict(
        8, "premature FullDH pattern", ok,
        f"{len(rows)} agent trials, ASR {min(asr):.1f}-{max(asr):.1f}% with ER 0 ({len(failing)} failing); "
        f"scripted correction ASR {sm.accidental_ratio:.1f}% ER {sm.error_rate:.1f}%",
    )
