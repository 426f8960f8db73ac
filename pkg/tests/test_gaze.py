import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semipinch.core import GazeRay, InputFrame, UNTRACKED, Vec3, ray_sphere_hit
from semipinch.gaze import GazeStatus, Highlight, highlight, resolve, update_gaze_status
from semipinch.scene import Scene, SceneConfig, SceneObject, generate


def frame_for(ray):
    return InputFrame(0.0, ray, UNTRACKED, UNTRACKED)


def brute_force(ray, scene):
    """Scalar reference: every collider, nearest distance, lowest id on ties."""
    hits = []
    for o in scene.objects:
        t = ray_sphere_hit(ray, o.position, o.collider_radius)
        if t is not None:
            hits.append((t, o.id))
    return min(hits) if hits else None


def test_straight_at_object():
    scene = Scene((SceneObject(7, Vec3(0, 0, 13.5), 0.2, 0.6, True),), Vec3(0, 0, 13.5))
    assert resolve(frame_for(GazeRay(Vec3(0, 0, 0), Vec3(0, 0, 1))), scene) == 7


def test_passing_outside_all_colliders():
    scene = Scene(
        tuple(SceneObject(i, Vec3(x, 0.7, 13.5), 0.2, 0.6, False) for i, x in enumerate((-2.0, 0.0, 2.0))),
        Vec3(0, 0, 13.5),
    )
    # Parallel to +z at height 0: 0.7 m from every center.
    assert resolve(frame_for(GazeRay(Vec3(0, 0, 0), Vec3(0, 0, 1))), scene) is None


def test_grazing_two_overlapping_colliders_nearest_wins():
    a = SceneObject(0, Vec3(0.0, 0.0, 13.5), 0.2, 0.6, True)
    b = SceneObject(1, Vec3(1.0, 0.0, 14.5), 0.2, 0.6, False)
    scene = Scene((a, b), Vec3(0.5, 0, 14))
    ray = GazeRay.toward(Vec3(0, 0, 0), Vec3(0.5, 0.0, 14.0))
    ta = ray_sphere_hit(ray, a.position, 0.6)
    tb = ray_sphere_hit(ray, b.position, 0.6)
    assert ta is not None and tb is not None
    assert resolve(frame_for(ray), scene) == (0 if ta < tb else 1)


def test_exact_tie_goes_to_lowest_id():
    a = SceneObject(3, Vec3(0.0, 0.0, 10.0), 0.2, 0.6, True)
    b = SceneObject(5, Vec3(0.0, 0.0, 10.0), 0.2, 0.6, False)
    scene = Scene((a, b), Vec3(0, 0, 10))
    assert resolve(frame_for(GazeRay(Vec3(0, 0, 0), Vec3(0, 0, 1))), scene) == 3


def test_empty_scene():
    assert resolve(frame_for(GazeRay(Vec3(0, 0, 0), Vec3(0, 0, 1))), Scene((), Vec3(0, 0, 0))) is None


@given(
    st.integers(0, 2**32),
    st.floats(-0.4, 0.4),
    st.floats(-0.2, 0.2),
    st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)),
)
def test_resolve_matches_brute_force(seed, yaw, pitch, origin):
    scene = generate(SceneConfig(seed=seed))
    d = Vec3(math.sin(yaw) * math.cos(pitch), math.sin(pitch), math.cos(yaw) * math.cos(pitch))
    ray = GazeRay(Vec3(*origin), d.normalized())
    want = brute_force(ray, scene)
    got = resolve(frame_for(ray), scene)
    if want is None:
        assert got is None
        return
    assert got is not None
    t_got = ray_sphere_hit(ray, scene.by_id[got].position, scene.by_id[got].collider_radius)
    assert t_got == pytest.approx(want[0], abs=1e-9)
    ts = sorted(t for t in (ray_sphere_hit(ray, o.position, o.collider_radius) for o in scene.objects) if t is not None)
    if len(ts) == 1 or ts[1] - ts[0] > 1e-9:
        assert got == want[1]


def test_gaze_status_examples():
    s = update_gaze_status(GazeStatus(), 1, 2.0)
    assert s == GazeStatus(1, 2.0)
    assert update_gaze_status(s, 1, 3.0) == GazeStatus(1, 2.0)
    assert update_gaze_status(s, 2, 4.0) == GazeStatus(2, 4.0)
    assert update_gaze_status(s, None, 4.0) == GazeStatus()


@given(st.sets(st.integers(0, 5)), st.one_of(st.none(), st.integers(0, 5)), st.integers(0, 5))
def test_highlight_grouped_wins(members, gazed, obj):
    status = GazeStatus(gazed, 0.0 if gazed is not None else None)
    h = highlight(obj, status, members)
    if obj in members:
        assert h is Highlight.GROUPED
    elif gazed == obj:
        assert h is Highlight.GAZED
    else:
        assert h is Highlight.NONE
