import os

from hypothesis import HealthCheck, settings

from semipinch.agent import DH_REST, NDH_REST, hand_pose
from semipinch.core import GazeRay, InputFrame, Vec3
from semipinch.scene import Scene, SceneObject

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

RATE = 90.0
EYE = Vec3(0.0, 0.0, 0.0)
NOWHERE = Vec3(0.0, 5.0, 10.0)


def line_scene(n=4, targets=(0, 1)) -> Scene:
    """``n`` spheres 2 m apart along x at z=10 (colliders do not overlap)."""
    return Scene(
        tuple(SceneObject(i, Vec3(-2.0 + 2.0 * i, 0.0, 10.0), 0.2, 0.6, i in targets) for i in range(n)),
        Vec3(1.0, 0.0, 10.0),
    )


def make_frame(t, scene=None, gaze=None, dh=0.05, ndh=0.05, dx=0.0, roll=0.0):
    aim = NOWHERE if gaze is None else scene.by_id[gaze].position
    return InputFrame(
        t,
        GazeRay.toward(EYE, aim),
        hand_pose(DH_REST + Vec3(dx, 0.0, 0.0), dh, roll),
        hand_pose(NDH_REST, ndh),
    )
