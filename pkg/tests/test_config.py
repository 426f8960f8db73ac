from pathlib import Path

import pytest

from semipinch.config import EngineConfig, build_config, load_config_file, trial_seeds
from semipinch.errors import ConfigError
from semipinch.techniques import TechniqueId


def test_defaults():
    c = build_config()
    assert c == EngineConfig()
    assert c.targets == (2, 4, 6) and c.trials == 15


def test_flags_override_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(
        'technique = "semitilt"\ntrials = 3\nseed = 9\n[params]\ntilt_angle = 25.0\n[agent]\nreaction_time = 0.3\n'
    )
    c = build_config(load_config_file(p), {"trials": 5, "agent.reaction_time": "0.1"})
    assert c.techniques == (TechniqueId.SEMI_TILT,)
    assert c.trials == 5 and c.seed == 9
    assert c.params.tilt_angle == 25.0
    assert c.agent.reaction_time == 0.1


def test_all_techniques_and_target_list():
    c = build_config({}, {"techniques": "all", "targets": "2,6"})
    assert c.techniques == tuple(TechniqueId) and c.targets == (2, 6)


@pytest.mark.parametrize(
    "overrides",
    [
        {"bogus": 1},
        {"agent.bogus": 1},
        {"nosuch.key": 1},
        {"trials": 0},
        {"trials": "many"},
        {"targets": "2,x"},
        {"targets": "50"},
        {"technique": "wave"},
        {"pinch.full_enter": "0.5"},
        {"scene.columns": "1.5"},
        {"seed": -1},
    ],
)
def test_rejects_bad_settings(overrides):
    with pytest.raises(ConfigError):
        build_config({}, overrides)


def test_bad_toml(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("trials = = 3\n")
    with pytest.raises(ConfigError):
        load_config_file(p)


def test_digest_ignores_output_locations():
    a = build_config({}, {"out": "x", "jobs": 1})
    b = build_config({}, {"out": "y", "trace_out": "z", "jobs": 4})
    assert a.digest() == b.digest()
    assert a.digest() != build_config({}, {"seed": 1}).digest()
    assert b.trace_out == Path("z")


def test_scene_seed_shared_across_techniques():
    seeds = {trial_seeds(42, t, 4, 3) for t in TechniqueId}
    assert len({s for s, _ in seeds}) == 1
    assert len({a for _, a in seeds}) == len(TechniqueId)
    assert trial_seeds(42, TechniqueId.SEMI_DWELL, 4, 3) != trial_seeds(42, TechniqueId.SEMI_DWELL, 4, 4)
    assert trial_seeds(42, TechniqueId.SEMI_DWELL, 4, 3) == trial_seeds(42, TechniqueId.SEMI_DWELL, 4, 3)
