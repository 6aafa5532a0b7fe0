import math

import numpy as np
import pytest

from gesturepilot.errors import ContractError, FrustumError, InputError
from gesturepilot.scene import (
    BODY_W,
    HEAD_CENTER_Z,
    Scenario,
    SceneSpec,
    TimelineEntry,
    facing_user_state,
    load_scenario,
    render,
    scenario_from_dict,
)
from gesturepilot.sim import DroneState

USER = (0.0, 4.0, 0.0)


def rendered(dist=4.0, **kw):
    spec = SceneSpec(user_position=(0.0, dist, 0.0), **kw)
    return render(spec, facing_user_state(spec.user_position))


def test_resting_has_no_hand():
    _, truth = rendered(arm_which="rest")
    assert truth.hand_px is None
    assert truth.gesture_vector_px is None


def test_right_arm_horizontal_vector():
    _, truth = rendered(arm_which="right", arm_angle=0.0)
    # scale = 500 px / 4 m; arm length = BODY_W m
    want = BODY_W * 500 / 4.0
    vx, vy = truth.gesture_vector_px
    assert abs(vx - want) <= 2
    assert abs(vy) <= 2


def test_left_arm_mirrors_right():
    _, right = rendered(arm_which="right", arm_angle=0.4)
    _, left = rendered(arm_which="left", arm_angle=0.4)
    assert abs(left.gesture_vector_px[0] + right.gesture_vector_px[0]) <= 1
    assert abs(left.gesture_vector_px[1] - right.gesture_vector_px[1]) <= 1


def test_raised_arm_points_up_in_image():
    _, truth = rendered(arm_which="right", arm_angle=1.2)
    assert truth.gesture_vector_px[1] < 0  # image y grows downward


def test_gesture_vector_invariant():
    _, truth = rendered(arm_which="left", arm_angle=0.8)
    vx, vy = truth.gesture_vector_px
    assert (truth.p_uc_px[0] + vx, truth.p_uc_px[1] + vy) == truth.hand_px


def test_doubling_distance_halves_body_box():
    _, near = rendered(dist=4.0)
    _, far = rendered(dist=8.0)
    ratio = near.body_box.h / far.body_box.h
    assert abs(ratio - 2.0) <= 0.04


def test_face_box_centered_on_head():
    _, truth = rendered(dist=3.0)
    spec = SceneSpec(user_position=(0.0, 3.0, 0.0))
    drone = facing_user_state(spec.user_position)
    # project the head center through the same similarity map
    scale = spec.camera.focal_px / 3.0
    u = spec.camera.width / 2.0
    v = (spec.camera.height / 2.0 + scale * (drone.position[2] - 0.0)
         - scale * HEAD_CENTER_Z)
    cx, cy = truth.face_box.center()
    assert abs(cx - u) <= 1.0
    assert abs(cy - v) <= 1.0


def test_render_deterministic():
    a, _ = rendered(arm_which="front_high", noise_seed=7)
    b, _ = rendered(arm_which="front_high", noise_seed=7)
    assert np.array_equal(a.pixels, b.pixels)
    c, _ = rendered(arm_which="front_high", noise_seed=8)
    assert not np.array_equal(a.pixels, c.pixels)


def test_render_noise_free_uses_exact_palette():
    frame, _ = rendered()
    colors = {tuple(c) for c in frame.pixels.reshape(-1, 3)[::97]}
    spec = SceneSpec()
    allowed = {spec.palette.skin, spec.palette.clothing,
               spec.palette.background, spec.palette.marks}
    assert colors <= allowed


def test_render_behind_camera_raises():
    spec = SceneSpec(user_position=USER)
    away = DroneState(position=(0.0, 0.0, 1.2), yaw=-math.pi / 2)
    with pytest.raises(FrustumError):
        render(spec, away)


def test_scene_spec_validation():
    with pytest.raises(ContractError):
        SceneSpec(arm_which="both")
    with pytest.raises(ContractError):
        SceneSpec(arm_length_ratio=2.0)


# -- scripted scenarios -----------------------------------------------------------

def test_scenario_spec_at_switches_pose():
    base = SceneSpec(user_position=USER)
    scenario = Scenario(base=base,
                        timeline=(TimelineEntry(frames=10),
                                  TimelineEntry(frames=5, arm_which="left",
                                                arm_angle=1.0)),
                        drone_start=facing_user_state(USER))
    assert scenario.total_frames == 15
    assert scenario.spec_at(0).arm_which == "rest"
    assert scenario.spec_at(9).arm_which == "rest"
    assert scenario.spec_at(10).arm_which == "left"
    assert scenario.spec_at(14).arm_angle == 1.0
    with pytest.raises(ContractError):
        scenario.spec_at(15)


def test_scenario_noise_seed_varies_per_frame():
    base = SceneSpec(user_position=USER, noise_seed=100)
    scenario = Scenario(base=base, timeline=(TimelineEntry(frames=3),),
                        drone_start=facing_user_state(USER))
    seeds = {scenario.spec_at(i).noise_seed for i in range(3)}
    assert seeds == {100, 101, 102}


def test_scenario_from_dict_minimal():
    s = scenario_from_dict({"timeline": [{"frames": 4}]})
    assert s.total_frames == 4
    assert s.frame_interval_ms == 40
    # default drone faces the default user position
    assert s.drone_start.yaw == pytest.approx(math.pi / 2)


def test_scenario_from_dict_rejects_unknown_keys():
    with pytest.raises(InputError, match="unknown scenario keys"):
        scenario_from_dict({"timeline": [{"frames": 1}], "speed": 2})
    with pytest.raises(InputError, match=r"timeline\[0\]"):
        scenario_from_dict({"timeline": [{"frames": 1, "pose": "up"}]})


def test_scenario_from_dict_requires_timeline():
    with pytest.raises(InputError, match="timeline"):
        scenario_from_dict({"user_position": [0, 3, 0]})
    with pytest.raises(InputError, match="frames"):
        scenario_from_dict({"timeline": [{"arm_which": "left"}]})


def test_scenario_explicit_yaw_respected():
    s = scenario_from_dict({"timeline": [{"frames": 1}],
                            "drone": {"position": [1, 1, 2], "yaw": 0.25}})
    assert s.drone_start.yaw == 0.25
    assert s.drone_start.position == (1.0, 1.0, 2.0)


def test_bundled_scenarios_load(pytestconfig):
    root = pytestconfig.rootpath / "scenarios"
    names = sorted(p.name for p in root.glob("*.json"))
    assert len(names) >= 5
    for name in names:
        scenario = load_scenario(root / name)
        assert scenario.total_frames >= 60
        scenario.spec_at(scenario.total_frames - 1)


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(InputError, match="no such scenario"):
        load_scenario(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError, match="not valid JSON"):
        load_scenario(bad)
