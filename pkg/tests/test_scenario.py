"""Scenario documents: defaults, round trips, validation, command schedule."""

import json

import pytest

from swarmlift import (
    CommandEvent,
    RateConfig,
    Scenario,
    bundled_scenario_names,
    command_at,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)

BUNDLED = {
    "hold_square",
    "translate_reverse",
    "spin",
    "scale_up",
    "loaded_tour",
    "worst_case_pose",
}


def test_bundled_names():
    assert set(bundled_scenario_names()) == BUNDLED


def test_bundled_scenarios_load():
    for name in BUNDLED:
        scn = load_scenario(name)
        assert scn.name == name
        assert scn.duration > 0


def test_round_trip(tmp_path):
    scn = Scenario(
        name="probe",
        duration=3.5,
        perturbation_radius=0.12,
        commands=[CommandEvent(t=1.0, v_x=0.5), CommandEvent(t=2.0, spin=0.1)],
        assertions={"max_tilt": 0.62},
    )
    path = tmp_path / "probe.json"
    save_scenario(scn, path)
    again = load_scenario(path)
    assert again == scn


def test_unknown_field_rejected():
    with pytest.raises(ValueError, match="unknown"):
        scenario_from_dict({"name": "x", "warp_factor": 9})
    with pytest.raises(ValueError, match="unknown"):
        scenario_from_dict({"rates": {"plant_hz": 1024, "warp": 1}})


def test_rate_nesting_validation():
    with pytest.raises(ValueError):
        RateConfig(plant_hz=1000, control_hz=512, guidance_hz=4)
    with pytest.raises(ValueError):
        RateConfig(plant_hz=512, control_hz=1024, guidance_hz=4)
    cfg = RateConfig(plant_hz=2048, control_hz=512, guidance_hz=4)
    assert cfg.plant_hz // cfg.control_hz == 4


def test_missing_scenario_name():
    with pytest.raises(FileNotFoundError):
        load_scenario("no_such_scenario")


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "name": "x",\n  oops\n}\n')
    with pytest.raises(ValueError, match="line 3"):
        load_scenario(path)


def test_command_schedule():
    scn = Scenario(
        commands=[
            CommandEvent(t=2.0, v_x=1.0),
            CommandEvent(t=5.0, v_x=-1.0),
            CommandEvent(t=8.0),
        ]
    )
    assert command_at(scn, 0.0).v_translation == (0.0, 0.0)
    assert command_at(scn, 2.0).v_translation == (1.0, 0.0)
    assert command_at(scn, 4.999).v_translation == (1.0, 0.0)
    assert command_at(scn, 5.0).v_translation == (-1.0, 0.0)
    assert command_at(scn, 9.0).v_translation == (0.0, 0.0)


def test_command_event_clamps_and_altitude():
    ev = CommandEvent(t=0.0, v_x=3.0, v_y=4.0, spin=1.0)
    cmd = ev.motion_command(default_altitude=2.0)
    assert cmd.v_translation == pytest.approx((0.6, 0.8))
    assert cmd.omega_spin == 0.2
    assert cmd.altitude_setpoint == 2.0
    assert CommandEvent(t=0.0, altitude=3.5).motion_command(2.0).altitude_setpoint == 3.5


def test_scenario_to_dict_is_json_ready():
    text = json.dumps(scenario_to_dict(Scenario()))
    assert '"plant_hz": 1024' in text


def test_explicit_graph_spec():
    scn = Scenario(
        edges=[[0, 1], [1, 2]],
        desired_distances=[1.0, 1.0],
    )
    spec = scn.formation_spec()
    assert spec.graph.n == 3
    assert spec.graph.edges == ((0, 1), (1, 2))
    with pytest.raises(ValueError, match="desired_distances"):
        Scenario(edges=[[0, 1]]).formation_spec()
