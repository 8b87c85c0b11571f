"""Websocket bridge: roles, telemetry pacing, command acks, dead-man logic."""

import time

import pytest
from fastapi.testclient import TestClient

from swarmlift import MotionCommand
from swarmlift.server import command_payload, create_app, sticks_to_command
from tests.test_engine import quick_scenario


def scenario():
    return quick_scenario(duration=600.0, commands=[], perturbation_radius=0.0)


def drain_until(ws, msg_type, limit=200):
    for _ in range(limit):
        msg = ws.receive_json()
        if msg.get("type") == msg_type:
            return msg
    raise AssertionError(f"no {msg_type!r} message within {limit} frames")


def test_sticks_to_command_clamps():
    sticks, cmd = sticks_to_command(
        {"stick_x": 2.0, "stick_y": 0.0, "spin": -3.0, "scale": 0.5, "altitude_delta": 9.0},
        current_altitude=2.0,
    )
    assert sticks["stick_x"] == 1.0
    assert sticks["spin"] == -1.0
    assert sticks["altitude_delta"] == 0.5
    assert cmd.v_translation == (1.0, 0.0)
    assert cmd.omega_spin == -0.2
    assert cmd.scale_rate == pytest.approx(0.1)
    assert cmd.altitude_setpoint == 2.5
    # Missing fields default to neutral sticks.
    _, idle = sticks_to_command({}, current_altitude=2.0)
    assert idle.v_translation == (0.0, 0.0) and idle.omega_spin == 0.0


def test_command_payload_fields():
    payload = command_payload(MotionCommand(v_translation=(0.3, -0.1), omega_spin=0.05))
    assert payload == {
        "v_x": 0.3,
        "v_y": -0.1,
        "spin": 0.05,
        "scale_rate": 0.0,
        "altitude": 2.0,
    }


def test_hello_and_telemetry_schema():
    app = create_app(scenario(), time_scale=8.0)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            hello = ws.receive_json()
            assert hello["type"] == "hello"
            assert hello["schema_version"] == 1
            assert hello["role"] == "operator"
            assert hello["n_vehicles"] == 4
            assert len(hello["edges"]) == 6
            assert len(hello["desired_distances"]) == 6
            assert hello["rates"] == {"plant_hz": 1024, "control_hz": 512, "guidance_hz": 4}
            assert hello["telemetry_hz"] == 20.0
            assert hello["time_scale"] == 8.0
            frame = drain_until(ws, "telemetry")
            for key in (
                "t",
                "positions",
                "velocities",
                "attitudes",
                "distances",
                "desired_distances",
                "payload_position",
                "tensions",
                "saturated",
                "command",
            ):
                assert key in frame


def test_telemetry_time_is_monotone():
    app = create_app(scenario(), time_scale=8.0)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            times = []
            while len(times) < 12:
                msg = ws.receive_json()
                if msg["type"] == "telemetry":
                    times.append(msg["t"])
            assert all(b >= a for a, b in zip(times, times[1:]))
            assert times[-1] > times[0]


def test_operator_command_acked_with_clamps():
    app = create_app(scenario(), time_scale=8.0)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({"type": "command", "stick_x": 5.0, "spin": 0.25})
            ack = drain_until(ws, "ack")
            assert ack["command"]["stick_x"] == 1.0
            assert ack["applied"]["v_x"] == 1.0
            assert ack["applied"]["spin"] == pytest.approx(0.25 * 0.2)
            assert ack["t"] >= 0.0


def test_unknown_message_type_rejected():
    app = create_app(scenario(), time_scale=8.0)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({"type": "teleport"})
            err = drain_until(ws, "error")
            assert "teleport" in err["reason"]


def test_observer_rejected_and_promoted():
    app = create_app(scenario(), time_scale=8.0)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as op:
            assert op.receive_json()["role"] == "operator"
            with client.websocket_connect("/ws") as obs:
                assert obs.receive_json()["role"] == "observer"
                obs.send_json({"type": "command", "stick_x": 1.0})
                err = drain_until(obs, "error")
                assert "cannot command" in err["reason"]
                # Operator drops; the observer must hear about its promotion.
                op.send_json({"type": "command", "stick_x": 1.0})
                drain_until(op, "ack")
            # observer context exits first; reconnect order: close op now.
        with client.websocket_connect("/ws") as late:
            assert late.receive_json()["role"] == "operator"


def test_promotion_message_reaches_observer():
    app = create_app(scenario(), time_scale=8.0)
    with TestClient(app) as client:
        op = client.websocket_connect("/ws").__enter__()
        assert op.receive_json()["role"] == "operator"
        obs = client.websocket_connect("/ws").__enter__()
        try:
            assert obs.receive_json()["role"] == "observer"
            op.__exit__(None, None, None)
            role_msg = drain_until(obs, "role", limit=400)
            assert role_msg["role"] == "operator"
            obs.send_json({"type": "command", "stick_y": -1.0})
            ack = drain_until(obs, "ack")
            assert ack["applied"]["v_y"] == -1.0
        finally:
            obs.__exit__(None, None, None)


def test_dead_man_zeroes_command():
    app = create_app(scenario(), time_scale=16.0)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as op:
            op.receive_json()
            op.send_json({"type": "command", "stick_x": 1.0})
            drain_until(op, "ack")
        # Operator gone. A fresh observer should see the command fall back
        # to zero within one guidance tick (0.25 s sim time).
        sim = app.state.sim
        deadline = time.monotonic() + 5.0
        while time.monotonic() < deadline:
            cmd = sim.latest_frame()["command"]
            if cmd["v_x"] == 0.0:
                break
            time.sleep(0.01)
        assert sim.latest_frame()["command"]["v_x"] == 0.0
