"""Websocket bridge between the live simulation and operator consoles.

Wire protocol (JSON text frames, documented in README.md):

  server -> client   hello {schema_version, role, n_vehicles, edges,
                            desired_distances, rates, telemetry_hz, time_scale}
  server -> client   telemetry {t, positions, velocities, attitudes,
                                distances, desired_distances,
                                payload_position, tensions, saturated, command}
  client -> server   command {stick_x, stick_y, spin, scale, altitude_delta}
  server -> client   ack {command, applied, t}
  server -> client   role {role}            (observer promoted to operator)
  server -> client   error {reason}

The first connected client is the operator; later clients are observers
whose commands are rejected. When the operator disconnects, the command
drops to zero at the next guidance tick (dead-man) and the oldest
observer, if any, is promoted.
"""

from __future__ import annotations

import asyncio
import itertools
from contextlib import asynccontextmanager

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import InteractiveSim
from .errors import NotRunning
from .guidance import (
    MAX_SCALE_RATE,
    MAX_SPIN_RATE,
    MAX_TRANSLATION_SPEED,
    MotionCommand,
)
from .scenario import Scenario

SCHEMA_VERSION = 1
TELEMETRY_HZ = 20.0
ALTITUDE_RANGE = (0.5, 10.0)
ALTITUDE_DELTA_LIMIT = 0.5


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


def sticks_to_command(msg: dict, current_altitude: float) -> tuple[dict, MotionCommand]:
    """Map normalized stick deflections onto a clamped MotionCommand."""
    sticks = {
        "stick_x": _clamp(float(msg.get("stick_x", 0.0)), -1.0, 1.0),
        "stick_y": _clamp(float(msg.get("stick_y", 0.0)), -1.0, 1.0),
        "spin": _clamp(float(msg.get("spin", 0.0)), -1.0, 1.0),
        "scale": _clamp(float(msg.get("scale", 0.0)), -1.0, 1.0),
        "altitude_delta": _clamp(
            float(msg.get("altitude_delta", 0.0)),
            -ALTITUDE_DELTA_LIMIT,
            ALTITUDE_DELTA_LIMIT,
        ),
    }
    altitude = _clamp(
        current_altitude + sticks["altitude_delta"], ALTITUDE_RANGE[0], ALTITUDE_RANGE[1]
    )
    cmd = MotionCommand(
        v_translation=(
            sticks["stick_x"] * MAX_TRANSLATION_SPEED,
            sticks["stick_y"] * MAX_TRANSLATION_SPEED,
        ),
        omega_spin=sticks["spin"] * MAX_SPIN_RATE,
        scale_rate=sticks["scale"] * MAX_SCALE_RATE,
        altitude_setpoint=altitude,
    ).clamped()
    return sticks, cmd


def command_payload(cmd: MotionCommand) -> dict:
    return {
        "v_x": cmd.v_translation[0],
        "v_y": cmd.v_translation[1],
        "spin": cmd.omega_spin,
        "scale_rate": cmd.scale_rate,
        "altitude": cmd.altitude_setpoint,
    }


def create_app(scenario: Scenario, time_scale: float = 1.0) -> FastAPI:
    """Build the FastAPI app owning one InteractiveSim."""
    sim = InteractiveSim(scenario, time_scale)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        sim.start()
        yield
        sim.stop()

    app = FastAPI(title="swarmlift operator bridge", lifespan=lifespan)
    app.state.sim = sim
    clients: dict[int, WebSocket] = {}
    roles: dict[int, str] = {}
    ids = itertools.count()
    lock = asyncio.Lock()

    def _has_operator() -> bool:
        return any(role == "operator" for role in roles.values())

    async def _telemetry_loop(websocket: WebSocket) -> None:
        period = 1.0 / TELEMETRY_HZ
        loop = asyncio.get_running_loop()
        deadline = loop.time() + period
        while True:
            frame = sim.latest_frame()
            if "error" in frame:
                await websocket.send_json({"type": "error", "reason": frame["error"]})
                return
            await websocket.send_json({"type": "telemetry", **frame})
            delay = deadline - loop.time()
            deadline += period
            if delay > 0:
                await asyncio.sleep(delay)
            elif delay < -1.0:
                deadline = loop.time() + period

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        async with lock:
            cid = next(ids)
            role = "observer" if _has_operator() else "operator"
            clients[cid] = websocket
            roles[cid] = role
        await websocket.send_json(
            {
                "type": "hello",
                "schema_version": SCHEMA_VERSION,
                "role": role,
                "n_vehicles": sim.world.n,
                "edges": [list(e) for e in sim.world.base_spec.graph.edges],
                "desired_distances": sim.world.current_d.tolist(),
                "rates": {
                    "plant_hz": scenario.rates.plant_hz,
                    "control_hz": scenario.rates.control_hz,
                    "guidance_hz": scenario.rates.guidance_hz,
                },
                "telemetry_hz": TELEMETRY_HZ,
                "time_scale": time_scale,
            }
        )
        telemetry = asyncio.create_task(_telemetry_loop(websocket))
        try:
            while True:
                msg = await websocket.receive_json()
                if msg.get("type") != "command":
                    await websocket.send_json(
                        {"type": "error", "reason": f"unknown message type {msg.get('type')!r}"}
                    )
                    continue
                if roles.get(cid) != "operator":
                    await websocket.send_json(
                        {"type": "error", "reason": "observer connections cannot command"}
                    )
                    continue
                current_alt = sim.latest_frame().get("command", {}).get(
                    "altitude", scenario.altitude
                )
                sticks, cmd = sticks_to_command(msg, current_alt)
                try:
                    applied = sim.apply_live_command(cmd)
                except NotRunning as exc:
                    await websocket.send_json({"type": "error", "reason": str(exc)})
                    continue
                await websocket.send_json(
                    {
                        "type": "ack",
                        "command": sticks,
                        "applied": command_payload(applied),
                        "t": sim.latest_frame().get("t"),
                    }
                )
        except WebSocketDisconnect:
            pass
        finally:
            telemetry.cancel()
            async with lock:
                was_operator = roles.get(cid) == "operator"
                clients.pop(cid, None)
                roles.pop(cid, None)
                if was_operator:
                    sim.release_operator()
                    for other in clients:
                        roles[other] = "operator"
                        try:
                            await clients[other].send_json(
                                {"type": "role", "role": "operator"}
                            )
                        except Exception:
                            pass
                        break

    return app


def serve(scenario: Scenario, host: str, port: int, time_scale: float = 1.0) -> None:
    """Run the bridge until interrupted."""
    import uvicorn

    uvicorn.run(create_app(scenario, time_scale), host=host, port=port, log_level="warning")
