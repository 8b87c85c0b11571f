#!/usr/bin/env python3
"""Record a spin-scenario telemetry fixture for the chart-fidelity test.

Spawns the simulator's websocket bridge on a steady spin scenario,
fast-forwarded 16x, and captures the raw telemetry frames (JSON, one
per line) once the formation has settled into the rotation. The test
suite treats the resulting file as ground-truth wire data, so frames
are stored exactly as received.
"""

import asyncio
import json
import pathlib
import subprocess
import sys
import tempfile
import time

import websockets

PORT = 8842
TIME_SCALE = 16
RECORD_FROM = 40.0
RECORD_UNTIL = 400.0

SCENARIO = {
    "name": "spin_fixture",
    "duration": 420.0,
    "rng_seed": 2024,
    "perturbation_radius": 0.0,
    "commands": [{"t": 2.0, "spin": 0.2}],
}

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "spin_telemetry.jsonl"


async def record(url: str) -> list[str]:
    lines: list[str] = []
    async with websockets.connect(url, max_size=2**22) as ws:
        hello = json.loads(await ws.recv())
        assert hello["type"] == "hello", hello
        print(f"connected: {hello['n_vehicles']} vehicles, time x{hello['time_scale']}")
        while True:
            raw = await ws.recv()
            msg = json.loads(raw)
            if msg.get("type") != "telemetry":
                continue
            t = msg["t"]
            if t < RECORD_FROM:
                continue
            if t >= RECORD_UNTIL:
                break
            lines.append(raw if isinstance(raw, str) else raw.decode())
    return lines


def main() -> int:
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
        json.dump(SCENARIO, f)
        scenario_path = f.name

    server = subprocess.Popen(
        [sys.executable, "-m", "swarmlift.cli", "serve", scenario_path,
         "--port", str(PORT), "--time-scale", str(TIME_SCALE)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        url = f"ws://127.0.0.1:{PORT}/ws"
        deadline = time.monotonic() + 15
        lines = None
        while True:
            try:
                lines = asyncio.run(record(url))
                break
            except OSError:
                if time.monotonic() > deadline:
                    raise
                time.sleep(0.3)
        OUT.parent.mkdir(parents=True, exist_ok=True)
        OUT.write_text("\n".join(lines) + "\n")
        span = json.loads(lines[-1])["t"] - json.loads(lines[0])["t"]
        print(f"wrote {len(lines)} frames spanning {span:.1f} sim seconds to {OUT}")
        return 0
    finally:
        server.terminate()
        server.wait(timeout=10)


if __name__ == "__main__":
    sys.exit(main())
