"""Trace container and serialization (CSV and JSON lines).

Column order is fixed and documented here; the writers are deterministic
byte for byte given identical inputs.

    t,
    then per vehicle i (1-based):
        px_i, py_i, pz_i, vx_i, vy_i, vz_i,
        roll_i, pitch_i, yaw_i,
        nux_i, nuy_i, nuz_i, afx_i, afy_i, afz_i,
        tension_i, sat_i,
    then per edge k (1-based): dist_k, ddes_k,
    then payload: pl_px, pl_py, pl_pz, pl_vx, pl_vy, pl_vz,
    then the applied command: cmd_vx, cmd_vy, cmd_spin.

Floats are rendered with %.17g (lossless round trip); sat_i is 0/1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .errors import EmptyTrace


@dataclass
class Trace:
    """Fixed-rate recording of a run; arrays share the leading time axis."""

    t: NDArray[np.float64]
    position: NDArray[np.float64]  # (T, n, 3)
    velocity: NDArray[np.float64]  # (T, n, 3)
    attitude: NDArray[np.float64]  # (T, n, 3)
    nu_a: NDArray[np.float64]  # (T, n, 3)
    a_f: NDArray[np.float64]  # (T, n, 3)
    tension: NDArray[np.float64]  # (T, n) magnitudes
    saturated: NDArray[np.int_]  # (T, n) 0/1, any axis clipped
    distances: NDArray[np.float64]  # (T, E)
    desired_distances: NDArray[np.float64]  # (T, E)
    payload_position: NDArray[np.float64]  # (T, 3)
    payload_velocity: NDArray[np.float64]  # (T, 3)
    command: NDArray[np.float64]  # (T, 3): v_x, v_y, spin

    @property
    def n_vehicles(self) -> int:
        return self.position.shape[1]

    @property
    def n_edges(self) -> int:
        return self.distances.shape[1]

    def __len__(self) -> int:
        return len(self.t)


def trace_columns(n: int, m: int) -> list[str]:
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"px_{i}", f"py_{i}", f"pz_{i}", f"vx_{i}", f"vy_{i}", f"vz_{i}"]
        cols += [f"roll_{i}", f"pitch_{i}", f"yaw_{i}"]
        cols += [f"nux_{i}", f"nuy_{i}", f"nuz_{i}", f"afx_{i}", f"afy_{i}", f"afz_{i}"]
        cols += [f"tension_{i}", f"sat_{i}"]
    for k in range(1, m + 1):
        cols += [f"dist_{k}", f"ddes_{k}"]
    cols += ["pl_px", "pl_py", "pl_pz", "pl_vx", "pl_vy", "pl_vz"]
    cols += ["cmd_vx", "cmd_vy", "cmd_spin"]
    return cols


def _row_matrix(trace: Trace) -> NDArray[np.float64]:
    rows = [trace.t[:, None]]
    for i in range(trace.n_vehicles):
        rows += [
            trace.position[:, i, :],
            trace.velocity[:, i, :],
            trace.attitude[:, i, :],
            trace.nu_a[:, i, :],
            trace.a_f[:, i, :],
            trace.tension[:, i, None],
            trace.saturated[:, i, None].astype(np.float64),
        ]
    for k in range(trace.n_edges):
        rows += [trace.distances[:, k, None], trace.desired_distances[:, k, None]]
    rows += [trace.payload_position, trace.payload_velocity, trace.command]
    return np.concatenate(rows, axis=1)


def write_csv(trace: Trace, path) -> None:
    cols = trace_columns(trace.n_vehicles, trace.n_edges)
    matrix = _row_matrix(trace)
    lines = [",".join(cols)]
    for row in matrix:
        lines.append(",".join("%.17g" % x for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_jsonl(trace: Trace, path) -> None:
    cols = trace_columns(trace.n_vehicles, trace.n_edges)
    matrix = _row_matrix(trace)
    with open(path, "w") as fh:
        for row in matrix:
            fh.write(json.dumps(dict(zip(cols, row)), separators=(",", ":")) + "\n")


def read_csv(path) -> Trace:
    """Rebuild a Trace from a CSV written by write_csv.

    Raises:
        EmptyTrace: header only, no records.
        ValueError: header does not look like a trace of this layout.
    """
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    if len(text) < 2:
        raise EmptyTrace(f"{path} holds no records")
    n = sum(1 for c in header if c.startswith("tension_"))
    m = sum(1 for c in header if c.startswith("dist_"))
    if header != trace_columns(n, m):
        raise ValueError(f"{path} does not match the documented trace layout")
    matrix = np.array([[float(x) for x in line.split(",")] for line in text[1:]])
    steps = matrix.shape[0]

    def grab(width):
        nonlocal cursor
        block = matrix[:, cursor : cursor + width]
        cursor += width
        return block

    cursor = 0
    t = grab(1)[:, 0]
    position = np.empty((steps, n, 3))
    velocity = np.empty((steps, n, 3))
    attitude = np.empty((steps, n, 3))
    nu_a = np.empty((steps, n, 3))
    a_f = np.empty((steps, n, 3))
    tension = np.empty((steps, n))
    saturated = np.empty((steps, n), dtype=np.int_)
    for i in range(n):
        position[:, i, :] = grab(3)
        velocity[:, i, :] = grab(3)
        attitude[:, i, :] = grab(3)
        nu_a[:, i, :] = grab(3)
        a_f[:, i, :] = grab(3)
        tension[:, i] = grab(1)[:, 0]
        saturated[:, i] = grab(1)[:, 0].astype(np.int_)
    distances = np.empty((steps, m))
    desired = np.empty((steps, m))
    for k in range(m):
        distances[:, k] = grab(1)[:, 0]
        desired[:, k] = grab(1)[:, 0]
    payload_position = grab(3)
    payload_velocity = grab(3)
    command = grab(3)
    return Trace(
        t=t,
        position=position,
        velocity=velocity,
        attitude=attitude,
        nu_a=nu_a,
        a_f=a_f,
        tension=tension,
        saturated=saturated,
        distances=distances,
        desired_distances=desired,
        payload_position=payload_position,
        payload_velocity=payload_velocity,
        command=command,
    )
