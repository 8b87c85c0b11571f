"""Multi-rate closed-loop simulation engine.

One SimWorld owns all state and advances it on three nested clocks: the
plant integrates every step, the acceleration controller runs every
plant_hz/control_hz steps, and guidance recomputes its commanded planar
accelerations every plant_hz/guidance_hz steps (zero-order hold in
between, matching the slow ground-station loop the design targets).

Rope forces are computed once per plant step from the pre-step states,
then consumed by the payload and every vehicle, so the coupling order is
fixed and the run is deterministic for a given seed.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTrace, NonFiniteState, NotRunning, RopeInfeasible
from .formation import relative_positions, square_positions
from .guidance import MotionCommand, compose_motion, guidance_accelerations
from .indi import IndiController, altitude_acceleration
from .payload import PayloadState, payload_net_force, rope_forces, step_payload
from .scenario import Scenario, command_at
from .trace import Trace
from .vehicle import GRAVITY, hover_state, sample_imu, step_vehicle

TILT_EPS = 1e-12


def _settled_payload_position(vehicle_positions, params) -> np.ndarray:
    """Static rest position of the payload under the given vehicle layout.

    Starting the payload anywhere else stores elastic energy in the stiff
    ropes (a centimeter of stretch is tens of newtons), so the run would
    open with an artificial tension spike. The rest pose minimizes gravity
    plus unilateral spring energy; ropes that come out slack there are
    genuinely slack at rest.
    """
    from scipy import optimize

    veh_p = np.asarray(vehicle_positions, dtype=np.float64)
    xy_c = veh_p[:, :2].mean(axis=0)
    radii = np.linalg.norm(veh_p[:, :2] - xy_c, axis=1)
    reach = params.rope_length**2 - radii**2
    if np.any(reach <= 0):
        raise RopeInfeasible(
            "a vehicle sits farther from the formation centroid than the rope length"
        )
    # Highest point below the centroid with every rope slack or just taut.
    z_slack = float(np.min(veh_p[:, 2] - np.sqrt(reach)))
    x0 = np.array([xy_c[0], xy_c[1], z_slack])
    weight = params.mass * GRAVITY

    def energy_and_grad(x):
        rel = x - veh_p
        dist = np.maximum(np.linalg.norm(rel, axis=1), 1e-12)
        stretch = np.maximum(0.0, dist - params.rope_length)
        energy = weight * x[2] + 0.5 * params.rope_stiffness * np.sum(stretch**2)
        grad = np.array([0.0, 0.0, weight]) + (
            params.rope_stiffness * stretch / dist
        ) @ rel
        return energy, grad

    sol = optimize.minimize(energy_and_grad, x0, jac=True, method="L-BFGS-B", tol=1e-14)
    if np.all(np.isfinite(sol.x)) and np.linalg.norm(sol.jac) < 1e-5:
        return np.asarray(sol.x, dtype=np.float64)
    return x0


class SimWorld:
    """All mutable state of one run plus the stepping logic."""

    def __init__(self, scenario: Scenario, seed_override: int | None = None):
        self.scenario = scenario
        seed = scenario.rng_seed if seed_override is None else seed_override
        self.rng = np.random.default_rng(seed)
        self.base_spec = scenario.formation_spec()
        self.current_d = self.base_spec.desired_distances * scenario.initial_scale
        self.rates = scenario.rates
        self.dt = 1.0 / self.rates.plant_hz
        self.steps_per_control = self.rates.plant_hz // self.rates.control_hz
        self.steps_per_guidance = self.rates.plant_hz // self.rates.guidance_hz
        self.guidance_dt = 1.0 / self.rates.guidance_hz
        self.step_index = 0

        n = self.base_spec.graph.n
        self.n = n
        if scenario.edges is None:
            xy_desired = square_positions(scenario.side * scenario.initial_scale)
        else:
            raise ValueError("the engine initializes square formations only")
        offsets = np.zeros((n, 2))
        if scenario.perturbation_radius > 0:
            angle = self.rng.uniform(0.0, 2.0 * math.pi, n)
            radius = scenario.perturbation_radius * self.rng.uniform(0.0, 1.0, n)
            offsets = radius[:, None] * np.column_stack([np.cos(angle), np.sin(angle)])
        xy0 = xy_desired + offsets

        share = scenario.payload.mass * GRAVITY / n if scenario.payload_enabled else 0.0
        self.vehicles = [
            hover_state(
                scenario.vehicle,
                np.array([xy0[i, 0], xy0[i, 1], scenario.altitude]),
                extra_load=share,
            )
            for i in range(n)
        ]
        if scenario.initial_speed is not None:
            v0 = np.asarray(scenario.initial_speed, dtype=np.float64)
            for state in self.vehicles:
                state.velocity = np.array([v0[0], v0[1], 0.0])
        self.controllers = [
            IndiController(
                scenario.vehicle,
                cutoff_hz=scenario.indi.cutoff_hz,
                sample_hz=float(self.rates.control_hz),
                use_commanded_input=scenario.indi.use_commanded_input,
            )
            for _ in range(n)
        ]

        self.payload = PayloadState(tensions=np.zeros((n, 3)))
        if scenario.payload_enabled:
            self.payload.position = _settled_payload_position(
                np.column_stack([xy0, np.full(n, scenario.altitude)]), scenario.payload
            )

        self.live_command: MotionCommand | None = None
        self.active_command = MotionCommand(altitude_setpoint=scenario.altitude)
        self.held_xy = np.zeros((n, 2))
        self.saturated = np.zeros(n, dtype=np.int_)
        self.nu_a = np.zeros((n, 3))
        self.commanded = [(0.0, 0.0, s.thrust) for s in self.vehicles]
        self.tensions = np.zeros((n, 3))
        self._records: list[tuple] = []

    # -- live control -----------------------------------------------------

    def apply_command(self, cmd: MotionCommand) -> MotionCommand:
        """Queue an operator command; it is snapshotted at the next guidance tick."""
        clamped = cmd.clamped()
        self.live_command = clamped
        return clamped

    def zero_command(self) -> None:
        """Dead-man: drop to a zero-motion command at the next guidance tick."""
        self.live_command = MotionCommand(
            altitude_setpoint=self.active_command.altitude_setpoint
        )

    # -- stepping ---------------------------------------------------------

    def positions_xy(self):
        return np.array([s.position[:2] for s in self.vehicles])

    def velocities_xy(self):
        return np.array([s.velocity[:2] for s in self.vehicles])

    def _guidance_tick(self, t: float) -> None:
        if self.live_command is not None:
            self.active_command = self.live_command
        else:
            self.active_command = command_at(self.scenario, t)
        spec_now = self.base_spec.with_distances(self.current_d)
        side = float(self.current_d[0])
        dis, new_d = compose_motion(
            self.active_command, spec_now, square_positions(side), self.guidance_dt
        )
        rel = relative_positions(spec_now, self.positions_xy())
        gcmd = guidance_accelerations(
            spec_now,
            rel,
            self.velocities_xy(),
            dis,
            axis_limit=self.scenario.indi.accel_axis_limit,
            produced_at=self.step_index // self.steps_per_guidance,
        )
        self.held_xy = gcmd.accel_xy
        self.saturated = gcmd.saturated.any(axis=1).astype(np.int_)
        self.current_d = new_d

    def _control_tick(self, t: float) -> None:
        setpoint = self.active_command.altitude_setpoint
        gains = self.scenario.altitude_gains
        rng = self.rng if self.scenario.imu_noise else None
        for i, state in enumerate(self.vehicles):
            imu = sample_imu(state, self.scenario.vehicle, self.tensions[i], rng, t)
            nu_z = altitude_acceleration(state.position[2], setpoint, state.velocity[2], gains)
            nu = np.array([self.held_xy[i, 0], self.held_xy[i, 1], nu_z])
            self.nu_a[i] = nu
            cmd = self.controllers[i].step(imu, state.attitude, state.motor_speed, nu)
            self.commanded[i] = (float(cmd[0]), float(cmd[1]), float(cmd[2]))

    def _record(self, t: float) -> None:
        self._records.append(
            (
                t,
                np.array([s.position for s in self.vehicles]),
                np.array([s.velocity for s in self.vehicles]),
                np.array([s.attitude for s in self.vehicles]),
                self.nu_a.copy(),
                np.array([c.last_a_f for c in self.controllers]),
                np.linalg.norm(self.tensions, axis=1),
                self.saturated.copy(),
                self.current_d.copy(),
                self.payload.position.copy(),
                self.payload.velocity.copy(),
                np.array(
                    [
                        self.active_command.v_translation[0],
                        self.active_command.v_translation[1],
                        self.active_command.omega_spin,
                    ]
                ),
            )
        )

    def run_steps(self, steps: int) -> None:
        """Advance the world by ``steps`` plant steps.

        Raises:
            NonFiniteState: with the partial trace attached.
        """
        scn = self.scenario
        for _ in range(steps):
            i = self.step_index
            t = i * self.dt
            try:
                if i % self.steps_per_guidance == 0:
                    self._guidance_tick(t)
                if scn.payload_enabled:
                    self.tensions = rope_forces(
                        self.payload, self.positions_xyz(), self.velocities_xyz(), scn.payload
                    )
                if i % self.steps_per_control == 0:
                    self._control_tick(t)
                if i % scn.record_decimation == 0:
                    self._record(t)
                if scn.payload_enabled:
                    force = payload_net_force(self.tensions, scn.payload)
                    self.payload = step_payload(self.payload, force, scn.payload, self.dt)
                    self.payload.tensions = self.tensions
                for v, state in enumerate(self.vehicles):
                    self.vehicles[v] = step_vehicle(
                        state, scn.vehicle, self.commanded[v], self.tensions[v], self.dt
                    )
            except NonFiniteState as exc:
                raise NonFiniteState(
                    f"aborted at t = {t:.3f} s: {exc}", partial_trace=self.trace()
                ) from exc
            self.step_index += 1

    def positions_xyz(self):
        return np.array([s.position for s in self.vehicles])

    def velocities_xyz(self):
        return np.array([s.velocity for s in self.vehicles])

    def trace(self) -> Trace:
        """Assemble the recorded rows into a Trace."""
        rows = self._records
        if not rows:
            raise EmptyTrace("no records yet")
        t = np.array([r[0] for r in rows])
        position = np.stack([r[1] for r in rows])
        distances = np.stack(
            [
                np.linalg.norm(
                    np.array([p[tail, :2] - p[head, :2] for tail, head in self.base_spec.graph.edges]),
                    axis=1,
                )
                for p in position
            ]
        )
        return Trace(
            t=t,
            position=position,
            velocity=np.stack([r[2] for r in rows]),
            attitude=np.stack([r[3] for r in rows]),
            nu_a=np.stack([r[4] for r in rows]),
            a_f=np.stack([r[5] for r in rows]),
            tension=np.stack([r[6] for r in rows]),
            saturated=np.stack([r[7] for r in rows]),
            distances=distances,
            desired_distances=np.stack([r[8] for r in rows]),
            payload_position=np.stack([r[9] for r in rows]),
            payload_velocity=np.stack([r[10] for r in rows]),
            command=np.stack([r[11] for r in rows]),
        )

    def telemetry_frame(self) -> dict:
        """Live snapshot for the websocket channel."""
        p = self.positions_xyz()
        rel_d = np.linalg.norm(
            np.array(
                [p[tail, :2] - p[head, :2] for tail, head in self.base_spec.graph.edges]
            ),
            axis=1,
        )
        return {
            "t": self.step_index * self.dt,
            "positions": p.tolist(),
            "velocities": self.velocities_xyz().tolist(),
            "attitudes": [s.attitude.tolist() for s in self.vehicles],
            "distances": rel_d.tolist(),
            "desired_distances": self.current_d.tolist(),
            "payload_position": self.payload.position.tolist(),
            "tensions": np.linalg.norm(self.tensions, axis=1).tolist(),
            "saturated": self.saturated.tolist(),
            "command": {
                "v_x": self.active_command.v_translation[0],
                "v_y": self.active_command.v_translation[1],
                "spin": self.active_command.omega_spin,
                "scale_rate": self.active_command.scale_rate,
                "altitude": self.active_command.altitude_setpoint,
            },
        }


def run_scenario(scenario: Scenario, seed_override: int | None = None) -> Trace:
    """Run a scenario start to finish and return its trace.

    Deterministic: the same scenario and seed produce byte-identical
    serialized traces.

    Raises:
        NonFiniteState: integration blew up; partial trace attached.
    """
    world = SimWorld(scenario, seed_override)
    total = int(round(scenario.duration * scenario.rates.plant_hz))
    world.run_steps(total)
    return world.trace()


def tilt_angle(attitude) -> float:
    """Angle of the thrust axis from vertical: arccos(cos(roll) cos(pitch))."""
    c = math.cos(attitude[0]) * math.cos(attitude[1])
    return math.acos(min(1.0, max(-1.0, c)))


def first_crossing_time(t, values, threshold) -> float:
    """First time ``values`` drops below ``threshold`` (linear interpolation)."""
    below = np.nonzero(np.asarray(values) < threshold)[0]
    if len(below) == 0 or below[0] == 0:
        return float("nan")
    j = int(below[0])
    x0, x1 = values[j - 1], values[j]
    frac = (x0 - threshold) / (x0 - x1)
    return float(t[j - 1] + frac * (t[j] - t[j - 1]))


def trace_metrics(trace: Trace) -> dict:
    """Summary numbers for a finished trace.

    Raises:
        EmptyTrace: no records.
    """
    if len(trace) == 0:
        raise EmptyTrace("cannot summarize an empty trace")
    err = trace.distances - trace.desired_distances
    centroid = trace.position[:, :, :2].mean(axis=1)
    swing = np.linalg.norm(trace.payload_position[:, :2] - centroid, axis=1)
    tilt = np.arccos(
        np.clip(np.cos(trace.attitude[:, :, 0]) * np.cos(trace.attitude[:, :, 1]), -1.0, 1.0)
    )
    err_norm = np.linalg.norm(err, axis=1)
    guidance_tau = float("nan")
    if np.abs(err[0]).max() > 0.05:
        guidance_tau = first_crossing_time(trace.t, err_norm, err_norm[0] / math.e)

    # Speed tracking on constant-command translation stretches. Commands act
    # in the formation body frame and nothing pins absolute orientation, so
    # nav-frame components are not comparable; speed is.
    tracking = float("nan")
    cmd = trace.command
    boundaries = [0] + [
        j for j in range(1, len(trace)) if not np.array_equal(cmd[j], cmd[j - 1])
    ] + [len(trace)]
    worst = None
    for a, b in zip(boundaries[:-1], boundaries[1:]):
        seg_t = trace.t[b - 1] - trace.t[a]
        if seg_t < 5.0 or cmd[a, 2] != 0.0 or (cmd[a, 0] == 0.0 and cmd[a, 1] == 0.0):
            continue
        tail = trace.t[a:b] >= trace.t[b - 1] - 2.0
        mean_v = trace.velocity[a:b][tail][:, :, :2].mean(axis=(0, 1))
        gap = abs(float(np.linalg.norm(mean_v)) - float(np.linalg.norm(cmd[a, :2])))
        worst = gap if worst is None else max(worst, gap)
    if worst is not None:
        tracking = worst

    return {
        "max_edge_error": float(np.abs(err).max()),
        "final_edge_error": float(np.abs(err[-1]).max()),
        "payload_swing": float(swing.max()),
        "max_tilt": float(tilt.max()),
        "max_tension": float(trace.tension.max()),
        "max_axis_accel": float(np.abs(trace.nu_a[:, :, :2]).max()),
        "velocity_tracking_error": tracking,
        "guidance_time_constant": guidance_tau,
        "duration": float(trace.t[-1]),
        "records": len(trace),
    }


ASSERTION_UPPER_BOUNDS = {
    "max_edge_error": "max_edge_error",
    "final_edge_error": "final_edge_error",
    "payload_swing": "payload_swing",
    "max_tilt": "max_tilt",
    "max_axis_accel": "max_axis_accel",
    "velocity_tracking_error": "velocity_tracking_error",
}


def check_assertions(metrics: dict, assertions: dict) -> list[tuple[str, bool, float, float]]:
    """Evaluate scenario-embedded upper bounds against metrics."""
    results = []
    for key, bound in assertions.items():
        metric = ASSERTION_UPPER_BOUNDS.get(key)
        if metric is None:
            raise ValueError(f"unknown assertion {key!r}")
        value = metrics[metric]
        results.append((key, bool(value <= bound), value, bound))
    return results


class InteractiveSim:
    """Background real-time-paced run accepting live operator commands.

    The stepping thread advances the world in small chunks and paces them
    against the wall clock scaled by time_scale. Snapshots and pending
    commands cross the thread boundary under one lock; telemetry reads the
    latest frame without ever blocking the loop.
    """

    def __init__(self, scenario: Scenario, time_scale: float = 1.0):
        self.world = SimWorld(scenario)
        self.time_scale = time_scale
        self.chunk_steps = max(1, scenario.rates.plant_hz // 64)
        self._lock = threading.Lock()
        self._frame = self.world.telemetry_frame()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._failure: str | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    def _loop(self) -> None:
        chunk_wall = self.world.dt * self.chunk_steps / self.time_scale
        next_deadline = time.perf_counter() + chunk_wall
        while not self._stop.is_set():
            try:
                with self._lock:
                    self.world.run_steps(self.chunk_steps)
                    self._frame = self.world.telemetry_frame()
            except NonFiniteState as exc:
                self._failure = str(exc)
                return
            delay = next_deadline - time.perf_counter()
            next_deadline += chunk_wall
            if delay > 0:
                time.sleep(delay)

    def latest_frame(self) -> dict:
        with self._lock:
            if self._failure is not None:
                return {"error": self._failure}
            return self._frame

    def apply_live_command(self, cmd: MotionCommand) -> MotionCommand:
        """Clamp and queue a live command.

        Raises:
            NotRunning: the stepping thread is not alive.
        """
        if not self.running:
            raise NotRunning("simulation loop is not running")
        with self._lock:
            return self.world.apply_command(cmd)

    def release_operator(self) -> None:
        """Dead-man zeroing when the operator connection drops."""
        with self._lock:
            self.world.zero_command()


def measure_time_constants(noise: bool = False) -> tuple[float, float]:
    """Fitted guidance and acceleration-loop time constants at default gains.

    Guidance: first 1/e crossing of the edge-error norm in a perturbed
    closed-loop hold. Acceleration loop: 63% rise of the filtered
    acceleration after a step in nu_a on a single hovering vehicle.
    """
    from .scenario import Scenario as _Scenario

    scn = _Scenario(
        name="tau-probe",
        duration=10.0,
        perturbation_radius=0.3,
        imu_noise=noise,
        payload_enabled=True,
        rng_seed=7,
    )
    trace = run_scenario(scn)
    err_norm = np.linalg.norm(trace.distances - trace.desired_distances, axis=1)
    guidance_tau = first_crossing_time(trace.t, err_norm, err_norm[0] / math.e)

    indi_tau = measure_accel_loop_tau(noise=noise)
    return guidance_tau, indi_tau


def measure_accel_loop_tau(noise: bool = False, step: float = 1.0) -> float:
    """63% rise time of the tracked acceleration after a nu_a step."""
    from .indi import IndiController as _Ctl
    from .scenario import Scenario as _Scenario
    from .vehicle import VehicleParams as _Params

    params = _Params()
    scn = _Scenario()
    state = hover_state(params, np.zeros(3))
    ctl = _Ctl(params, sample_hz=float(scn.rates.control_hz))
    dt = 1.0 / scn.rates.plant_hz
    per_control = scn.rates.plant_hz // scn.rates.control_hz
    rng = np.random.default_rng(3) if noise else None
    cmd = (0.0, 0.0, state.thrust)
    t_step = 1.0
    total = int(round(3.0 / dt))
    crossing = float("nan")
    for i in range(total):
        t = i * dt
        nu = np.array([step if t >= t_step else 0.0, 0.0, 0.0])
        if i % per_control == 0:
            imu = sample_imu(state, params, np.zeros(3), rng, t)
            out = ctl.step(imu, state.attitude, state.motor_speed, nu)
            cmd = (float(out[0]), float(out[1]), float(out[2]))
        state = step_vehicle(state, params, cmd, np.zeros(3), dt)
        if math.isnan(crossing) and t >= t_step and state.accel_true[0] >= 0.632 * step:
            crossing = t - t_step
    return crossing
