"""Single-rotorcraft plant: rigid body, attitude lag, motor lag, IMU model.

The inner attitude loop is abstracted as a first-order lag toward the
commanded roll/pitch (yaw held at zero; guidance is planar). Thrust comes
from a common motor speed through a quadratic map, with its own faster
first-order lag. Translational dynamics are integrated with symplectic
Euler, which stays stable against the stiff rope springs.

Attitude convention is ZYX Euler (yaw-pitch-roll); the body thrust vector
in the navigation frame is R(eta) (0, 0, T) with z up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import NonFiniteState

GRAVITY = 9.81


@dataclass
class VehicleParams:
    """Physical and actuator parameters of one rotorcraft.

    thrust_coeff is the true per-motor quadratic coefficient (N per Hz^2);
    thrust_coeff_nominal is what the controller-side command mapping uses
    (None means identical). Keeping them separate lets tests perturb the
    plant while the controller keeps the nominal map.
    """

    mass: float = 0.4
    max_thrust_per_motor: float = 1.6
    n_motors: int = 4
    motor_time_constant: float = 0.02
    attitude_time_constant: float = 0.05
    attitude_limit: float = 0.35
    thrust_coeff: float = 1.6 / 160.0**2
    thrust_coeff_nominal: float | None = None
    accel_noise_std: float = 0.2
    vibration_amplitude: float = 0.5
    vibration_freq: float = 50.0
    # Moment per rpm of one motor; recorded for completeness, individual
    # motor mixing is outside the model.
    moment_coeff: float = 0.0006

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.attitude_limit > 0.35 + 1e-12:
            raise ValueError("attitude_limit above the 0.35 rad budget")

    @property
    def nominal_coeff(self) -> float:
        return self.thrust_coeff if self.thrust_coeff_nominal is None else self.thrust_coeff_nominal

    @property
    def max_thrust_total(self) -> float:
        return self.n_motors * self.max_thrust_per_motor

    @property
    def max_motor_speed(self) -> float:
        return math.sqrt(self.max_thrust_per_motor / self.nominal_coeff)


@dataclass
class VehicleState:
    """Pose, velocity, attitude, and actuator state of one vehicle."""

    position: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    velocity: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    attitude: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    motor_speed: float = 0.0
    thrust: float = 0.0
    accel_true: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))

    def copy(self) -> "VehicleState":
        return VehicleState(
            position=self.position.copy(),
            velocity=self.velocity.copy(),
            attitude=self.attitude.copy(),
            motor_speed=self.motor_speed,
            thrust=self.thrust,
            accel_true=self.accel_true.copy(),
        )


@dataclass
class ImuSample:
    """Body-frame accelerometer and gyro reading (gravity excluded)."""

    specific_force: NDArray[np.float64]
    gyro: NDArray[np.float64]


def rotation_matrix(attitude) -> NDArray[np.float64]:
    """Body-to-navigation rotation Rz(yaw) Ry(pitch) Rx(roll)."""
    roll, pitch, yaw = attitude
    cf, sf = math.cos(roll), math.sin(roll)
    ct, st = math.cos(pitch), math.sin(pitch)
    cp, sp = math.cos(yaw), math.sin(yaw)
    return np.array(
        [
            [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
            [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
            [-st, ct * sf, ct * cf],
        ]
    )


def thrust_from_motor_speed(omega: float, params: VehicleParams, nominal: bool = False) -> float:
    """Per-motor thrust T = c omega^2 (omega in Hz).

    With the default calibration one motor gives 1.6 N at 160 Hz. Pass
    nominal=True to use the controller-side coefficient.
    """
    if omega < 0:
        raise ValueError("motor speed must be nonnegative")
    c = params.nominal_coeff if nominal else params.thrust_coeff
    return c * omega * omega


def motor_speed_for_thrust(total_thrust: float, params: VehicleParams) -> float:
    """Common motor speed whose nominal map produces the requested total thrust."""
    per_motor = max(0.0, total_thrust) / params.n_motors
    omega = math.sqrt(per_motor / params.nominal_coeff)
    return min(omega, params.max_motor_speed)


def hover_state(params: VehicleParams, position, extra_load: float = 0.0) -> VehicleState:
    """Level state with motors trimmed for weight plus ``extra_load`` newtons."""
    need = params.mass * GRAVITY + extra_load
    omega = motor_speed_for_thrust(need, params)
    thrust = params.n_motors * thrust_from_motor_speed(omega, params)
    return VehicleState(
        position=np.asarray(position, dtype=np.float64).copy(),
        velocity=np.zeros(3),
        attitude=np.zeros(3),
        motor_speed=omega,
        thrust=thrust,
        accel_true=np.zeros(3),
    )


def step_vehicle(
    state: VehicleState,
    params: VehicleParams,
    commanded: tuple[float, float, float],
    external_force,
    dt: float,
) -> VehicleState:
    """Advance one plant step under (roll_d, pitch_d, total_thrust_d).

    The commanded thrust is mapped to a motor speed through the nominal
    map; the realized thrust uses the true coefficient. Attitude and motor
    speed follow exact first-order-lag updates; translation is symplectic
    Euler so m dv = F dt holds exactly per step.

    Raises:
        NonFiniteState: any state component left the finite range.
    """
    if not 0.0 < dt <= 0.01:
        raise ValueError("plant step must be in (0, 0.01] s")
    f_ext = np.asarray(external_force, dtype=np.float64)
    roll_d, pitch_d, thrust_d = commanded

    alpha_att = 1.0 - math.exp(-dt / params.attitude_time_constant)
    lim = params.attitude_limit
    roll = state.attitude[0] + alpha_att * (min(lim, max(-lim, roll_d)) - state.attitude[0])
    pitch = state.attitude[1] + alpha_att * (min(lim, max(-lim, pitch_d)) - state.attitude[1])
    attitude = np.array([roll, pitch, state.attitude[2]])

    alpha_mot = 1.0 - math.exp(-dt / params.motor_time_constant)
    omega_d = motor_speed_for_thrust(thrust_d, params)
    omega = state.motor_speed + alpha_mot * (omega_d - state.motor_speed)
    thrust = params.n_motors * thrust_from_motor_speed(omega, params)

    thrust_nav = rotation_matrix(attitude) @ np.array([0.0, 0.0, thrust])
    accel = (thrust_nav + np.array([0.0, 0.0, -params.mass * GRAVITY]) + f_ext) / params.mass
    velocity = state.velocity + accel * dt
    position = state.position + velocity * dt

    if not (np.all(np.isfinite(position)) and np.all(np.isfinite(velocity))):
        raise NonFiniteState("vehicle state became non-finite")
    return VehicleState(
        position=position,
        velocity=velocity,
        attitude=attitude,
        motor_speed=omega,
        thrust=thrust,
        accel_true=accel,
    )


def sample_imu(
    state: VehicleState,
    params: VehicleParams,
    external_force,
    rng: np.random.Generator | None = None,
    t: float = 0.0,
) -> ImuSample:
    """Accelerometer specific force (and a stub gyro) for the current state.

    The specific force is the total non-gravitational force per unit mass
    rotated into the body frame, so rope tension shows up in the reading.
    With rng set, additive Gaussian noise plus a deterministic vibration
    sinusoid on the body z axis model the real sensor environment. The
    round trip R f_b + (0, 0, -g) recovers the true navigation-frame
    acceleration exactly when noise is off.
    """
    f_ext = np.asarray(external_force, dtype=np.float64)
    r = rotation_matrix(state.attitude)
    accel_nav = (
        r @ np.array([0.0, 0.0, state.thrust])
        + np.array([0.0, 0.0, -params.mass * GRAVITY])
        + f_ext
    ) / params.mass
    f_body = r.T @ (accel_nav + np.array([0.0, 0.0, GRAVITY]))
    gyro = np.zeros(3)
    if rng is not None:
        f_body = f_body + rng.normal(0.0, params.accel_noise_std, 3)
        f_body[2] += params.vibration_amplitude * math.sin(
            2.0 * math.pi * params.vibration_freq * t
        )
        gyro = gyro + rng.normal(0.0, 0.01, 3)
    return ImuSample(specific_force=f_body, gyro=gyro)
