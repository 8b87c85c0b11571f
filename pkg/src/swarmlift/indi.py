"""Incremental acceleration controller and the vertical PD loop.

The controller inverts the local control effectiveness matrix G (partial
derivatives of the navigation-frame thrust vector with respect to roll,
pitch, and thrust) on the gap between the desired and the filtered
measured acceleration:

    delta_u = m G^-1(eta_f, T_f) (nu_a - a_f)

Measured acceleration and past input pass through identical second-order
Butterworth low-pass filters so both see the same delay. Because constant
unmodeled forces (rope tension) appear in the measurement, increments keep
being applied until the gap closes, like an integral action, so steady
state offsets do not occur.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import signal

from .errors import SingularG
from .vehicle import (
    GRAVITY,
    ImuSample,
    VehicleParams,
    rotation_matrix,
    thrust_from_motor_speed,
)

DET_TOL = 1e-9


class LowPassFilter:
    """Stateful second-order Butterworth low-pass over a fixed-size vector.

    Direct form II transposed; one update per sample at the controller
    rate. warm_start seeds the delay line at the DC steady state so the
    loop does not see a spurious startup transient.
    """

    def __init__(self, cutoff_hz: float = 8.0, sample_hz: float = 512.0, size: int = 3):
        b, a = signal.butter(2, cutoff_hz, btype="low", fs=sample_hz)
        self.b = b
        self.a = a
        self.z1 = np.zeros(size)
        self.z2 = np.zeros(size)

    def warm_start(self, value) -> None:
        x = np.asarray(value, dtype=np.float64)
        self.z1 = (1.0 - self.b[0]) * x
        self.z2 = (self.b[2] - self.a[2]) * x

    def update(self, sample) -> NDArray[np.float64]:
        x = np.asarray(sample, dtype=np.float64)
        y = self.b[0] * x + self.z1
        self.z1 = self.b[1] * x - self.a[1] * y + self.z2
        self.z2 = self.b[2] * x - self.a[2] * y
        return y


@dataclass(frozen=True)
class AltitudeGains:
    """Vertical PD gains; defaults give a critically damped closed loop."""

    k_p: float = 4.0
    k_v: float = 4.0

    def __post_init__(self):
        if self.k_p <= 0 or self.k_v <= 0:
            raise ValueError("altitude gains must be positive")
        if self.k_v**2 < 4.0 * self.k_p:
            raise ValueError("vertical loop would be underdamped (need k_v^2 >= 4 k_p)")


def altitude_acceleration(p_z: float, p_z_desired: float, v_z: float, gains: AltitudeGains) -> float:
    """Vertical acceleration command in the up-positive frame.

    nu_az = k_p (p_z_desired - p_z) - k_v v_z. Negative position feedback
    with up-positive z; equivalent to the NED-style form with both signs
    flipped.
    """
    return gains.k_p * (p_z_desired - p_z) - gains.k_v * v_z


def g_matrix(attitude, thrust: float) -> NDArray[np.float64]:
    """Partial derivatives of R(eta) (0, 0, T) with respect to (roll, pitch, T).

    Rows are navigation axes; columns are the roll, pitch, and thrust
    sensitivities. At hover this is [[0, T, 0], [-T, 0, 0], [0, 0, 1]]
    with determinant T^2.

    Raises:
        SingularG: |det| below DET_TOL (extreme attitude or vanished thrust).
    """
    roll, pitch, yaw = attitude
    t = thrust
    cf, sf = math.cos(roll), math.sin(roll)
    ct, st = math.cos(pitch), math.sin(pitch)
    cp, sp = math.cos(yaw), math.sin(yaw)
    g = np.array(
        [
            [t * (cf * sp - sf * cp * st), t * cf * cp * ct, sf * sp + cf * cp * st],
            [-t * (sf * sp * st + cf * cp), t * cf * sp * ct, cf * sp * st - sf * cp],
            [-t * ct * sf, -t * st * cf, cf * ct],
        ]
    )
    if abs(np.linalg.det(g)) < DET_TOL:
        raise SingularG(f"det(G) = {np.linalg.det(g):.2e} at attitude {attitude}")
    return g


def indi_increment(nu_a, a_f, u0_f, mass: float, yaw: float = 0.0) -> NDArray[np.float64]:
    """Raw increment delta_u = m G^-1(eta_f, T_f) (nu_a - a_f).

    u0_f stacks the filtered past input (roll, pitch, thrust); clamping of
    the resulting command is the caller's job.
    """
    u0_f = np.asarray(u0_f, dtype=np.float64)
    g = g_matrix((u0_f[0], u0_f[1], yaw), u0_f[2])
    gap = np.asarray(nu_a, dtype=np.float64) - np.asarray(a_f, dtype=np.float64)
    return mass * np.linalg.solve(g, gap)


class IndiController:
    """Per-vehicle acceleration tracker; owns the two synchronized filters.

    The past input u0 defaults to the measured attitude plus the thrust
    implied by the measured motor speed through the nominal map. Pass
    use_commanded_input=True to filter the previous command instead.
    """

    def __init__(
        self,
        params: VehicleParams,
        cutoff_hz: float = 8.0,
        sample_hz: float = 512.0,
        use_commanded_input: bool = False,
    ):
        self.params = params
        self.filter_a = LowPassFilter(cutoff_hz, sample_hz, 3)
        self.filter_u = LowPassFilter(cutoff_hz, sample_hz, 3)
        self.use_commanded_input = use_commanded_input
        self.last_command = np.array([0.0, 0.0, params.mass * GRAVITY])
        self.singular_hold = False
        self.last_a_f = np.zeros(3)
        self.last_delta = np.zeros(3)
        self._warm = False

    def step(self, imu: ImuSample, attitude, motor_speed: float, nu_a) -> NDArray[np.float64]:
        """One controller tick: returns commanded (roll, pitch, total thrust)."""
        att = np.asarray(attitude, dtype=np.float64)
        a0 = rotation_matrix(att) @ np.asarray(imu.specific_force) + np.array(
            [0.0, 0.0, -GRAVITY]
        )
        if self.use_commanded_input:
            u0 = self.last_command.copy()
        else:
            t0 = self.params.n_motors * thrust_from_motor_speed(
                motor_speed, self.params, nominal=True
            )
            u0 = np.array([att[0], att[1], t0])
        if not self._warm:
            self.filter_a.warm_start(a0)
            self.filter_u.warm_start(u0)
            self._warm = True
        a_f = self.filter_a.update(a0)
        u0_f = self.filter_u.update(u0)
        self.last_a_f = a_f
        try:
            delta = indi_increment(nu_a, a_f, u0_f, self.params.mass, yaw=att[2])
        except SingularG:
            # Hold the previous command for this step rather than abort.
            self.singular_hold = True
            self.last_delta = np.zeros(3)
            return self.last_command
        self.singular_hold = False
        self.last_delta = delta
        lim = self.params.attitude_limit
        cmd = u0_f + delta
        cmd[0] = min(lim, max(-lim, cmd[0]))
        cmd[1] = min(lim, max(-lim, cmd[1]))
        cmd[2] = min(self.params.max_thrust_total, max(0.0, cmd[2]))
        self.last_command = cmd
        return cmd
