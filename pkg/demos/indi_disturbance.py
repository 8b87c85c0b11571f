"""Incremental acceleration control shrugging off an unmodeled rope pull."""

import numpy as np

from swarmlift import (
    AltitudeGains,
    IndiController,
    VehicleParams,
    altitude_acceleration,
    hover_state,
    sample_imu,
    step_vehicle,
)


def run(params, label, pull_n=1.3, seconds=5.0):
    pull = np.array([pull_n, 0.0, 0.0])
    state = hover_state(params, np.zeros(3))
    ctl = IndiController(params, sample_hz=512.0)
    gains = AltitudeGains()
    dt = 1.0 / 1024.0
    cmd = (0.0, 0.0, state.thrust)

    print(f"\n{label}: constant {pull_n} N pull switched on at t=0")
    print("t [s]   |nu - a| [m/s^2]   pitch [rad]")
    next_mark = 0.0
    for i in range(int(seconds * 1024)):
        t = i * dt
        if i % 2 == 0:
            imu = sample_imu(state, params, pull, None, t)
            nu = np.array([0.0, 0.0,
                           altitude_acceleration(state.position[2], 0.0,
                                                 state.velocity[2], gains)])
            out = ctl.step(imu, state.attitude, state.motor_speed, nu)
            cmd = (float(out[0]), float(out[1]), float(out[2]))
            if t >= next_mark:
                gap = float(np.linalg.norm(nu - state.accel_true))
                print(f"{t:5.2f}   {gap:16.4f}   {state.attitude[1]:+.4f}")
                next_mark += 0.5
        state = step_vehicle(state, params, cmd, pull, dt)
    print(f"lean angle holds the pull; altitude {state.position[2]:+.4f} m")


def main():
    base = VehicleParams()
    run(base, "nominal thrust map")
    # plant 20% stronger than what the controller was told
    run(VehicleParams(thrust_coeff=1.2 * base.thrust_coeff,
                      thrust_coeff_nominal=base.thrust_coeff),
        "plant thrust 20% above nominal")


if __name__ == "__main__":
    main()
