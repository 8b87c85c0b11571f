"""Single-vehicle plant: lags, thrust map, integration, and the IMU model."""

import math

import numpy as np
import pytest

from swarmlift import (
    GRAVITY,
    NonFiniteState,
    VehicleParams,
    VehicleState,
    hover_state,
    motor_speed_for_thrust,
    rotation_matrix,
    sample_imu,
    step_vehicle,
    thrust_from_motor_speed,
)

DT = 1.0 / 1024.0
NO_FORCE = np.zeros(3)


def test_thrust_quadratic_calibration():
    params = VehicleParams()
    assert thrust_from_motor_speed(160.0, params) == pytest.approx(1.6, rel=1e-12)
    assert thrust_from_motor_speed(80.0, params) == pytest.approx(0.4, rel=1e-12)
    with pytest.raises(ValueError):
        thrust_from_motor_speed(-1.0, params)


def test_motor_speed_inverts_thrust_map():
    params = VehicleParams()
    omega = motor_speed_for_thrust(3.0, params)
    assert params.n_motors * thrust_from_motor_speed(omega, params) == pytest.approx(3.0)
    # Negative request floors at zero, absurd request clamps at the motor limit.
    assert motor_speed_for_thrust(-2.0, params) == 0.0
    assert motor_speed_for_thrust(100.0, params) == params.max_motor_speed


def test_hover_state_balances_weight():
    params = VehicleParams()
    state = hover_state(params, [1.0, 2.0, 3.0], extra_load=0.981)
    assert state.thrust == pytest.approx(params.mass * GRAVITY + 0.981, rel=1e-12)
    stepped = step_vehicle(state, params, (0.0, 0.0, state.thrust), [0, 0, -0.981], DT)
    np.testing.assert_allclose(stepped.velocity, 0.0, atol=1e-15)
    np.testing.assert_allclose(stepped.position, state.position, atol=1e-15)


def test_attitude_first_order_lag_is_exact():
    params = VehicleParams()
    state = hover_state(params, np.zeros(3))
    target = 0.3
    stepped = step_vehicle(state, params, (target, 0.0, state.thrust), NO_FORCE, DT)
    expected = target * (1.0 - math.exp(-DT / params.attitude_time_constant))
    assert stepped.attitude[0] == pytest.approx(expected, rel=1e-12)
    # A long run settles on the commanded value, never beyond the clamp.
    for _ in range(2000):
        state = step_vehicle(state, params, (0.5, 0.0, state.thrust), NO_FORCE, DT)
    assert state.attitude[0] == pytest.approx(params.attitude_limit, rel=1e-6)


def test_motor_first_order_lag_is_exact():
    params = VehicleParams()
    state = VehicleState(motor_speed=100.0)
    thrust_d = 4.0
    omega_d = motor_speed_for_thrust(thrust_d, params)
    stepped = step_vehicle(state, params, (0.0, 0.0, thrust_d), NO_FORCE, DT)
    alpha = 1.0 - math.exp(-DT / params.motor_time_constant)
    assert stepped.motor_speed == pytest.approx(100.0 + alpha * (omega_d - 100.0), rel=1e-12)


def test_symplectic_momentum_update():
    # m dv = F dt must hold exactly for the step's accel.
    params = VehicleParams()
    state = hover_state(params, np.zeros(3))
    f_ext = np.array([0.3, -0.1, 0.05])
    stepped = step_vehicle(state, params, (0.0, 0.0, state.thrust), f_ext, DT)
    np.testing.assert_array_equal(stepped.velocity - state.velocity, stepped.accel_true * DT)
    np.testing.assert_array_equal(stepped.position, stepped.velocity * DT)


def test_dt_validation():
    params = VehicleParams()
    state = hover_state(params, np.zeros(3))
    for bad in (0.0, -0.001, 0.02):
        with pytest.raises(ValueError):
            step_vehicle(state, params, (0.0, 0.0, state.thrust), NO_FORCE, bad)


def test_non_finite_state_raises():
    params = VehicleParams()
    state = hover_state(params, np.zeros(3))
    with pytest.raises(NonFiniteState):
        step_vehicle(state, params, (0.0, 0.0, state.thrust), [math.inf, 0.0, 0.0], DT)


def test_params_validation():
    with pytest.raises(ValueError):
        VehicleParams(mass=0.0)
    with pytest.raises(ValueError):
        VehicleParams(attitude_limit=0.4)


def test_rotation_matrix_is_orthonormal():
    r = rotation_matrix([0.2, -0.3, 0.9])
    np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(r) == pytest.approx(1.0, rel=1e-12)
    # Level attitude maps body z to navigation z.
    np.testing.assert_allclose(rotation_matrix([0, 0, 0]) @ [0, 0, 1], [0, 0, 1], atol=0)


def test_imu_specific_force_at_hover():
    params = VehicleParams()
    state = hover_state(params, np.zeros(3))
    imu = sample_imu(state, params, NO_FORCE)
    np.testing.assert_allclose(imu.specific_force, [0.0, 0.0, GRAVITY], atol=1e-12)
    np.testing.assert_array_equal(imu.gyro, 0.0)


def test_imu_round_trip_recovers_acceleration():
    params = VehicleParams()
    state = hover_state(params, np.zeros(3))
    state.attitude = np.array([0.1, -0.2, 0.0])
    f_ext = np.array([0.4, 0.2, -0.6])
    imu = sample_imu(state, params, f_ext)
    accel_nav = rotation_matrix(state.attitude) @ imu.specific_force + [0, 0, -GRAVITY]
    expected = (
        rotation_matrix(state.attitude) @ [0, 0, state.thrust]
        + [0, 0, -params.mass * GRAVITY]
        + f_ext
    ) / params.mass
    np.testing.assert_allclose(accel_nav, expected, atol=1e-12)


def test_imu_rope_tension_shows_up():
    # The accelerometer sees external force; that is what lets the
    # controller cancel rope pull without a load model.
    params = VehicleParams()
    state = hover_state(params, np.zeros(3))
    pull = np.array([1.3, 0.0, 0.0])
    imu = sample_imu(state, params, pull)
    assert imu.specific_force[0] == pytest.approx(1.3 / params.mass, rel=1e-12)


def test_imu_noise_statistics():
    params = VehicleParams(vibration_amplitude=0.0)
    state = hover_state(params, np.zeros(3))
    rng = np.random.default_rng(42)
    samples = np.array(
        [sample_imu(state, params, NO_FORCE, rng).specific_force for _ in range(4000)]
    )
    std = samples.std(axis=0)
    np.testing.assert_allclose(std, params.accel_noise_std, rtol=0.08)


def test_imu_vibration_line():
    # Zero Gaussian noise isolates the 50 Hz body-z vibration sinusoid.
    params = VehicleParams(accel_noise_std=0.0)
    state = hover_state(params, np.zeros(3))
    rng = np.random.default_rng(0)
    t = 0.005  # quarter period of 50 Hz
    imu = sample_imu(state, params, NO_FORCE, rng, t=t)
    assert imu.specific_force[2] == pytest.approx(
        GRAVITY + params.vibration_amplitude, rel=1e-12
    )
