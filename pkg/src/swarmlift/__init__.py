"""Deterministic multi-rotorcraft formation simulator and control library.

Distance-based formation guidance steered through distance disagreements,
an incremental-inversion acceleration controller, a taut-rope suspended
payload, a worst-case force/gain analyzer, and a multi-rate closed-loop
simulation engine with CLI and websocket front ends.
"""

from .errors import (
    CoincidentAgents,
    DimensionMismatch,
    EmptyTrace,
    InfeasibleVelocity,
    NoMargin,
    NonFiniteState,
    NotRunning,
    Overloaded,
    RopeInfeasible,
    SingularG,
    SwarmliftError,
)
from .formation import (
    FormationGraph,
    FormationSpec,
    RelativeState,
    potential_energy,
    relative_positions,
    square_formation_spec,
    square_positions,
)
from .guidance import (
    ACCEL_AXIS_LIMIT,
    MAX_SCALE_RATE,
    MAX_SPIN_RATE,
    MAX_TRANSLATION_SPEED,
    DisagreementSet,
    GuidanceCommand,
    MotionCommand,
    compose_motion,
    decay_time_constant,
    feedforward_matrix,
    guidance_accelerations,
    guidance_law_compact,
    rotation_field,
    simulate_ideal,
    solve_disagreements,
    translation_field,
    velocity_error,
)
from .indi import (
    AltitudeGains,
    IndiController,
    LowPassFilter,
    altitude_acceleration,
    g_matrix,
    indi_increment,
)
from .payload import (
    PayloadParams,
    PayloadState,
    equilibrium_tension,
    hang_depth,
    payload_net_force,
    rope_forces,
    step_payload,
)
from .vehicle import (
    GRAVITY,
    ImuSample,
    VehicleParams,
    VehicleState,
    hover_state,
    motor_speed_for_thrust,
    rotation_matrix,
    sample_imu,
    step_vehicle,
    thrust_from_motor_speed,
)
from .worstcase import (
    WorstCaseBudget,
    WorstCaseInputs,
    gain_inequality,
    horizontal_budget,
    horizontal_tension_bound,
    max_acceleration,
    max_tilt,
)
from .scenario import (
    CommandEvent,
    command_at,
    IndiConfig,
    RateConfig,
    Scenario,
    bundled_scenario_names,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .engine import (
    InteractiveSim,
    SimWorld,
    check_assertions,
    first_crossing_time,
    measure_accel_loop_tau,
    measure_time_constants,
    run_scenario,
    tilt_angle,
    trace_metrics,
)
from .trace import Trace, read_csv, trace_columns, write_csv, write_jsonl

__version__ = "0.1.0"

__all__ = [
    "ACCEL_AXIS_LIMIT",
    "AltitudeGains",
    "CoincidentAgents",
    "CommandEvent",
    "DimensionMismatch",
    "DisagreementSet",
    "EmptyTrace",
    "FormationGraph",
    "FormationSpec",
    "GRAVITY",
    "GuidanceCommand",
    "ImuSample",
    "IndiConfig",
    "IndiController",
    "InfeasibleVelocity",
    "InteractiveSim",
    "LowPassFilter",
    "MAX_SCALE_RATE",
    "MAX_SPIN_RATE",
    "MAX_TRANSLATION_SPEED",
    "MotionCommand",
    "NoMargin",
    "NonFiniteState",
    "NotRunning",
    "Overloaded",
    "PayloadParams",
    "PayloadState",
    "RateConfig",
    "RelativeState",
    "RopeInfeasible",
    "Scenario",
    "SimWorld",
    "SingularG",
    "SwarmliftError",
    "Trace",
    "VehicleParams",
    "VehicleState",
    "WorstCaseBudget",
    "WorstCaseInputs",
    "altitude_acceleration",
    "bundled_scenario_names",
    "check_assertions",
    "command_at",
    "compose_motion",
    "decay_time_constant",
    "equilibrium_tension",
    "feedforward_matrix",
    "first_crossing_time",
    "g_matrix",
    "gain_inequality",
    "guidance_accelerations",
    "guidance_law_compact",
    "hang_depth",
    "horizontal_budget",
    "horizontal_tension_bound",
    "hover_state",
    "indi_increment",
    "load_scenario",
    "max_acceleration",
    "max_tilt",
    "measure_accel_loop_tau",
    "measure_time_constants",
    "motor_speed_for_thrust",
    "payload_net_force",
    "potential_energy",
    "read_csv",
    "relative_positions",
    "rope_forces",
    "rotation_field",
    "rotation_matrix",
    "run_scenario",
    "sample_imu",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "simulate_ideal",
    "solve_disagreements",
    "square_formation_spec",
    "square_positions",
    "step_payload",
    "step_vehicle",
    "thrust_from_motor_speed",
    "tilt_angle",
    "trace_columns",
    "trace_metrics",
    "translation_field",
    "velocity_error",
    "write_csv",
    "write_jsonl",
]
