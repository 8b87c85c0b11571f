"""Formation-motion guidance from distance disagreements.

The per-vehicle acceleration command is the three-term law

    u = -c1 v - c2 Bbar D_z D_ztilde e + Abar D_ztilde z

where Xbar = X kron I2 and D_ztilde is the diagonal of reciprocal edge
norms. The first two terms stabilize the shape; the third injects a
steady-state motion through the disagreement matrix A = c1 A_v + A_a.
A_v encodes a designed velocity field as coefficients on the unit edge
vectors; A_a is the centripetal feedforward of the rotational part.

Coefficients on unit edge vectors are frame covariant: once solved against
the desired shape, the realized velocity field rotates with the actual
formation, so operator sticks steer in the formation body frame for free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import CoincidentAgents, DimensionMismatch, InfeasibleVelocity
from .formation import (
    EPS_COINCIDENT,
    FormationSpec,
    RelativeState,
    relative_positions,
)

# Operator-command clamps and the per-axis acceleration cap from the force
# budget analysis (2.18 m/s^2 total, times sin(0.79) per axis).
MAX_TRANSLATION_SPEED = 1.0
MAX_SPIN_RATE = 0.2
MAX_SCALE_RATE = 0.2
ACCEL_AXIS_LIMIT = 1.54

# Residual above this means the incident edges cannot span the request.
LSTSQ_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class DisagreementSet:
    """Disagreement coefficient matrices, all n x |E|.

    a_v encodes the full designed velocity field, a_vr only its rotational
    part, a_a the acceleration feedforward derived from a_vr, and a the
    combined control matrix c1 a_v + a_a. a_v and a_vr carry coefficients
    only on edges incident to each vehicle; a_a is a product of two such
    matrices, so its rows can reach edges one hop further out.
    """

    a_v: NDArray[np.float64]
    a_vr: NDArray[np.float64]
    a_a: NDArray[np.float64]
    a: NDArray[np.float64]

    @classmethod
    def build(cls, spec: FormationSpec, a_v, a_vr) -> "DisagreementSet":
        a_v = np.asarray(a_v, dtype=np.float64)
        a_vr = np.asarray(a_vr, dtype=np.float64)
        shape = (spec.graph.n, spec.graph.n_edges)
        if a_v.shape != shape or a_vr.shape != shape:
            raise DimensionMismatch(f"disagreement matrices must be {shape}")
        a_a = feedforward_matrix(a_vr, spec)
        return cls(a_v=a_v, a_vr=a_vr, a_a=a_a, a=spec.gain_damping * a_v + a_a)

    @classmethod
    def zero(cls, spec: FormationSpec) -> "DisagreementSet":
        z = np.zeros((spec.graph.n, spec.graph.n_edges))
        return cls(a_v=z, a_vr=z.copy(), a_a=z.copy(), a=z.copy())


@dataclass(frozen=True)
class MotionCommand:
    """Operator-level motion request for the formation as one rigid body.

    v_translation is in the formation body frame, omega_spin positive is
    counterclockwise, scale_rate grows the reference side length, and
    altitude_setpoint is absolute. Values are clamped at ingestion.
    """

    v_translation: tuple[float, float] = (0.0, 0.0)
    omega_spin: float = 0.0
    scale_rate: float = 0.0
    altitude_setpoint: float = 2.0

    def clamped(self) -> "MotionCommand":
        vx, vy = float(self.v_translation[0]), float(self.v_translation[1])
        speed = math.hypot(vx, vy)
        if speed > MAX_TRANSLATION_SPEED:
            vx *= MAX_TRANSLATION_SPEED / speed
            vy *= MAX_TRANSLATION_SPEED / speed
        return MotionCommand(
            v_translation=(vx, vy),
            omega_spin=min(MAX_SPIN_RATE, max(-MAX_SPIN_RATE, float(self.omega_spin))),
            scale_rate=min(MAX_SCALE_RATE, max(-MAX_SCALE_RATE, float(self.scale_rate))),
            altitude_setpoint=float(self.altitude_setpoint),
        )


@dataclass(frozen=True)
class GuidanceCommand:
    """Saturated per-vehicle 2D acceleration commands for one guidance tick."""

    accel_xy: NDArray[np.float64]
    produced_at: int = 0
    saturated: NDArray[np.bool_] | None = None


def guidance_accelerations(
    spec: FormationSpec,
    rel: RelativeState,
    velocities,
    dis: DisagreementSet,
    axis_limit: float = ACCEL_AXIS_LIMIT,
    produced_at: int = 0,
) -> GuidanceCommand:
    """Evaluate the control law per vehicle from edge-local data.

    Damping and shape terms read only the vehicle's own velocity and the
    relative vectors of its incident edges. The motion term follows the
    support of the vehicle's row of the combined disagreement matrix:
    incident edges for translation, one hop further when spinning, because
    the centripetal feedforward is a product of two incidence-sparse
    matrices. Output components are clamped to +-axis_limit afterwards.
    """
    v = np.asarray(velocities, dtype=np.float64)
    n, m = spec.graph.n, spec.graph.n_edges
    if v.shape != (n, 2):
        raise DimensionMismatch(f"expected ({n}, 2) velocities, got {v.shape}")
    if dis.a.shape != (n, m):
        raise DimensionMismatch("disagreement set does not match the graph")
    c1, c2 = spec.gain_damping, spec.gain_shape
    b = spec.graph.incidence
    unit = rel.unit
    u = np.zeros((n, 2))
    for i in range(n):
        acc = -c1 * v[i]
        for k in spec.graph.incident_edges(i):
            acc = acc - c2 * b[i, k] * rel.errors[k] * unit[k]
        for k in np.nonzero(dis.a[i])[0]:
            acc = acc + dis.a[i, k] * unit[k]
        u[i] = acc
    clipped = np.clip(u, -axis_limit, axis_limit)
    return GuidanceCommand(
        accel_xy=clipped, produced_at=produced_at, saturated=np.abs(u) > axis_limit
    )


def guidance_law_compact(spec: FormationSpec, dis: DisagreementSet, positions, velocities):
    """Vectorized form of the law for batched ideal-model integration.

    positions/velocities may carry leading batch axes: (..., n, 2). Returns
    unsaturated accelerations of the same shape. Matches the per-vehicle
    path of guidance_accelerations to machine precision.
    """
    p = np.asarray(positions, dtype=np.float64)
    v = np.asarray(velocities, dtype=np.float64)
    b = spec.graph.incidence
    z = np.einsum("ik,...id->...kd", b, p)
    norms = np.linalg.norm(z, axis=-1)
    if np.any(norms <= EPS_COINCIDENT):
        raise CoincidentAgents("coincident vehicles in batched evaluation")
    unit = z / norms[..., None]
    e = norms - spec.desired_distances
    shape_term = np.einsum("ik,...kd->...id", b, e[..., None] * unit)
    motion_term = np.einsum("ik,...kd->...id", dis.a, unit)
    return -spec.gain_damping * v - spec.gain_shape * shape_term + motion_term


def velocity_error(dis: DisagreementSet, velocities, rel: RelativeState):
    """e_v = v - Abar_v D_ztilde z, the gap to the designed velocity field."""
    v = np.asarray(velocities, dtype=np.float64)
    if dis.a_v.shape[1] != rel.z.shape[0] or v.shape != (dis.a_v.shape[0], 2):
        raise DimensionMismatch("velocity_error arguments do not agree")
    return v - dis.a_v @ rel.unit


def solve_disagreements(
    spec: FormationSpec, desired_velocities, z_star, tol: float = LSTSQ_RESIDUAL_TOL
):
    """Express desired per-vehicle velocities as coefficients on unit edge vectors.

    Solves, for each vehicle independently, the least-squares system whose
    columns are the unit vectors of its incident edges at the desired shape
    z_star. The returned matrix A_v satisfies Abar_v D_d z* = stacked
    desired velocities within ``tol``.

    Raises:
        InfeasibleVelocity: a vehicle's incident edges do not span its
            requested velocity (round-trip residual above ``tol``).
    """
    v_des = np.asarray(desired_velocities, dtype=np.float64)
    z = np.asarray(z_star, dtype=np.float64)
    n, m = spec.graph.n, spec.graph.n_edges
    if v_des.shape != (n, 2) or z.shape != (m, 2):
        raise DimensionMismatch("desired velocities or z_star have wrong shape")
    unit = z / np.linalg.norm(z, axis=1)[:, None]
    a_v = np.zeros((n, m))
    for i in range(n):
        cols = spec.graph.incident_edges(i)
        basis = unit[cols].T  # 2 x len(cols)
        coef, *_ = np.linalg.lstsq(basis, v_des[i], rcond=None)
        residual = float(np.linalg.norm(basis @ coef - v_des[i]))
        if residual > tol:
            raise InfeasibleVelocity(
                f"vehicle {i}: residual {residual:.2e} m/s exceeds {tol:.0e}"
            )
        a_v[i, cols] = coef
    return a_v


def feedforward_matrix(a_vr, spec: FormationSpec):
    """Centripetal feedforward A_a = A_vr D_d B^T A_vr.

    D_d is the diagonal of reciprocal desired distances, i.e. D_ztilde
    evaluated at the desired shape. Zero rotational part gives zero
    feedforward.
    """
    a_vr = np.asarray(a_vr, dtype=np.float64)
    shape = (spec.graph.n, spec.graph.n_edges)
    if a_vr.shape != shape:
        raise DimensionMismatch(f"a_vr must be {shape}")
    d_inv = np.diag(1.0 / spec.desired_distances)
    return a_vr @ d_inv @ spec.graph.incidence.T @ a_vr


def translation_field(spec: FormationSpec, direction) -> NDArray[np.float64]:
    """Equal desired velocities for every vehicle (rigid translation)."""
    direction = np.asarray(direction, dtype=np.float64)
    return np.tile(direction, (spec.graph.n, 1))


def rotation_field(positions, omega: float) -> NDArray[np.float64]:
    """Tangential velocities about the centroid, positive counterclockwise."""
    p = np.asarray(positions, dtype=np.float64)
    r = p - p.mean(axis=0)
    return omega * np.column_stack([-r[:, 1], r[:, 0]])


def compose_motion(
    cmd: MotionCommand,
    spec: FormationSpec,
    desired_positions,
    dt: float,
) -> tuple[DisagreementSet, NDArray[np.float64]]:
    """Turn an operator command into disagreement matrices plus scaled distances.

    Translation and rotation are superposed as velocity fields solved at
    the desired shape; scaling multiplies the whole distance vector so the
    shape ratios are preserved (grown by scale_rate meters per second on
    the reference side, taken as edge 0).

    Args:
        cmd: clamped operator command.
        spec: formation at the current desired distances.
        desired_positions: (n, 2) canonical placement realizing those
            distances (used to build the velocity fields).
        dt: guidance tick length, seconds, for the scale integration.
    """
    cmd = cmd.clamped()
    p_star = np.asarray(desired_positions, dtype=np.float64)
    z_star = relative_positions(spec, p_star).z

    v_trans = translation_field(spec, cmd.v_translation)
    v_rot = rotation_field(p_star, cmd.omega_spin)
    a_vt = solve_disagreements(spec, v_trans, z_star)
    a_vr = solve_disagreements(spec, v_rot, z_star)
    dis = DisagreementSet.build(spec, a_vt + a_vr, a_vr)

    side = float(spec.desired_distances[0])
    factor = (side + cmd.scale_rate * dt) / side
    new_d = spec.desired_distances * factor
    return dis, new_d


@dataclass(frozen=True)
class IdealTrace:
    """Recorded ideal double-integrator run. Arrays share the leading time axis."""

    t: NDArray[np.float64]
    positions: NDArray[np.float64]
    velocities: NDArray[np.float64]
    errors: NDArray[np.float64]
    potential: NDArray[np.float64]


def simulate_ideal(
    spec: FormationSpec,
    positions0,
    velocities0,
    duration: float,
    dt: float = 0.01,
    dis: DisagreementSet | None = None,
    saturate: bool = False,
    axis_limit: float = ACCEL_AXIS_LIMIT,
) -> IdealTrace:
    """Integrate pdot = v, vdot = u under the guidance law (no vehicle model).

    Classical RK4 keeps the per-step energy drift far below the 1e-9
    monotonicity slack used by the tests. positions0/velocities0 may carry
    a leading batch axis to integrate many initial conditions at once.
    """
    if dis is None:
        dis = DisagreementSet.zero(spec)
    p = np.array(positions0, dtype=np.float64)
    v = np.array(velocities0, dtype=np.float64)

    def deriv(p, v):
        u = guidance_law_compact(spec, dis, p, v)
        if saturate:
            u = np.clip(u, -axis_limit, axis_limit)
        return v, u

    steps = int(round(duration / dt))
    t = np.arange(steps + 1) * dt
    b = spec.graph.incidence
    pos = np.empty((steps + 1,) + p.shape)
    vel = np.empty_like(pos)
    pos[0], vel[0] = p, v
    for s in range(steps):
        k1p, k1v = deriv(p, v)
        k2p, k2v = deriv(p + 0.5 * dt * k1p, v + 0.5 * dt * k1v)
        k3p, k3v = deriv(p + 0.5 * dt * k2p, v + 0.5 * dt * k2v)
        k4p, k4v = deriv(p + dt * k3p, v + dt * k3v)
        p = p + (dt / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        v = v + (dt / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        pos[s + 1], vel[s + 1] = p, v

    z = np.einsum("ik,...id->...kd", b, pos)
    norms = np.linalg.norm(z, axis=-1)
    errors = norms - spec.desired_distances
    potential = 0.5 * np.sum(vel * vel, axis=(-2, -1)) + 0.5 * spec.gain_shape * np.sum(
        errors**2, axis=-1
    )
    return IdealTrace(t=t, positions=pos, velocities=vel, errors=errors, potential=potential)


def decay_time_constant(t, error_norms) -> float:
    """First crossing of |e| below |e(0)|/e, linearly interpolated.

    The shape dynamics are underdamped at the default gains, so the first
    1/e crossing is the honest analogue of a fitted exponential constant.
    Returns NaN when the signal never crosses.
    """
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(error_norms, dtype=np.float64)
    target = x[0] / math.e
    below = np.nonzero(x < target)[0]
    if len(below) == 0 or below[0] == 0:
        return float("nan")
    j = int(below[0])
    frac = (x[j - 1] - target) / (x[j - 1] - x[j])
    return float(t[j - 1] + frac * (t[j] - t[j - 1]))
