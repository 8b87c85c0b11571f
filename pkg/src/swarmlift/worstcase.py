"""Worst-case force and gain budget for the loaded formation.

The chain runs: maximum safe tilt from the vertical-load share, horizontal
force budget from the roll/pitch clamp, horizontal rope-tension bound at a
conservative stretched pose, maximum commandable acceleration, per-axis
acceleration limit, and finally the inequality constraining the guidance
gains (c1, c2) and the spin disagreement mu_r.

Two bounds are published both ways. The exact trigonometric horizontal
budget (F_max sin(0.35) = 2.195 N) slightly exceeds the rounded 2.18 N
planning constant; the acceleration chain consumes the planning constant
by default (reference_horizontal_budget) and reports the exact value
alongside. Likewise the stretched-pose tension formula evaluates above
the flat per-vehicle share share * M * g that the published acceleration
budget subtracts; the chain consumes the flat share and reports the pose
formula as tension_at_worst_pose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoMargin, Overloaded, RopeInfeasible
from .vehicle import GRAVITY


@dataclass(frozen=True)
class WorstCaseInputs:
    """Masses, limits, and worst-pose assumptions feeding the budget chain."""

    m_vehicle: float = 0.4
    M_payload: float = 0.4
    F_max_total: float = 6.4
    share_fraction: float = 1.0 / 3.0
    l: float = math.sqrt(1.25)
    z_side_worst: float = 2.0
    max_speed: float = 1.0
    max_edge_error: float = 1.0
    attitude_clamp: float = 0.35
    diagonal_angle: float = 0.79
    reference_horizontal_budget: float | None = 2.18

    def __post_init__(self):
        if min(self.m_vehicle, self.M_payload, self.F_max_total, self.l) <= 0:
            raise ValueError("masses, thrust budget, and rope length must be positive")
        if not 0.0 < self.share_fraction <= 1.0:
            raise ValueError("share_fraction must be in (0, 1]")


@dataclass(frozen=True)
class WorstCaseBudget:
    """Result of the budget chain; gains_ok iff the inequality holds."""

    tilt_max: float
    horizontal_budget: float
    horizontal_budget_exact: float
    tension_bound: float
    tension_at_worst_pose: float
    accel_max: float
    accel_axis_max: float
    inequality_lhs: float
    gains_ok: bool
    c1: float
    c2: float
    mu_r: float

    def as_dict(self) -> dict:
        return {
            "tilt_max_rad": self.tilt_max,
            "horizontal_budget_n": self.horizontal_budget,
            "horizontal_budget_exact_n": self.horizontal_budget_exact,
            "tension_bound_n": self.tension_bound,
            "tension_at_worst_pose_n": self.tension_at_worst_pose,
            "accel_max_mps2": self.accel_max,
            "accel_axis_max_mps2": self.accel_axis_max,
            "inequality_lhs_mps2": self.inequality_lhs,
            "gains_ok": self.gains_ok,
            "c1": self.c1,
            "c2": self.c2,
            "mu_r": self.mu_r,
        }


def max_tilt(inputs: WorstCaseInputs) -> float:
    """Largest tilt at which the shared vertical load can still be held.

    arccos of (m + share M) g over the total thrust budget.

    Raises:
        Overloaded: vertical load meets or exceeds the thrust budget.
    """
    vertical = (inputs.m_vehicle + inputs.share_fraction * inputs.M_payload) * GRAVITY
    if vertical >= inputs.F_max_total:
        raise Overloaded(
            f"vertical load {vertical:.2f} N >= thrust budget {inputs.F_max_total:.2f} N"
        )
    return math.acos(vertical / inputs.F_max_total)


def horizontal_budget(f_max_total: float, tilt_limit: float) -> float:
    """Horizontal force available at the tilt limit: F_max sin(tilt_limit)."""
    if not 0.0 <= tilt_limit <= math.pi / 2.0:
        raise ValueError("tilt limit must be in [0, pi/2]")
    return f_max_total * math.sin(tilt_limit)


def horizontal_tension_bound(
    M: float, z: float, l: float, share_fraction: float = 1.0 / 3.0
) -> float:
    """Horizontal rope tension at a stretched pose with separation z.

    (share M g) z / (2 sqrt(l^2 - z^2 / 4)): the payload hangs half the
    separation away horizontally, at whatever depth the rope length
    allows.

    Raises:
        RopeInfeasible: z is at or beyond the rope reach 2 l.
    """
    if z >= 2.0 * l:
        raise RopeInfeasible(f"separation {z} m exceeds rope reach {2 * l} m")
    if z < 0:
        raise ValueError("separation must be nonnegative")
    return share_fraction * M * GRAVITY * z / (2.0 * math.sqrt(l * l - z * z / 4.0))


def max_acceleration(budget: float, tension_bound: float, m_vehicle: float) -> float:
    """Acceleration left after the tension bound eats into the force budget.

    Raises:
        NoMargin: the tension bound consumes the whole budget.
    """
    if budget <= tension_bound:
        raise NoMargin(
            f"budget {budget:.2f} N does not exceed tension bound {tension_bound:.2f} N"
        )
    return (budget - tension_bound) / m_vehicle


def gain_inequality(
    c1: float, c2: float, mu_r: float, inputs: WorstCaseInputs | None = None
) -> WorstCaseBudget:
    """Run the full budget chain and test the gain inequality.

    lhs = c1 max|e_v| + c2 (max e_side + 0.7 max e_diag) + mu_r max|z_side|
    must not exceed the per-axis acceleration limit. The 0.7 weight is the
    diagonal's near-equal contribution to both axes, kept as published
    (1/sqrt(2) rounded); the decomposition is specific to the square
    formation.
    """
    if inputs is None:
        inputs = WorstCaseInputs()
    tilt = max_tilt(inputs)
    budget_exact = horizontal_budget(inputs.F_max_total, inputs.attitude_clamp)
    budget = (
        inputs.reference_horizontal_budget
        if inputs.reference_horizontal_budget is not None
        else budget_exact
    )
    tension_flat = inputs.share_fraction * inputs.M_payload * GRAVITY
    tension_pose = horizontal_tension_bound(
        inputs.M_payload, inputs.z_side_worst, inputs.l, inputs.share_fraction
    )
    accel = max_acceleration(budget, tension_flat, inputs.m_vehicle)
    axis = accel * math.sin(inputs.diagonal_angle)
    lhs = (
        c1 * inputs.max_speed
        + c2 * (inputs.max_edge_error + 0.7 * inputs.max_edge_error)
        + mu_r * inputs.z_side_worst
    )
    return WorstCaseBudget(
        tilt_max=tilt,
        horizontal_budget=budget,
        horizontal_budget_exact=budget_exact,
        tension_bound=tension_flat,
        tension_at_worst_pose=tension_pose,
        accel_max=accel,
        accel_axis_max=axis,
        inequality_lhs=lhs,
        gains_ok=lhs <= axis,
        c1=c1,
        c2=c2,
        mu_r=mu_r,
    )
