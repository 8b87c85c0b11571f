"""Suspended point-mass payload connected by massless taut-only ropes.

Each rope is a stiff unilateral spring-damper: below its rest length it
transmits nothing, beyond it the tension magnitude is max(0, k s + c sdot)
with stretch s. The spring constant is high enough that the steady-state
tension matches the closed-form suspended-equilibrium value within a
fraction of a percent while remaining integrable at millisecond steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import NonFiniteState, RopeInfeasible
from .vehicle import GRAVITY


@dataclass
class PayloadParams:
    """Payload mass, rope geometry, and rope spring-damper constants."""

    mass: float = 0.4
    rope_length: float = math.sqrt(1.25)
    rope_stiffness: float = 10000.0
    rope_damping: float = 50.0
    attachment_offsets: NDArray[np.float64] | None = None

    def __post_init__(self):
        if self.mass <= 0 or self.rope_length <= 0 or self.rope_stiffness <= 0:
            raise ValueError("payload mass, rope length, and stiffness must be positive")


@dataclass
class PayloadState:
    """Point-mass state plus the last computed per-rope tension vectors."""

    position: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    velocity: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    tensions: NDArray[np.float64] = field(default_factory=lambda: np.zeros((4, 3)))

    def copy(self) -> "PayloadState":
        return PayloadState(
            position=self.position.copy(),
            velocity=self.velocity.copy(),
            tensions=self.tensions.copy(),
        )


def rope_forces(
    payload: PayloadState,
    vehicle_positions,
    vehicle_velocities,
    params: PayloadParams,
) -> NDArray[np.float64]:
    """Per-rope tension force applied to each vehicle; payload gets the negation.

    Slack ropes (separation below rope_length) transmit exactly zero, and
    the spring-damper combination is floored at zero so a rope never
    pushes.
    """
    veh_p = np.asarray(vehicle_positions, dtype=np.float64)
    veh_v = np.asarray(vehicle_velocities, dtype=np.float64)
    attach = veh_p if params.attachment_offsets is None else veh_p + params.attachment_offsets
    rel = attach - payload.position  # vehicle side minus payload side
    dist = np.linalg.norm(rel, axis=1)
    safe = np.maximum(dist, 1e-12)  # coincident points imply a slack rope anyway
    direction = -rel / safe[:, None]  # from vehicle toward payload
    stretch = dist - params.rope_length
    stretch_rate = np.einsum("ij,ij->i", rel, veh_v - payload.velocity) / safe
    magnitude = np.where(
        stretch > 0.0,
        np.maximum(0.0, params.rope_stiffness * stretch + params.rope_damping * stretch_rate),
        0.0,
    )
    return magnitude[:, None] * direction


def payload_net_force(tensions_on_vehicles, params: PayloadParams) -> NDArray[np.float64]:
    """Sum of rope reactions on the payload plus gravity."""
    t = np.asarray(tensions_on_vehicles, dtype=np.float64)
    return -t.sum(axis=0) + np.array([0.0, 0.0, -params.mass * GRAVITY])


def step_payload(
    payload: PayloadState, total_force, params: PayloadParams, dt: float
) -> PayloadState:
    """Symplectic-Euler update of the point mass.

    Raises:
        NonFiniteState: integration blew up.
    """
    if not 0.0 < dt <= 0.001:
        raise ValueError("payload step must be in (0, 0.001] s (stiff ropes)")
    f = np.asarray(total_force, dtype=np.float64)
    velocity = payload.velocity + (f / params.mass) * dt
    position = payload.position + velocity * dt
    if not (np.all(np.isfinite(position)) and np.all(np.isfinite(velocity))):
        raise NonFiniteState("payload state became non-finite")
    return PayloadState(position=position, velocity=velocity, tensions=payload.tensions)


def equilibrium_tension(params: PayloadParams, diagonal: float) -> float:
    """Closed-form per-rope tension with the payload hanging centered.

    For a square of diagonal d2 and rope length l the magnitude is
    (M g / 4) l / sqrt(l^2 - d2^2 / 4).

    Raises:
        RopeInfeasible: the diagonal cannot be spanned by the ropes.
    """
    l = params.rope_length
    if diagonal >= 2.0 * l:
        raise RopeInfeasible(f"diagonal {diagonal} m exceeds rope reach {2 * l} m")
    return (params.mass * GRAVITY / 4.0) * l / math.sqrt(l * l - diagonal * diagonal / 4.0)


def hang_depth(params: PayloadParams, diagonal: float) -> float:
    """Vertical drop of the centered payload below the vehicle plane."""
    l = params.rope_length
    if diagonal >= 2.0 * l:
        raise RopeInfeasible(f"diagonal {diagonal} m exceeds rope reach {2 * l} m")
    return math.sqrt(l * l - diagonal * diagonal / 4.0)
