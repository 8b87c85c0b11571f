"""Scenario configuration: the single source of truth for a simulation run.

Scenarios are plain JSON documents. Every field has a default, so a
scenario file only states what differs from the baseline four-vehicle
square. Bundled scenarios live in the package's scenarios/ directory and
can be addressed by bare name from the CLI.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .formation import FormationGraph, FormationSpec, square_formation_spec
from .guidance import MotionCommand
from .indi import AltitudeGains
from .payload import PayloadParams
from .vehicle import VehicleParams


@dataclass(frozen=True)
class RateConfig:
    """Loop rates in Hz; each faster loop must be an integer multiple."""

    plant_hz: int = 1024
    control_hz: int = 512
    guidance_hz: int = 4

    def __post_init__(self):
        if not self.guidance_hz <= self.control_hz <= self.plant_hz:
            raise ValueError("rates must satisfy guidance <= control <= plant")
        if self.plant_hz % self.control_hz or self.control_hz % self.guidance_hz:
            raise ValueError("rates must nest as integer multiples")


@dataclass(frozen=True)
class IndiConfig:
    cutoff_hz: float = 8.0
    accel_axis_limit: float = 1.54
    use_commanded_input: bool = False


@dataclass(frozen=True)
class CommandEvent:
    """A MotionCommand that takes effect at time t and holds until the next one."""

    t: float
    v_x: float = 0.0
    v_y: float = 0.0
    spin: float = 0.0
    scale_rate: float = 0.0
    altitude: float | None = None

    def motion_command(self, default_altitude: float) -> MotionCommand:
        alt = default_altitude if self.altitude is None else self.altitude
        return MotionCommand(
            v_translation=(self.v_x, self.v_y),
            omega_spin=self.spin,
            scale_rate=self.scale_rate,
            altitude_setpoint=alt,
        ).clamped()


@dataclass
class Scenario:
    """Everything a deterministic run needs, including the command script."""

    name: str = "unnamed"
    duration: float = 20.0
    rng_seed: int = 2024
    side: float = 1.0
    gain_damping: float = 0.17
    gain_shape: float = 0.55
    altitude: float = 2.0
    perturbation_radius: float = 0.0
    imu_noise: bool = True
    payload_enabled: bool = True
    record_decimation: int = 20
    # Optional explicit graph override; when set, edges are (tail, head)
    # pairs and desired_distances must match their count.
    edges: list[list[int]] | None = None
    desired_distances: list[float] | None = None
    initial_scale: float = 1.0
    initial_speed: list[float] | None = None
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    payload: PayloadParams = field(default_factory=PayloadParams)
    altitude_gains: AltitudeGains = field(default_factory=AltitudeGains)
    indi: IndiConfig = field(default_factory=IndiConfig)
    rates: RateConfig = field(default_factory=RateConfig)
    commands: list[CommandEvent] = field(default_factory=list)
    assertions: dict[str, float] = field(default_factory=dict)

    def formation_spec(self) -> FormationSpec:
        if self.edges is not None:
            graph = FormationGraph(
                n=1 + max(max(e) for e in self.edges),
                edges=tuple((int(t), int(h)) for t, h in self.edges),
            )
            if self.desired_distances is None:
                raise ValueError("explicit edges require desired_distances")
            return FormationSpec(
                graph=graph,
                desired_distances=np.asarray(self.desired_distances, dtype=np.float64),
                gain_damping=self.gain_damping,
                gain_shape=self.gain_shape,
            )
        return square_formation_spec(self.side, self.gain_damping, self.gain_shape)


def _dataclass_from(cls, data: dict):
    known = {f for f in cls.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    return cls(**data)


def scenario_from_dict(data: dict) -> Scenario:
    data = dict(data)
    nested = {
        "vehicle": VehicleParams,
        "payload": PayloadParams,
        "altitude_gains": AltitudeGains,
        "indi": IndiConfig,
        "rates": RateConfig,
    }
    kwargs = {}
    for key, value in data.items():
        if key in nested:
            kwargs[key] = _dataclass_from(nested[key], value)
        elif key == "commands":
            kwargs[key] = [_dataclass_from(CommandEvent, c) for c in value]
        else:
            kwargs[key] = value
    return _dataclass_from(Scenario, kwargs)


def scenario_to_dict(scenario: Scenario) -> dict:
    data = asdict(scenario)
    if data["payload"]["attachment_offsets"] is not None:
        data["payload"]["attachment_offsets"] = np.asarray(
            data["payload"]["attachment_offsets"]
        ).tolist()
    return data


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


def load_scenario(path_or_name) -> Scenario:
    """Load a scenario from a JSON file path or a bundled scenario name.

    Raises:
        FileNotFoundError: neither a readable file nor a bundled name.
        ValueError: malformed document (unknown fields, bad rates, ...).
    """
    path = Path(path_or_name)
    if path.is_file():
        text = path.read_text()
    else:
        candidate = resources.files("swarmlift.scenarios").joinpath(f"{path_or_name}.json")
        if not candidate.is_file():
            raise FileNotFoundError(
                f"no scenario file {path_or_name!r} and no bundled scenario of that name"
            )
        text = candidate.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"scenario {path_or_name}: line {exc.lineno}: {exc.msg}") from exc
    return scenario_from_dict(data)


def bundled_scenario_names() -> list[str]:
    root = resources.files("swarmlift.scenarios")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def command_at(scenario: Scenario, t: float) -> MotionCommand:
    """The scripted command in force at simulation time t."""
    current = MotionCommand(altitude_setpoint=scenario.altitude)
    for event in sorted(scenario.commands, key=lambda e: e.t):
        if event.t <= t + 1e-12:
            current = event.motion_command(scenario.altitude)
        else:
            break
    return current
