"""Action composition, PD torque law, and observation vector layouts.

Actions are joint-position offsets in policy units; a configurable scale
(default 0.25 rad per unit) converts them to radians before they are added
to the default pose. The nominal and residual offsets combine additively:

    theta_target = theta_0 + a_nom + a_res        (radians, clipped)

The PD loop runs at 4 substeps per policy step and clamps its output to
the torque limit. Observation vectors follow fixed layouts (45 entries for
the nominal policy, 73 for the residual policy, which additionally sees
the 12 motor temperatures and a 16-dim terrain latent passthrough).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import ActionConfig, PdGains
from .errors import DimensionMismatch

JOINT_COUNT = 12
LATENT_DIM = 16

NOMINAL_LAYOUT = (
    ("cmd_velocity", 3),
    ("base_angular_velocity", 3),
    ("gravity_vector", 3),
    ("joint_positions", JOINT_COUNT),
    ("joint_velocities", JOINT_COUNT),
    ("prev_action", JOINT_COUNT),
)

RESIDUAL_LAYOUT = (
    ("cmd_velocity", 3),
    ("base_angular_velocity", 3),
    ("gravity_vector", 3),
    ("joint_positions", JOINT_COUNT),
    ("joint_velocities", JOINT_COUNT),
    ("motor_temperatures", JOINT_COUNT),
    ("terrain_latent", LATENT_DIM),
    ("prev_action", JOINT_COUNT),
)

NOMINAL_OBS_DIM = sum(d for _, d in NOMINAL_LAYOUT)  # 45
RESIDUAL_OBS_DIM = sum(d for _, d in RESIDUAL_LAYOUT)  # 73


@dataclass
class JointState:
    positions: np.ndarray  # (..., 12) rad
    velocities: np.ndarray  # (..., 12) rad/s


@dataclass
class ObservationVector:
    values: np.ndarray
    layout: str  # "nominal" | "residual"


def scale_action(a_units: np.ndarray, action: ActionConfig) -> np.ndarray:
    """Clip policy-unit offsets and convert to radians."""
    a = np.clip(np.asarray(a_units, float), -action.clip_units, action.clip_units)
    return a * action.scale_rad_per_unit


def compose_actions(
    theta0: np.ndarray,
    a_nom: np.ndarray,
    a_res: np.ndarray,
    joint_limit: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Target joint positions theta0 + a_nom + a_res (radian offsets).

    Returns (targets, clipped_mask); when ``joint_limit`` is given the sum is
    clamped to +-joint_limit and the mask marks which joints were clamped.
    """
    target = np.asarray(theta0, float) + np.asarray(a_nom, float) + np.asarray(a_res, float)
    if joint_limit is None:
        return target, np.zeros_like(target, dtype=bool)
    clipped = np.abs(target) > joint_limit
    return np.clip(target, -joint_limit, joint_limit), clipped


def pd_torque(target: np.ndarray, js: JointState, g: PdGains) -> np.ndarray:
    """tau = clamp(kp*(target - theta) - kd*theta_dot, +-torque_limit)."""
    raw = g.kp * (np.asarray(target, float) - np.asarray(js.positions, float)) \
        - g.kd * np.asarray(js.velocities, float)
    return np.clip(raw, -g.torque_limit_nm, g.torque_limit_nm)


def control_cycle(
    target: np.ndarray,
    plant: Callable[[int], JointState] | Sequence[JointState],
    gains: PdGains,
    substeps: int = 4,
) -> np.ndarray:
    """Evaluate the PD law against the harness-supplied joint state at each
    of ``substeps`` ticks while holding the target fixed.

    Returns the (substeps, 12) torque window ready for RMS aggregation.
    """
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    window = []
    for k in range(substeps):
        js = plant(k) if callable(plant) else plant[k]
        window.append(pd_torque(target, js, gains))
    return np.stack(window)


def _concat(parts: Iterable[np.ndarray], expected: tuple[tuple[str, int], ...],
            layout: str) -> ObservationVector:
    arrays = []
    for (name, dim), part in zip(expected, parts):
        arr = np.asarray(part, float)
        if arr.shape[-1] != dim:
            raise DimensionMismatch(
                f"{layout} observation field {name!r} must have trailing "
                f"dimension {dim}, got {arr.shape}"
            )
        arrays.append(arr)
    return ObservationVector(np.concatenate(arrays, axis=-1), layout)


def assemble_obs_nominal(cmd, omega, gravity, js: JointState, a_prev
                         ) -> ObservationVector:
    return _concat(
        [cmd, omega, gravity, js.positions, js.velocities, a_prev],
        NOMINAL_LAYOUT, "nominal",
    )


def assemble_obs_residual(cmd, omega, gravity, js: JointState, temps, latent,
                          a_prev) -> ObservationVector:
    return _concat(
        [cmd, omega, gravity, js.positions, js.velocities, temps, latent, a_prev],
        RESIDUAL_LAYOUT, "residual",
    )


def split_observation(obs: ObservationVector) -> dict[str, np.ndarray]:
    """Inverse of assembly: exact field slices keyed by layout name."""
    layout = NOMINAL_LAYOUT if obs.layout == "nominal" else RESIDUAL_LAYOUT
    expected = sum(d for _, d in layout)
    if obs.values.shape[-1] != expected:
        raise DimensionMismatch(
            f"{obs.layout} observation must have trailing dimension {expected}, "
            f"got {obs.values.shape}"
        )
    out = {}
    offset = 0
    for name, dim in layout:
        out[name] = obs.values[..., offset:offset + dim]
        offset += dim
    return out


def layout_table(layout: str) -> list[dict]:
    """Index-to-field binding table for external policy code."""
    entries = NOMINAL_LAYOUT if layout == "nominal" else RESIDUAL_LAYOUT
    rows = []
    offset = 0
    for name, dim in entries:
        rows.append({"field": name, "start": offset, "stop": offset + dim,
                     "dim": dim})
        offset += dim
    return rows
