"""Motor activity to per-node heat input.

Per motor and thermal step, the heat entering its node is

    q = (tau_rms / k_t)**2 * R_w  +  P_driver  +  b * speed**2

i.e. Joule heating from the torque-equivalent current, the constant
actuator-driver draw, and viscous friction heating from joint motion.
Torque is aggregated across the PD substeps of one policy step as an RMS
value; speed as the mean absolute value over the same window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import MOTOR_COUNT, ElectricalConfig, MOTOR_LABELS, MotorElectricalParams
from .errors import DimensionMismatch, EmptyWindow


@dataclass(frozen=True)
class MotorSample:
    """One PD-substep observation of a single motor."""

    torque: float  # N*m
    speed: float  # rad/s
    index: int  # motor id 0..11


def rms_torque(substep_torques: Sequence[float] | np.ndarray) -> float:
    """Root-mean-square torque over a substep window."""
    arr = np.asarray(substep_torques, float)
    if arr.size == 0:
        raise EmptyWindow("rms_torque requires at least one sample")
    return float(np.sqrt(np.mean(arr * arr)))


def joule_heat(tau_rms: float, params: MotorElectricalParams) -> float:
    """Winding I^2 R loss for the torque-equivalent current."""
    current = tau_rms / params.torque_constant_nm_per_a
    return current * current * params.winding_resistance_ohm


def friction_heat(speed: float, params: MotorElectricalParams) -> float:
    """Viscous dissipation b * speed**2; even in speed."""
    return params.friction_coeff * speed * speed


def motor_param_arrays(electrical: ElectricalConfig) -> dict[str, np.ndarray]:
    """Per-motor parameter vectors resolved from default + overrides."""
    per = [electrical.for_motor(label) for label in MOTOR_LABELS]
    return {
        "torque_constant": np.array([p.torque_constant_nm_per_a for p in per]),
        "winding_resistance": np.array([p.winding_resistance_ohm for p in per]),
        "driver_power": np.array([p.driver_power_w for p in per]),
        "friction_coeff": np.array([p.friction_coeff for p in per]),
    }


def heat_vector_from_aggregates(
    tau_rms: np.ndarray,
    mean_abs_speed: np.ndarray,
    params: dict[str, np.ndarray],
    computer_power: float,
    n_nodes: int = 14,
    computer_index: int = 12,
) -> np.ndarray:
    """Assemble the node heat vector from per-motor aggregates.

    Supports a leading batch axis on ``tau_rms`` / ``mean_abs_speed``.
    """
    tau_rms = np.asarray(tau_rms, float)
    mean_abs_speed = np.asarray(mean_abs_speed, float)
    if tau_rms.shape != mean_abs_speed.shape or tau_rms.shape[-1] != MOTOR_COUNT:
        raise DimensionMismatch(
            f"expected trailing dimension {MOTOR_COUNT}, got shapes "
            f"{tau_rms.shape} and {mean_abs_speed.shape}"
        )
    current = tau_rms / params["torque_constant"]
    q_motor = (
        current * current * params["winding_resistance"]
        + params["driver_power"]
        + params["friction_coeff"] * mean_abs_speed * mean_abs_speed
    )
    out = np.zeros(tau_rms.shape[:-1] + (n_nodes,))
    out[..., :MOTOR_COUNT] = q_motor
    out[..., computer_index] = computer_power
    return out


def assemble_heat_vector(
    windows: Sequence[Sequence[MotorSample]],
    electrical: ElectricalConfig,
    computer_power: float,
    n_nodes: int = 14,
    computer_index: int = 12,
) -> np.ndarray:
    """Node heat vector from 12 per-motor substep windows.

    Each window is the list of MotorSample observations taken at the PD rate
    within one policy step; torque enters as RMS, speed as mean |speed|.
    """
    if len(windows) != MOTOR_COUNT:
        raise DimensionMismatch(
            f"expected {MOTOR_COUNT} motor windows, got {len(windows)}"
        )
    tau = np.empty(MOTOR_COUNT)
    spd = np.empty(MOTOR_COUNT)
    for k, window in enumerate(windows):
        if len(window) == 0:
            raise EmptyWindow(f"motor window {k} is empty")
        tau[k] = rms_torque([s.torque for s in window])
        spd[k] = float(np.mean([abs(s.speed) for s in window]))
    params = motor_param_arrays(electrical)
    return heat_vector_from_aggregates(
        tau, spd, params, computer_power, n_nodes=n_nodes,
        computer_index=computer_index,
    )
