"""Scripted stand-ins for the learned policies.

The gait proxy generates a periodic trot: sinusoidal joint offsets with a
diagonal phase split, foot clearance profiles, and an affine load-torque
law (base + speed gain * |planar command| + payload gain * mass, shared
across the three joints of a leg with fixed ratios). It supplies exactly
what the thermal pipeline needs - torques, joint speeds, foot states -
without pretending to be a dynamics simulator.

The thermal governor is a scripted proxy for the corrective policy: it
watches the hottest motor through the smooth thermal weight, scales the
velocity command down, shrinks the swing via a negative residual action,
and adds a yaw-relief bias that lets the robot change heading instead of
pushing straight into a thermal wall. At low temperatures its output is
numerically negligible, preserving the nominal gait.

All functions are vectorized over a leading agent axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import GaitProxyParams, GovernorParams, RewardWeights
from .rewards import thermal_weight

# Diagonal trot: FL and RR swing together, FR and RL half a cycle later.
LEG_PHASE_OFFSETS = np.array([0.0, 0.5, 0.5, 0.0])
# Leg positions on the body, used to turn CoM shifts into load asymmetry:
# (x sign, y sign) for FL, FR, RL, RR.
LEG_POSITION_SIGNS = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
# HAA joints get a left/right antisymmetric bias when the governor requests
# yaw relief.
YAW_RELIEF_PATTERN = np.array(
    [1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0]
)

GRAVITY = 9.81


@dataclass
class GaitProxyOutput:
    """Everything one policy step of the proxy feeds into the pipeline."""

    a_nom: np.ndarray  # (n, 12) policy-unit joint offsets
    joint_velocities: np.ndarray  # (n, 12) rad/s along the nominal trajectory
    load_torques: np.ndarray  # (n, 12) N*m quasi-static load per joint
    foot_heights: np.ndarray  # (n, 4) m
    foot_xy_speeds: np.ndarray  # (n, 4) m/s
    swing_lift: np.ndarray  # (n, 4) in [0, 1], swing-phase lift profile
    stride_frequency: np.ndarray  # (n,) Hz


def planar_speed(cmd: np.ndarray) -> np.ndarray:
    """|v_xy| of a command array (..., 3) = (v_x, v_y, yaw_rate)."""
    cmd = np.asarray(cmd, float)
    return np.sqrt(cmd[..., 0] ** 2 + cmd[..., 1] ** 2)


def stride_frequency(speed: np.ndarray, params: GaitProxyParams) -> np.ndarray:
    return params.stride_frequency_hz + params.stride_freq_per_mps * np.asarray(speed, float)


def load_torques(
    cmd: np.ndarray,
    params: GaitProxyParams,
    payload_kg: np.ndarray,
    force_n: np.ndarray,
    com_shift_m: np.ndarray,
    terrain_factor: float = 1.0,
) -> np.ndarray:
    """Affine quasi-static load per joint for the command being executed.

    Per leg: (base + k_v * |v_xy| + k_m * effective mass + k_f * |F_xy|)
    scaled by the terrain factor and a CoM-shift asymmetry, then split over
    HAA/HFE/KFE with the configured shares.
    """
    cmd = np.atleast_2d(np.asarray(cmd, float))
    n = cmd.shape[0]
    speed = planar_speed(cmd)
    force_n = np.atleast_2d(np.asarray(force_n, float))
    com_shift_m = np.atleast_2d(np.asarray(com_shift_m, float))
    effective_mass = np.maximum(
        np.asarray(payload_kg, float) + force_n[:, 2] / GRAVITY, 0.0
    )
    planar_force = np.sqrt(force_n[:, 0] ** 2 + force_n[:, 1] ** 2)
    leg_load = (
        params.base_load_torque_nm
        + params.speed_to_torque_gain * speed
        + params.payload_to_torque_gain * effective_mass
        + params.force_to_torque_gain * planar_force
    ) * terrain_factor  # (n,)
    com_mult = 1.0 + params.com_to_share_gain * (
        com_shift_m[:, None, 0] * LEG_POSITION_SIGNS[None, :, 0]
        + com_shift_m[:, None, 1] * LEG_POSITION_SIGNS[None, :, 1]
    )  # (n, 4)
    share = np.asarray(params.joint_share, float)  # (3,)
    load = leg_load[:, None, None] * com_mult[:, :, None] * share[None, None, :]
    return load.reshape(n, 12)


def gait_proxy_step(
    cmd: np.ndarray,
    phase: np.ndarray,
    params: GaitProxyParams,
    payload_kg: np.ndarray,
    force_n: np.ndarray,
    com_shift_m: np.ndarray,
    terrain_factor: float = 1.0,
    action_scale_rad: float = 0.25,
) -> GaitProxyOutput:
    """One 50 Hz step of the trot generator.

    ``cmd`` is (n, 3); ``phase`` is the (n,) gait phase in [0, 1). The swing
    is gated by command magnitude, so a zero command stands still with only
    the base load torque.
    """
    cmd = np.atleast_2d(np.asarray(cmd, float))
    n = cmd.shape[0]
    phase = np.atleast_1d(np.asarray(phase, float))
    speed = planar_speed(cmd)
    swing_gate = np.clip(speed / params.swing_speed_ramp_mps, 0.0, 1.0)
    amp_units = (params.swing_amplitude_rad / action_scale_rad) * swing_gate

    freq = stride_frequency(speed, params)
    leg_phase = (phase[:, None] + LEG_PHASE_OFFSETS[None, :]) % 1.0
    s = np.sin(2.0 * np.pi * leg_phase)  # (n, 4)
    c = np.cos(2.0 * np.pi * leg_phase)

    a_nom = np.zeros((n, 12))
    joint_vel = np.zeros((n, 12))
    omega = 2.0 * np.pi * freq  # phase rate, rad/s
    amp_rad = amp_units * action_scale_rad
    # Small lateral HAA component for sideways commands; HFE leads the swing
    # and KFE trails it by a quarter cycle.
    lateral = 0.2 * np.sign(cmd[:, 1]) * np.minimum(np.abs(cmd[:, 1]), 1.0)
    for leg in range(4):
        base = 3 * leg
        a_nom[:, base + 0] = 0.3 * amp_units * s[:, leg] * lateral
        a_nom[:, base + 1] = amp_units * s[:, leg]
        a_nom[:, base + 2] = -0.8 * amp_units * c[:, leg]
        joint_vel[:, base + 0] = 0.3 * amp_rad * c[:, leg] * omega * lateral
        joint_vel[:, base + 1] = amp_rad * c[:, leg] * omega
        joint_vel[:, base + 2] = 0.8 * amp_rad * s[:, leg] * omega

    loads = load_torques(cmd, params, payload_kg, force_n, com_shift_m,
                         terrain_factor)

    swing_lift = np.maximum(s, 0.0) * swing_gate[:, None]
    foot_heights = (
        params.foot_height_per_rad * params.swing_amplitude_rad * swing_lift
    )
    foot_xy_speeds = 2.0 * speed[:, None] * swing_lift

    return GaitProxyOutput(
        a_nom=a_nom,
        joint_velocities=joint_vel,
        load_torques=loads,
        foot_heights=foot_heights,
        foot_xy_speeds=foot_xy_speeds,
        swing_lift=swing_lift,
        stride_frequency=freq,
    )


def governor_weight(motor_temps: np.ndarray, weights: RewardWeights) -> np.ndarray:
    """Engagement level in [0, 1]: smooth thermal weight of the hottest motor."""
    w = thermal_weight(np.max(np.asarray(motor_temps, float), axis=-1), weights,
                       mode="smooth")
    return np.clip(w, 0.0, 1.0)


def governor_modulate(
    cmd: np.ndarray,
    a_nom: np.ndarray,
    motor_temps: np.ndarray,
    params: GovernorParams,
    weights: RewardWeights,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thermal command attenuation and residual action.

    Returns (a_res, modulated_cmd, engagement). The command cut is bounded
    by max_command_scale_reduction * w and sharpened with
    w**command_cut_exponent so it only bites near the safety threshold; a
    yaw-relief rate is added to the command, and the residual action
    cancels part of the nominal swing plus a small HAA pattern realizing
    the heading change in joint space. At w ~ 0 every output is
    numerically negligible.
    """
    cmd = np.atleast_2d(np.asarray(cmd, float))
    a_nom = np.atleast_2d(np.asarray(a_nom, float))
    w = governor_weight(np.atleast_2d(motor_temps), weights)  # (n,)

    cut = params.max_command_scale_reduction * w**params.command_cut_exponent
    cmd_mod = cmd * (1.0 - cut)[:, None]
    yaw_relief = params.yaw_relief_gain * w
    cmd_mod[:, 2] = cmd_mod[:, 2] + yaw_relief

    a_res = -(params.max_amplitude_reduction * w)[:, None] * a_nom \
        + (params.yaw_joint_pattern_scale * yaw_relief)[:, None] * YAW_RELIEF_PATTERN
    return a_res, cmd_mod, w
