"""Task, thermal-safety, and residual-regularization rewards.

The task terms reproduce the locomotion reward table used for nominal
policy training: exponential velocity-tracking terms with sigma = 0.25
and weighted quadratic penalties. The thermal safety term weights each
motor's temperature rate by an exponential of how close it sits to the
60 degC limit, so heating a hot motor is punished hard while cooling it
is rewarded; the regularization term is a weighted squared norm of the
residual action.

Two readings of the thermal weight are provided:

* ``smooth``:  exp(sigma_th * (T - T_max)) everywhere - vanishingly small
  at low temperature, 1 at the threshold, growing above. Default, because
  the near-zero-at-low-temperature behavior is what lets the residual
  stay inactive when motors are cold.
* ``literal``: exp(-min(sigma_th * (T_max - T), 0)) - exactly 1 for all
  T <= T_max and identical to ``smooth`` above the threshold.

All functions accept an optional leading batch axis on their array
arguments and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RewardWeights

NOMINAL_TERMS = (
    "lin_vel_tracking",
    "ang_vel_tracking",
    "lin_vel_z",
    "ang_vel_xy",
    "orientation",
    "joint_accel",
    "termination",
    "body_height",
    "foot_clearance",
    "action_rate",
    "smoothness",
)

COMPOSITE_TERMS = ("nominal_total", "thermal_safety", "residual_reg", "total")


@dataclass
class RewardSnapshot:
    """Per-step quantities consumed by the task reward terms.

    In residual-composition mode the action history fields hold residual
    actions: the action-rate and smoothness penalties then regularize the
    corrective policy rather than the frozen nominal one.
    """

    v_cmd_xy: np.ndarray  # (..., 2)
    v_xy: np.ndarray  # (..., 2)
    yaw_rate_cmd: np.ndarray | float
    yaw_rate: np.ndarray | float
    v_z: np.ndarray | float
    omega_xy: np.ndarray  # (..., 2)
    gravity_xy: np.ndarray  # (..., 2) projection of gravity on the body plane
    joint_accels: np.ndarray  # (..., 12)
    body_height: np.ndarray | float
    foot_heights: np.ndarray  # (..., 4)
    foot_xy_speeds: np.ndarray  # (..., 4)
    a_t: np.ndarray  # (..., 12)
    a_prev: np.ndarray  # (..., 12)
    a_prev2: np.ndarray  # (..., 12)
    terminated: np.ndarray | bool = False


@dataclass
class ThermalRewardInput:
    temps: np.ndarray  # (..., 12) motor temperatures, degC
    temp_rates: np.ndarray  # (..., 12) degC/s


def _sq(x):
    x = np.asarray(x, float)
    return x * x


def _sumsq(x):
    return np.sum(_sq(x), axis=-1)


def nominal_rewards(snap: RewardSnapshot, w: RewardWeights) -> dict[str, np.ndarray]:
    """Weighted per-term breakdown of the task reward, plus ``nominal_total``."""
    terms = {}
    terms["lin_vel_tracking"] = w.lin_vel_tracking * np.exp(
        -_sumsq(np.asarray(snap.v_cmd_xy) - np.asarray(snap.v_xy)) / w.sigma_track
    )
    terms["ang_vel_tracking"] = w.ang_vel_tracking * np.exp(
        -_sq(np.asarray(snap.yaw_rate_cmd) - np.asarray(snap.yaw_rate)) / w.sigma_track
    )
    terms["lin_vel_z"] = w.lin_vel_z * _sq(snap.v_z)
    terms["ang_vel_xy"] = w.ang_vel_xy * _sumsq(snap.omega_xy)
    terms["orientation"] = w.orientation * _sumsq(snap.gravity_xy)
    terms["joint_accel"] = w.joint_accel * _sumsq(snap.joint_accels)
    terms["termination"] = w.termination * np.asarray(snap.terminated, float)
    terms["body_height"] = w.body_height * _sq(w.h_target_m - np.asarray(snap.body_height))
    terms["foot_clearance"] = w.foot_clearance * np.sum(
        _sq(w.pz_target_m - np.asarray(snap.foot_heights))
        * np.asarray(snap.foot_xy_speeds),
        axis=-1,
    )
    terms["action_rate"] = w.action_rate * _sumsq(
        np.asarray(snap.a_t) - np.asarray(snap.a_prev)
    )
    terms["smoothness"] = w.smoothness * _sumsq(
        np.asarray(snap.a_t) - 2.0 * np.asarray(snap.a_prev) + np.asarray(snap.a_prev2)
    )
    total = terms["lin_vel_tracking"]
    for name in NOMINAL_TERMS[1:]:
        total = total + terms[name]
    terms["nominal_total"] = total
    return terms


def thermal_weight(temps, w: RewardWeights, mode: str | None = None):
    """Exponential proximity-to-limit weight for the thermal safety term."""
    mode = mode or w.thermal_mode
    temps = np.asarray(temps, float)
    if mode == "smooth":
        return np.exp(w.sigma_th_per_c * (temps - w.t_max_c))
    if mode == "literal":
        return np.exp(-np.minimum(w.sigma_th_per_c * (w.t_max_c - temps), 0.0))
    raise ValueError(f"unknown thermal weight mode: {mode!r}")


def thermal_reward(inp: ThermalRewardInput, w: RewardWeights,
                   mode: str | None = None):
    """Temperature-rate reward: negative when hot motors heat, positive when
    they cool."""
    weights = thermal_weight(inp.temps, w, mode)
    return w.w_thermal * np.sum(np.asarray(inp.temp_rates, float) * weights, axis=-1)


def regularization_reward(a_res, w: RewardWeights):
    """Weighted squared norm of the residual action."""
    return w.w_reg * _sumsq(a_res)


def residual_total(
    snap: RewardSnapshot,
    thermal_inp: ThermalRewardInput,
    a_res: np.ndarray,
    w: RewardWeights,
    mode: str | None = None,
) -> dict[str, np.ndarray]:
    """Composite reward: thermal safety + regularization + task terms.

    ``snap`` must carry residual actions in its action history fields so the
    action-rate and smoothness penalties apply to the corrective policy.
    The returned breakdown sums to ``total`` exactly.
    """
    terms = nominal_rewards(snap, w)
    terms["thermal_safety"] = thermal_reward(thermal_inp, w, mode)
    terms["residual_reg"] = regularization_reward(a_res, w)
    terms["total"] = terms["nominal_total"] + terms["thermal_safety"] + terms["residual_reg"]
    return terms
