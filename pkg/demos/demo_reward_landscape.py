#!/usr/bin/env python3
"""Anatomy of the thermal-aware reward stack.

Shows how the temperature weight explodes near the 60 C threshold, how
heating vs cooling flips the sign of the safety term, and how the safety
term dwarfs every task term once a motor is hot.
"""

import numpy as np

from thermoquad import (
    RewardSnapshot,
    RewardWeights,
    ThermalRewardInput,
    residual_total,
    thermal_weight,
)

w = RewardWeights()

print("temperature weight (smooth vs literal reading):")
print(f"{'T [C]':>6} {'smooth':>12} {'literal':>12}")
for t in (30, 40, 50, 55, 58, 60, 62, 65):
    s = float(thermal_weight(t, w, "smooth"))
    lit = float(thermal_weight(t, w, "literal"))
    print(f"{t:6d} {s:12.6g} {lit:12.6g}")

# ---------------------------------------------------------------------------
# Composite reward at a perfectly-tracked standing step
# ---------------------------------------------------------------------------
snap = RewardSnapshot(
    v_cmd_xy=np.array([1.0, 0.0]), v_xy=np.array([1.0, 0.0]),
    yaw_rate_cmd=0.0, yaw_rate=0.0, v_z=0.0,
    omega_xy=np.zeros(2), gravity_xy=np.zeros(2),
    joint_accels=np.zeros(12), body_height=0.38,
    foot_heights=np.full(4, 0.2), foot_xy_speeds=np.zeros(4),
    a_t=np.zeros(12), a_prev=np.zeros(12), a_prev2=np.zeros(12),
)

temps = np.full(12, 40.0)
rates = np.zeros(12)
scenarios = [
    ("all motors cool and steady", temps.copy(), rates.copy()),
    ("one motor at 60 C heating 0.1 C/s", None, None),
    ("one motor at 60 C cooling 0.1 C/s", None, None),
]
hot_t, hot_r = temps.copy(), rates.copy()
hot_t[2] = 60.0
hot_r[2] = 0.1
scenarios[1] = (scenarios[1][0], hot_t, hot_r)
scenarios[2] = (scenarios[2][0], hot_t.copy(), -hot_r)

print("\ncomposite reward (perfect tracking, zero residual):")
for name, t, r in scenarios:
    terms = residual_total(snap, ThermalRewardInput(t, r), np.zeros(12), w)
    print(f"  {name:38s} thermal={float(terms['thermal_safety']):9.2f} "
          f"total={float(terms['total']):9.2f}")

print("\na hot heating motor swings the reward by ~100x the best task reward,")
print("which is what pushes a residual policy to act only near the limit.")
