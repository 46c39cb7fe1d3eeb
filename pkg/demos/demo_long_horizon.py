#!/usr/bin/env python3
"""Batched long-horizon endurance comparison (desk-scale).

Runs paired randomized agents for a few minutes of simulated walking and
compares the overheat fraction and tracking error with and without the
thermal governor. Scale agents/duration up for the full 800 s protocol.
"""

import numpy as np

from thermoquad import load_default_config, long_horizon_experiment

config = load_default_config()

N_AGENTS = 32
DURATION = 240.0  # seconds; the full protocol uses 800 s
SEED = 7

results = {}
for mode in ("nominal_only", "governed"):
    results[mode] = long_horizon_experiment(
        n_agents=N_AGENTS, duration=DURATION, mode=mode, seed=SEED,
        config=config, payload_range=(2.0, 4.0),
        initial_temp_range=(20.0, 20.0))
    agg = results[mode]["aggregate"]
    print(f"{mode:13s}: overheat {agg['overheat_fraction']:5.2f}  "
          f"tracking {agg['mean_tracking_error']:.4f} m/s  "
          f"mean peak {agg['mean_max_temp_c']:6.1f} C  "
          f"outcomes {agg['outcome_histogram']}")

# Per-agent scatter, the long-horizon result in miniature: the governor
# compresses the temperature axis while barely moving the error axis.
print(f"\n{'agent':>5} {'payload':>8} {'nominal err/T':>16} {'governed err/T':>17}")
for nom, gov in zip(results["nominal_only"]["agents"][:10],
                    results["governed"]["agents"][:10]):
    print(f"{nom['agent']:5d} {nom['payload_kg']:8.2f} "
          f"{nom['tracking_error']:7.3f}/{nom['max_motor_temp_c']:6.1f} "
          f"{gov['tracking_error']:8.3f}/{gov['max_motor_temp_c']:6.1f}")

errs_n = [a["tracking_error"] for a in results["nominal_only"]["agents"]]
errs_g = [a["tracking_error"] for a in results["governed"]["agents"]]
print(f"\ntracking error ratio governed/nominal: "
      f"{np.mean(errs_g) / np.mean(errs_n):.3f}")
