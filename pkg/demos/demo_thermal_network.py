#!/usr/bin/env python3
"""Tour of the thermal network core.

Builds the shipped 14-node network (12 motors + onboard computer +
ambient), inspects steady states, and shows that the exact discrete
stepping reproduces the closed-form RC response and reacts to the
forced-convection speedup.
"""

import numpy as np

from thermoquad import (
    ModelCache,
    build_network,
    discretize,
    load_default_config,
    steady_state,
    step,
)
from thermoquad.thermal import make_single_node_network

config = load_default_config()
net = build_network(config)
print(f"network: {net.n} nodes, {len(net.edges)} edges, "
      f"ambient index {net.ambient_index}")

# ---------------------------------------------------------------------------
# Steady states: what sustained heat does to each node
# ---------------------------------------------------------------------------
for watts in (5.0, 15.0, 30.0):
    u = np.zeros(14)
    u[:12] = watts
    u[12] = 10.0
    temps = steady_state(net, u, v_xy=0.0, ambient_temp=25.0)
    print(f"{watts:5.1f} W/motor at rest -> hottest motor "
          f"{temps[:12].max():6.2f} C, computer {temps[12]:6.2f} C")

# Forced convection: the same heat dissipates better at speed.
u = np.zeros(14)
u[:12] = 30.0
for v in (0.0, 0.5, 1.0, 2.0):
    temps = steady_state(net, u, v_xy=v, ambient_temp=25.0)
    print(f"30 W/motor at {v:.1f} m/s -> hottest motor {temps[:12].max():6.2f} C")

# ---------------------------------------------------------------------------
# Exact discretization vs the textbook RC answer
# ---------------------------------------------------------------------------
rc_net = make_single_node_network(capacitance=200.0, resistance_to_ambient=4.0)
model = discretize(rc_net, 0.0, 0.02)
temps = np.array([20.0, 25.0])
u = np.array([30.0, 0.0])
for _ in range(15000):  # 300 s
    temps = step(model, temps, u)
analytic = 25.0 + (20.0 - 25.0) * np.exp(-300.0 / 800.0) \
    + 30.0 * 4.0 * (1.0 - np.exp(-300.0 / 800.0))
print(f"single 200 J/K node, 30 W for 300 s: stepped {temps[0]:.6f} C, "
      f"closed form {analytic:.6f} C")

# ---------------------------------------------------------------------------
# Velocity-bucketed model cache
# ---------------------------------------------------------------------------
cache = ModelCache(net, dt=0.02, bucket_width=0.1)
m1 = cache.lookup(0.74)
m2 = cache.lookup(0.79)
m3 = cache.lookup(1.31)
print(f"bucket sharing: v=0.74 and v=0.79 share a model: {m1 is m2}; "
      f"v=1.31 uses bucket {m3.v_bucket}")
