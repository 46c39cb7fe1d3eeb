"""Independent oracles shared by unit and acceptance tests.

These deliberately avoid the code paths they check: the RC response is the
textbook closed form, and the fine-step integrator works on a matrix
recovered from ``continuous_derivative`` by basis probing, never touching
the matrix-exponential discretization.
"""

import numpy as np


def rc_analytic(t, t_env, t0, q, r, c):
    """Closed-form single-node RC response."""
    decay = np.exp(-np.asarray(t, float) / (r * c))
    return t_env + (t0 - t_env) * decay + q * r * (1.0 - decay)


def probe_affine_map(fn, n):
    """Recover (M, b) of a linear-affine vector map by basis probing."""
    b = fn(np.zeros(n))
    M = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        M[:, j] = fn(e) - b
    return M, b


def rk4_integrate(M, b, x0, dt, n_steps):
    """Classic explicit 4th-order integration of x' = M x + b."""
    x = x0.copy()
    for _ in range(n_steps):
        k1 = M @ x + b
        k2 = M @ (x + 0.5 * dt * k1) + b
        k3 = M @ (x + 0.5 * dt * k2) + b
        k4 = M @ (x + dt * k3) + b
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x
