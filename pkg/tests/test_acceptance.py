"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see per-criterion
status lines. Tolerances are fixed here, not calibrated elsewhere.
"""

import json
import time

import numpy as np
import pytest

from oracle_utils import probe_affine_map, rc_analytic, rk4_integrate

from thermoquad.cli import main as cli_main
from thermoquad.config import RewardWeights, default_config, load_default_config
from thermoquad.control import (
    NOMINAL_OBS_DIM,
    RESIDUAL_OBS_DIM,
    JointState,
    assemble_obs_nominal,
    assemble_obs_residual,
    split_observation,
)
from thermoquad.harness import (
    agent_rng,
    build_context,
    constant_profile,
    long_horizon_experiment,
    run_episode,
    sample_setup,
)
from thermoquad.rewards import (
    ThermalRewardInput,
    regularization_reward,
    thermal_reward,
    thermal_weight,
)
from thermoquad.thermal import (
    ThermalEdge,
    ThermalNetwork,
    ThermalNode,
    build_network,
    continuous_derivative,
    discretize,
    make_single_node_network,
    spectral_radius,
    step,
)


def _ok(n, msg):
    print(f"\nACCEPTANCE {n} PASS: {msg}")


def _scalar_response(model, t0, t_env, q, n_steps):
    """Single-node stepping via the model's own (A, B) entries.

    Identical arithmetic to ``step`` on the 2-vector state (verified below),
    iterated as scalars so 50k steps stay well under the runtime budget.
    """
    a00, a01 = model.A[0, 0], model.A[0, 1]
    b00 = model.B[0, 0]
    xs = np.empty(n_steps)
    x = t0
    for k in range(n_steps):
        x = a00 * x + a01 * t_env + b00 * q
        xs[k] = x
    return xs


def test_criterion_1_rc_analytic_oracle():
    t_env, t0, q, r, c = 25.0, 55.0, 4.0, 10.0, 100.0  # RC = 1000 s
    net = make_single_node_network(c, r)
    dt = 0.02
    n_steps = 50000  # 1000 s
    times = dt * np.arange(1, n_steps + 1)
    exact = rc_analytic(times, t_env, t0, q, r, c)

    start = time.perf_counter()
    model = discretize(net, 0.0, dt, mode="exact")
    # The scalar fast path must agree bitwise with the stepping op.
    temps = np.array([t0, t_env])
    u = np.array([q, 0.0])
    probe = _scalar_response(model, t0, t_env, q, 100)
    for k in range(100):
        temps = step(model, temps, u)
        assert temps[0] == probe[k]
    sim = _scalar_response(model, t0, t_env, q, n_steps)
    rel = np.max(np.abs(sim - exact) / np.abs(exact))
    assert rel < 1e-9, f"exact ZOH relative error {rel:.2e}"

    euler = discretize(net, 0.0, dt, mode="euler")
    sim_e = _scalar_response(euler, t0, t_env, q, n_steps)
    rel_e = np.max(np.abs(sim_e - exact) / np.abs(exact))
    assert rel_e < 1e-3, f"euler relative error {rel_e:.2e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"
    _ok(1, f"RC oracle: ZOH rel err {rel:.1e} (<1e-9), Euler {rel_e:.1e} "
           f"(<1e-3), runtime {elapsed:.2f}s (<1s)")


def test_criterion_2_ode_oracle_equivalence():
    config = load_default_config()
    net = build_network(config)
    rng = np.random.default_rng(11)
    start = time.perf_counter()
    temps_zoh = np.concatenate([rng.uniform(20.0, 65.0, 13), [25.0]])
    temps_rk4 = temps_zoh.copy()
    dt, fine = 0.02, 1e-4
    worst = 0.0
    for _seg in range(10):  # 10 x 2 s of piecewise-constant inputs
        u = np.concatenate([rng.uniform(0.0, 40.0, 12), [10.0], [0.0]])
        v = float(rng.uniform(0.0, 2.0))
        model = discretize(net, v, dt)
        M, b = probe_affine_map(lambda x: continuous_derivative(net, x, u, v), 14)
        temps_rk4 = rk4_integrate(M, b, temps_rk4, fine, int(round(2.0 / fine)))
        for _ in range(100):
            temps_zoh = step(model, temps_zoh, u)
        worst = max(worst, float(np.max(np.abs(temps_zoh - temps_rk4))))
    elapsed = time.perf_counter() - start
    assert worst < 0.01, f"max node deviation {worst:.4f} degC"
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    _ok(2, f"ZOH vs fine RK4 max deviation {worst:.2e} degC (<0.01), "
           f"runtime {elapsed:.1f}s (<10s)")


def test_criterion_3_passivity_and_spectral_radius():
    rng = np.random.default_rng(7)
    worst_rho = 0.0
    for k in range(100):
        cfg = default_config()
        for node in cfg.nodes:
            if node.kind != "ambient":
                node.capacitance_j_per_k = float(rng.uniform(100.0, 600.0))
        for edge in cfg.edges:
            if edge.convective:
                edge.conv_base_k_per_w = float(rng.uniform(1.5, 8.0))
                edge.conv_coeff = float(rng.uniform(0.0, 1.2))
                edge.conv_exponent = float(rng.uniform(0.5, 1.0))
            else:
                edge.resistance_k_per_w = float(rng.uniform(3.0, 20.0))
        net = build_network(cfg)
        model = discretize(net, float(rng.uniform(0.0, 2.5)), 0.02)
        rho = spectral_radius(model)
        worst_rho = max(worst_rho, rho)
        assert rho <= 1.0 + 1e-12
        if k % 10 == 0:  # monotone zero-input decay, spot-checked for speed
            coarse = discretize(net, 1.0, 1.0)
            temps = np.concatenate([rng.uniform(0.0, 90.0, 13), [25.0]])
            prev = np.max(np.abs(temps - 25.0))
            for _ in range(100):
                temps = step(coarse, temps, np.zeros(14))
                cur = np.max(np.abs(temps - 25.0))
                assert cur <= prev + 1e-12
                prev = cur
    _ok(3, f"100 random configs: spectral radius <= 1+1e-12 "
           f"(worst {worst_rho:.15f}), zero-input decay monotone")


def test_criterion_4_energy_bookkeeping():
    nodes = [ThermalNode(i, "motor", f"M{i}", 50.0 * (i + 2)) for i in range(4)]
    nodes.append(ThermalNode(4, "ambient", "AMBIENT"))
    edges = [ThermalEdge(i=i, j=i + 1, resistance=4.0 + i) for i in range(3)]
    net = ThermalNetwork(nodes=nodes, edges=edges)
    dt = 0.02
    model = discretize(net, 0.0, dt)
    caps = net.capacitances
    temps = np.array([40.0, 30.0, 20.0, 50.0, 25.0])
    u = np.array([3.0, 0.0, 7.0, 1.0, 0.0])
    energy0 = float(np.sum(caps * temps))
    injected = 0.0
    for _ in range(10000):
        temps = step(model, temps, u)
        injected += dt * float(np.sum(u))
    energy = float(np.sum(caps * temps))
    rel = abs(energy - (energy0 + injected)) / abs(energy0 + injected)
    assert rel < 1e-6
    _ok(4, f"conduction-island energy drift {rel:.1e} relative over 1e4 steps "
           f"(<1e-6)")


def test_criterion_5_reward_values():
    w = RewardWeights()
    for t, expected in ((30.0, np.exp(-10.5)), (60.0, 1.0), (65.0, np.exp(1.75))):
        got = float(thermal_weight(t, w, "smooth"))
        assert got == pytest.approx(expected, rel=1e-12), f"smooth at {t}"
    for t, expected in ((30.0, 1.0), (60.0, 1.0), (65.0, np.exp(1.75))):
        got = float(thermal_weight(t, w, "literal"))
        assert got == pytest.approx(expected, rel=1e-12), f"literal at {t}"
    temps = np.full(12, 20.0)
    temps[3] = 60.0
    rates = np.zeros(12)
    rates[3] = 0.1
    heating = float(thermal_reward(ThermalRewardInput(temps, rates), w, "smooth"))
    cooling = float(thermal_reward(ThermalRewardInput(temps, -rates), w, "smooth"))
    assert heating == pytest.approx(-100.0, rel=1e-6)
    assert cooling == -heating
    reg = float(regularization_reward(np.full(12, 0.1), w))
    assert reg == pytest.approx(-0.012, abs=1e-15)
    _ok(5, "thermal weights at {30,60,65} degC, reward sign flip, and "
           "regularization -0.012 all exact")


def test_criterion_6_observation_layouts():
    rng = np.random.default_rng(0)
    cmd, omega, grav = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
    js = JointState(rng.uniform(-1, 1, 12), rng.uniform(-1, 1, 12))
    a_prev = rng.uniform(-1, 1, 12)
    temps = rng.uniform(20, 70, 12)
    latent = rng.uniform(-1, 1, 16)

    nom = assemble_obs_nominal(cmd, omega, grav, js, a_prev)
    res = assemble_obs_residual(cmd, omega, grav, js, temps, latent, a_prev)
    assert nom.values.shape == (45,) and NOMINAL_OBS_DIM == 45
    assert res.values.shape == (73,) and RESIDUAL_OBS_DIM == 73

    parts = split_observation(res)
    assert np.array_equal(parts["cmd_velocity"], cmd)
    assert np.array_equal(parts["joint_positions"], js.positions)
    assert np.array_equal(parts["motor_temperatures"], temps)
    assert np.array_equal(parts["terrain_latent"], latent)
    assert np.array_equal(parts["prev_action"], a_prev)
    rebuilt = np.concatenate([parts[name] for name, _ in (
        ("cmd_velocity", 3), ("base_angular_velocity", 3), ("gravity_vector", 3),
        ("joint_positions", 12), ("joint_velocities", 12),
        ("motor_temperatures", 12), ("terrain_latent", 16), ("prev_action", 12))])
    assert np.array_equal(rebuilt, res.values)
    _ok(6, "observation layouts 45/73 with exact round-trip")


def test_criterion_7_governor_efficacy():
    config = load_default_config()
    start = time.perf_counter()
    results = {}
    for mode in ("nominal_only", "governed"):
        results[mode] = long_horizon_experiment(
            n_agents=256, duration=800.0, mode=mode, seed=7, config=config,
            payload_range=(2.0, 4.0), initial_temp_range=(20.0, 20.0))
    elapsed = time.perf_counter() - start
    nom = results["nominal_only"]["aggregate"]
    gov = results["governed"]["aggregate"]
    f_nom, f_gov = nom["overheat_fraction"], gov["overheat_fraction"]
    e_nom = nom["mean_tracking_error"]
    e_gov = gov["mean_tracking_error"]
    assert f_gov < f_nom, "governed must overheat less than nominal"
    assert f_gov <= f_nom / 5.0, (
        f"reduction {f_nom / max(f_gov, 1e-12):.1f}x below required 5x")
    assert e_gov <= 1.10 * e_nom, (
        f"governed tracking {e_gov:.4f} not within 10% of nominal {e_nom:.4f}")
    assert elapsed < 300.0, f"runtime {elapsed:.0f}s exceeds 5 min"
    reduction = f_nom / f_gov if f_gov > 0 else float("inf")
    _ok(7, f"256 paired agents: overheat {f_nom:.3f} -> {f_gov:.3f} "
           f"({reduction:.0f}x >= 5x), tracking {e_nom:.4f} -> {e_gov:.4f} "
           f"(+{100 * (e_gov / e_nom - 1):.1f}% <= 10%), "
           f"runtime {elapsed:.0f}s (<300s)")


def test_criterion_8_calibration_timescale():
    config = load_default_config()
    ctx = build_context(config)
    setup = sample_setup(
        agent_rng(0, 0), config.randomization, payload_range=(3.0, 3.0),
        initial_temp_range=(20.0, 20.0), ambient_range=(25.0, 25.0),
        force_range=(0.0, 0.0))
    rec = run_episode(setup, constant_profile(660.0, 1.0), "nominal_only",
                      config, ctx=ctx)
    max_motor = rec.temps[:, :12].max(axis=1)
    crossed = np.nonzero(max_motor > 60.0)[0]
    assert crossed.size > 0, "never crossed 60 degC within 11 minutes"
    t_cross = float(rec.time[crossed[0]])
    assert 180.0 <= t_cross <= 600.0, f"crossing at {t_cross:.0f}s outside [180, 600]"
    _ok(8, f"nominal 3 kg @ 1 m/s from 20 degC crosses 60 degC at "
           f"{t_cross:.0f}s = {t_cross / 60:.1f} min (in [3, 10] min)")


def test_criterion_9_batch_worker_determinism(tmp_path):
    argsets = [
        ("w1", ["--workers", "1"]),
        ("w1b", ["--workers", "1"]),
        ("w3", ["--workers", "3"]),
    ]
    blobs = {}
    for name, extra in argsets:
        out = tmp_path / name
        rc = cli_main(["batch", "--agents", "12", "--duration", "60",
                       "--mode", "governed", "--seed", "7",
                       "--out", str(out), "--traces", "2"] + extra)
        assert rc == 0
        blobs[name] = {
            "summary": (out / "summary.json").read_bytes(),
            "scatter": (out / "scatter.csv").read_bytes(),
            "trace": (out / "trace_agent0000.csv").read_bytes(),
        }
    assert blobs["w1"] == blobs["w1b"], "re-run with same seed differs"
    assert blobs["w1"] == blobs["w3"], "1 vs 3 workers differ"
    _ok(9, "batch outputs byte-identical across re-runs and 1 vs 3 workers")
