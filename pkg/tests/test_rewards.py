"""Reward stack: task terms, thermal safety, regularization, composition."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermoquad.config import RewardWeights
from thermoquad.rewards import (
    RewardSnapshot,
    ThermalRewardInput,
    nominal_rewards,
    regularization_reward,
    residual_total,
    thermal_reward,
    thermal_weight,
)

W = RewardWeights()


def perfect_snapshot(**overrides):
    """All penalties zero, tracking perfect."""
    fields = dict(
        v_cmd_xy=np.array([1.0, 0.2]),
        v_xy=np.array([1.0, 0.2]),
        yaw_rate_cmd=0.5,
        yaw_rate=0.5,
        v_z=0.0,
        omega_xy=np.zeros(2),
        gravity_xy=np.zeros(2),
        joint_accels=np.zeros(12),
        body_height=0.38,
        foot_heights=np.full(4, 0.2),
        foot_xy_speeds=np.zeros(4),
        a_t=np.zeros(12),
        a_prev=np.zeros(12),
        a_prev2=np.zeros(12),
        terminated=False,
    )
    fields.update(overrides)
    return RewardSnapshot(**fields)


class TestNominalRewards:
    def test_perfect_tracking_terms(self):
        terms = nominal_rewards(perfect_snapshot(), W)
        assert terms["lin_vel_tracking"] == pytest.approx(1.0, rel=1e-12)
        assert terms["ang_vel_tracking"] == pytest.approx(0.5, rel=1e-12)
        assert terms["nominal_total"] == pytest.approx(1.5, rel=1e-12)

    def test_tracking_error_hand_value(self):
        # ||dv||^2 = 0.25 -> exp(-0.25/0.25) = e^-1
        snap = perfect_snapshot(v_xy=np.array([1.5, 0.2]))
        terms = nominal_rewards(snap, W)
        assert terms["lin_vel_tracking"] == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_body_height_zero_at_target(self):
        terms = nominal_rewards(perfect_snapshot(body_height=0.38), W)
        assert terms["body_height"] == 0.0

    def test_body_height_penalty(self):
        terms = nominal_rewards(perfect_snapshot(body_height=0.28), W)
        assert terms["body_height"] == pytest.approx(-1.0 * 0.01, rel=1e-12)

    def test_termination_penalty(self):
        terms = nominal_rewards(perfect_snapshot(terminated=True), W)
        assert terms["termination"] == -200.0

    def test_foot_clearance(self):
        snap = perfect_snapshot(foot_heights=np.array([0.1, 0.2, 0.2, 0.2]),
                                foot_xy_speeds=np.array([2.0, 1.0, 1.0, 1.0]))
        terms = nominal_rewards(snap, W)
        assert terms["foot_clearance"] == pytest.approx(-0.01 * (0.1 ** 2) * 2.0,
                                                        rel=1e-12)

    def test_action_rate_and_smoothness(self):
        snap = perfect_snapshot(a_t=np.full(12, 0.2), a_prev=np.full(12, 0.1),
                                a_prev2=np.full(12, 0.1))
        terms = nominal_rewards(snap, W)
        assert terms["action_rate"] == pytest.approx(-0.01 * 12 * 0.01, rel=1e-12)
        assert terms["smoothness"] == pytest.approx(-0.01 * 12 * 0.01, rel=1e-12)

    def test_foot_permutation_invariance(self):
        rng = np.random.default_rng(5)
        heights = rng.uniform(0, 0.25, 4)
        speeds = rng.uniform(0, 2, 4)
        perm = np.array([2, 0, 3, 1])
        t1 = nominal_rewards(perfect_snapshot(
            foot_heights=heights, foot_xy_speeds=speeds), W)
        t2 = nominal_rewards(perfect_snapshot(
            foot_heights=heights[perm], foot_xy_speeds=speeds[perm]), W)
        assert t1["foot_clearance"] == pytest.approx(t2["foot_clearance"], rel=1e-12)

    def test_batched_matches_scalar(self):
        rng = np.random.default_rng(9)
        snaps = [perfect_snapshot(
            v_xy=rng.uniform(-1, 1, 2), joint_accels=rng.uniform(-5, 5, 12))
            for _ in range(3)]
        batch = RewardSnapshot(
            **{name: np.stack([getattr(s, name) for s in snaps])
               if isinstance(getattr(snaps[0], name), np.ndarray)
               else np.array([getattr(s, name) for s in snaps])
               for name in ("v_cmd_xy", "v_xy", "yaw_rate_cmd", "yaw_rate", "v_z",
                            "omega_xy", "gravity_xy", "joint_accels", "body_height",
                            "foot_heights", "foot_xy_speeds", "a_t", "a_prev",
                            "a_prev2", "terminated")})
        batch_terms = nominal_rewards(batch, W)
        for k, s in enumerate(snaps):
            scalar_terms = nominal_rewards(s, W)
            for name, val in scalar_terms.items():
                assert batch_terms[name][k] == pytest.approx(float(val), rel=1e-12)


class TestThermalWeight:
    def test_threshold_point(self):
        assert thermal_weight(60.0, W, "smooth") == pytest.approx(1.0, rel=1e-12)
        assert thermal_weight(60.0, W, "literal") == pytest.approx(1.0, rel=1e-12)

    def test_smooth_cold_value(self):
        assert thermal_weight(30.0, W, "smooth") == pytest.approx(
            np.exp(-10.5), rel=1e-12)

    def test_literal_cold_is_one(self):
        assert thermal_weight(30.0, W, "literal") == 1.0

    def test_hot_value_both_modes(self):
        for mode in ("smooth", "literal"):
            assert thermal_weight(65.0, W, mode) == pytest.approx(
                np.exp(1.75), rel=1e-12)

    @given(st.floats(min_value=-10, max_value=120))
    def test_modes_agree_above_threshold(self, t):
        s = thermal_weight(t, W, "smooth")
        lit = thermal_weight(t, W, "literal")
        if t >= 60.0:
            assert s == pytest.approx(lit, rel=1e-12)
        else:
            assert s <= lit

    @settings(max_examples=50)
    @given(st.floats(min_value=-10, max_value=119))
    def test_smooth_strictly_increasing(self, t):
        assert thermal_weight(t + 0.5, W, "smooth") > thermal_weight(t, W, "smooth")


class TestThermalReward:
    def _inp(self, temps, rates):
        return ThermalRewardInput(temps=np.asarray(temps, float),
                                  temp_rates=np.asarray(rates, float))

    def test_zero_rates(self):
        inp = self._inp(np.full(12, 55.0), np.zeros(12))
        assert thermal_reward(inp, W) == 0.0

    def test_hot_heating_hand_value(self):
        temps = np.full(12, 20.0)
        rates = np.zeros(12)
        temps[4] = 60.0
        rates[4] = 0.1
        r = thermal_reward(self._inp(temps, rates), W, "smooth")
        # cold motors contribute ~0; the hot one contributes -1000*0.1*1
        assert r == pytest.approx(-100.0, rel=1e-6)

    def test_hot_cooling_rewarded(self):
        temps = np.full(12, 20.0)
        rates = np.zeros(12)
        temps[4] = 60.0
        rates[4] = -0.1
        r = thermal_reward(self._inp(temps, rates), W, "smooth")
        assert r == pytest.approx(100.0, rel=1e-6)

    @given(st.floats(min_value=0.1, max_value=5.0))
    def test_linear_in_rates(self, alpha):
        rng = np.random.default_rng(2)
        temps = rng.uniform(30, 70, 12)
        rates = rng.uniform(-0.5, 0.5, 12)
        base = thermal_reward(self._inp(temps, rates), W)
        scaled = thermal_reward(self._inp(temps, alpha * rates), W)
        assert scaled == pytest.approx(alpha * base, rel=1e-9)


class TestRegularization:
    def test_zero(self):
        assert regularization_reward(np.zeros(12), W) == 0.0

    def test_hand_value(self):
        r = regularization_reward(np.full(12, 0.1), W)
        assert r == pytest.approx(-0.012, abs=1e-15)

    def test_quadratic(self):
        a = np.random.default_rng(3).uniform(-1, 1, 12)
        assert regularization_reward(2 * a, W) == pytest.approx(
            4 * regularization_reward(a, W), rel=1e-12)


class TestResidualTotal:
    def test_perfect_standing(self):
        inp = ThermalRewardInput(temps=np.full(12, 30.0), temp_rates=np.zeros(12))
        terms = residual_total(perfect_snapshot(), inp, np.zeros(12), W)
        assert terms["total"] == pytest.approx(1.5, rel=1e-12)

    def test_hot_heating_dominates(self):
        temps = np.full(12, 30.0)
        rates = np.zeros(12)
        temps[0] = 60.0
        rates[0] = 0.1
        inp = ThermalRewardInput(temps=temps, temp_rates=rates)
        terms = residual_total(perfect_snapshot(), inp, np.zeros(12), W)
        assert terms["total"] == pytest.approx(1.5 - 100.0, rel=1e-6)
        # |R_th| >= 100 vs max task reward 1.5: safety dominates the stack.
        assert abs(terms["thermal_safety"]) >= 100.0 * (1 - 1e-6)

    def test_breakdown_sums_exactly(self):
        rng = np.random.default_rng(4)
        snap = perfect_snapshot(
            v_xy=rng.uniform(-2, 2, 2), joint_accels=rng.uniform(-9, 9, 12),
            a_t=rng.uniform(-1, 1, 12), a_prev=rng.uniform(-1, 1, 12),
            a_prev2=rng.uniform(-1, 1, 12))
        inp = ThermalRewardInput(temps=rng.uniform(20, 70, 12),
                                 temp_rates=rng.uniform(-0.3, 0.3, 12))
        a_res = rng.uniform(-1, 1, 12)
        terms = residual_total(snap, inp, a_res, W)
        partial = terms["nominal_total"] + terms["thermal_safety"] + terms["residual_reg"]
        assert terms["total"] == partial  # bitwise: same summation
