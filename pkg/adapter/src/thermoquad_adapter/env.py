"""Reset/step environment over the thermoquad batch simulator.

The environment binds in-process to the simulator core and exposes the
standard RL surface: ``reset(seeds)`` returns batched observations,
``step(actions)`` advances one 50 Hz cycle and returns observations, the
full per-term reward breakdown, done flags, and an info dict. Actions are
joint-position offsets in policy units (12 per agent).

Two modes:

* ``"residual"``: the internal gait proxy supplies the nominal action and
  the agent's action is the corrective residual (observation length 73,
  including motor temperatures and the terrain latent slot).
* ``"nominal"``: the agent's action replaces the proxy's nominal action
  (observation length 45).

Determinism matches the simulator exactly: agent k of a reset with seed s
reproduces, bit for bit, the trajectory the primary CLI logs for
``simulate --seed s`` when driven with the same action sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from thermoquad import BatchSim, SimConfig, layout_table
from thermoquad.errors import ConfigError, DimensionMismatch
from thermoquad.harness import (
    agent_rng,
    build_context,
    sample_command_profile,
    sample_setup,
)

ACTION_DIM = 12
MODES = ("nominal", "residual")


@dataclass
class StepResult:
    observations: np.ndarray  # (batch, 45 | 73)
    rewards: dict[str, np.ndarray]  # per-term breakdown, each (batch,)
    done: np.ndarray  # (batch,) bool
    info: dict


class ThermalQuadEnv:
    """Vectorized single-process environment handle."""

    def __init__(self, config: SimConfig, batch_size: int = 1,
                 mode: str = "residual", episode_duration_s: float = 20.0):
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        self.config = config
        self.batch_size = batch_size
        self.mode = mode
        self.episode_duration_s = episode_duration_s
        self.termination_temp_c = config.adapter_termination_temp_c
        self._ctx = build_context(config)
        self._sim: BatchSim | None = None
        self._setups = None
        self._done = np.zeros(batch_size, dtype=bool)

    @property
    def observation_dim(self) -> int:
        return 73 if self.mode == "residual" else 45

    @property
    def action_dim(self) -> int:
        return ACTION_DIM

    def layout_descriptor(self) -> list[dict]:
        """Index->field table; identical to the primary's layout export."""
        return layout_table(self.mode)

    def reset(self, seeds) -> tuple[np.ndarray, np.ndarray]:
        """Sample one scenario per seed; returns (observations, motor temps).

        Agent k follows the same stream the primary CLI uses for
        ``--seed seeds[k]``: setup then command profile from one per-seed
        generator.
        """
        seeds = list(seeds)
        if len(seeds) != self.batch_size:
            raise DimensionMismatch(
                f"expected {self.batch_size} seeds, got {len(seeds)}")
        cfg = self.config
        setups, profiles = [], []
        for s in seeds:
            rng = agent_rng(int(s), 0)
            setups.append(sample_setup(
                rng, cfg.randomization,
                payload_range=cfg.long_horizon.payload_kg,
                initial_temp_range=cfg.long_horizon.initial_motor_temp_c))
            profiles.append(sample_command_profile(
                rng, self.episode_duration_s, cfg))
        self._setups = setups
        self._sim = BatchSim(self._ctx, setups, profiles, mode="nominal_only")
        self._done = np.zeros(self.batch_size, dtype=bool)
        obs = self._sim.observe(self.mode)
        temps = self._sim.motor_temps().copy()
        return obs, temps

    def step(self, actions: np.ndarray) -> StepResult:
        """Advance one 50 Hz policy step with the supplied actions."""
        if self._sim is None:
            raise ConfigError("call reset() before step()")
        actions = np.asarray(actions, float)
        if actions.shape != (self.batch_size, ACTION_DIM):
            raise DimensionMismatch(
                f"actions must have shape ({self.batch_size}, {ACTION_DIM}), "
                f"got {actions.shape}")
        if self.mode == "residual":
            out = self._sim.step(a_res_external=actions)
        else:
            out = self._sim.step(a_nom_external=actions)
        temps = out.temps[:, :ACTION_DIM]
        self._done |= np.max(temps, axis=-1) > self.termination_temp_c
        obs = self._sim.observe(self.mode)
        info = {
            "time_s": out.t,
            "reward_terms": list(out.rewards.keys()),
            "motor_temps_c": temps.copy(),
            "tracking_err": out.tracking_err.copy(),
            "command": out.cmd.copy(),
            "heat_w": out.heat.copy(),
        }
        return StepResult(observations=obs, rewards=out.rewards,
                          done=self._done.copy(), info=info)

    def close(self) -> None:
        self._sim = None
