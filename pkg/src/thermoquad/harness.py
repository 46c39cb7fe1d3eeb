"""Batched, seeded, long-horizon thermal locomotion experiments.

The plant is deliberately simple: achieved planar velocity follows the
(possibly governor-modulated) command through a first-order lag with a
small speed deficit, joints follow their targets through a first-order
lag at the PD rate, and joint torques are PD tracking torque plus the
proxy's affine load law. What matters here is heat-input fidelity, not
gait dynamics.

Everything is a pure function of (seed, config): per-agent RNG streams are
derived from the master seed and the agent index alone, and the vectorized
batch core uses fixed-order accumulation everywhere, so a batch produces
bit-identical per-agent results no matter how agents are chunked across
workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import (
    AMBIENT_INDEX,
    COMPUTER_INDEX,
    MOTOR_COUNT,
    OutcomeThresholds,
    RandomizationRanges,
    SimConfig,
)
from .control import JOINT_COUNT, compose_actions, scale_action
from .errors import ConfigError, IncompleteRecord
from .heat import heat_vector_from_aggregates, motor_param_arrays
from .proxy import (
    gait_proxy_step,
    governor_modulate,
    load_torques,
    planar_speed,
    stride_frequency,
)
from .rewards import (
    COMPOSITE_TERMS,
    NOMINAL_TERMS,
    RewardSnapshot,
    ThermalRewardInput,
    residual_total,
)
from .thermal import ModelCache, ThermalNetwork, build_network

MODES = ("nominal_only", "governed")

OUTCOME_SUCCESS = "success"
OUTCOME_OVERHEATED = "overheated"
OUTCOME_DRIFTING = "drifting"
OUTCOME_FAILED = "failed"
OUTCOME_STUCK = "stuck"
# Precedence when several labels apply.
OUTCOME_ORDER = (OUTCOME_OVERHEATED, OUTCOME_FAILED, OUTCOME_STUCK,
                 OUTCOME_DRIFTING, OUTCOME_SUCCESS)

REWARD_KEYS = NOMINAL_TERMS + COMPOSITE_TERMS


@dataclass
class AgentSetup:
    """Per-agent randomized physical scenario."""

    payload_mass: float  # kg
    com_shift: np.ndarray  # (3,) m
    external_force: np.ndarray  # (3,) N
    ambient_temp: float  # degC
    initial_motor_temps: np.ndarray  # (12,) degC
    seed: int


@dataclass
class CommandProfile:
    """Piecewise-constant velocity command: (duration_s, v_x, v_y, yaw_rate)."""

    segments: list[tuple[float, float, float, float]]

    def total_duration(self) -> float:
        return sum(s[0] for s in self.segments)


def agent_rng(master_seed: int, agent_index: int) -> np.random.Generator:
    """Counter-style per-agent stream; independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, agent_index]))


def sample_setup(
    seed: int | np.random.Generator,
    ranges: RandomizationRanges,
    payload_range: tuple[float, float] | None = None,
    initial_temp_range: tuple[float, float] | None = None,
    ambient_range: tuple[float, float] | None = None,
    force_range: tuple[float, float] | None = None,
) -> AgentSetup:
    """Uniformly sample one agent scenario; deterministic per seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    payload_range = payload_range or ranges.payload_kg
    initial_temp_range = initial_temp_range or ranges.initial_motor_temp_c
    ambient_range = ambient_range or ranges.ambient_c
    force_range = force_range or ranges.external_force_n
    payload = float(rng.uniform(*payload_range))
    com = rng.uniform(ranges.com_shift_m[0], ranges.com_shift_m[1], size=3)
    force = rng.uniform(force_range[0], force_range[1], size=3)
    ambient = float(rng.uniform(*ambient_range))
    temps = rng.uniform(initial_temp_range[0], initial_temp_range[1],
                        size=MOTOR_COUNT)
    seed_val = int(seed) if not isinstance(seed, np.random.Generator) else -1
    return AgentSetup(payload_mass=payload, com_shift=com, external_force=force,
                      ambient_temp=ambient, initial_motor_temps=temps,
                      seed=seed_val)


def sample_command_profile(
    rng: np.random.Generator, duration: float, config: SimConfig
) -> CommandProfile:
    """Segments of ``segment_s`` with uniformly resampled commands; the last
    segment is truncated so the durations sum to ``duration`` exactly."""
    c = config.commands
    segments = []
    remaining = duration
    while remaining > 1e-9:
        seg = min(c.segment_s, remaining)
        vx = float(rng.uniform(*c.vx_mps))
        vy = float(rng.uniform(*c.vy_mps))
        yaw = float(rng.uniform(*c.yaw_rate_radps))
        segments.append((seg, vx, vy, yaw))
        remaining -= seg
    return CommandProfile(segments=segments)


def constant_profile(duration: float, vx: float, vy: float = 0.0,
                     yaw: float = 0.0) -> CommandProfile:
    return CommandProfile(segments=[(duration, vx, vy, yaw)])


@dataclass
class SimContext:
    """Per-config precomputed quantities shared by every agent."""

    config: SimConfig
    net: ThermalNetwork
    cache: ModelCache
    A_stack: np.ndarray  # (buckets, nodes, nodes)
    B_stack: np.ndarray
    motor_params: dict[str, np.ndarray]
    theta0: np.ndarray  # (12,)
    dt: float
    substep_dt: float
    cmd_alpha: float  # first-order lag blend per policy step
    joint_lam: float  # first-order lag blend per substep
    n_buckets: int


def build_context(config: SimConfig, v_max: float | None = None) -> SimContext:
    net = build_network(config)
    rates = config.rates
    dt = rates.policy_dt
    cache = ModelCache(net, dt, config.bucket_width_mps, mode=config.discretization)
    if v_max is None:
        v_max = float(np.hypot(max(abs(config.commands.vx_mps[0]),
                                   abs(config.commands.vx_mps[1])),
                               max(abs(config.commands.vy_mps[0]),
                                   abs(config.commands.vy_mps[1])))) + 0.5
    A_stack, B_stack = cache.stacked(v_max)
    theta0 = np.tile(np.asarray(config.proxy.default_pose_rad, float), 4)
    return SimContext(
        config=config,
        net=net,
        cache=cache,
        A_stack=A_stack,
        B_stack=B_stack,
        motor_params=motor_param_arrays(config.electrical),
        theta0=theta0,
        dt=dt,
        substep_dt=rates.substep_dt,
        cmd_alpha=1.0 - float(np.exp(-dt / config.plant.command_lag_s)),
        joint_lam=1.0 - float(np.exp(-rates.substep_dt / config.plant.joint_lag_s)),
        n_buckets=A_stack.shape[0],
    )


@dataclass
class BatchStepOutput:
    """Copies of everything one policy step produced, for logging."""

    t: float
    temps: np.ndarray  # (n, 14) after the step
    temp_rates: np.ndarray  # (n, 12)
    cmd: np.ndarray  # (n, 3) raw command
    cmd_mod: np.ndarray  # (n, 3) executed command
    v_achieved: np.ndarray  # (n, 3) planar velocity + yaw rate
    pos: np.ndarray  # (n, 2) world position
    pos_intended: np.ndarray  # (n, 2) commanded track
    intended_dir: np.ndarray  # (n, 2) unit direction of the commanded track
    a_nom: np.ndarray  # (n, 12) policy units
    a_res: np.ndarray  # (n, 12) policy units
    heat: np.ndarray  # (n, 14) W
    clip_count: np.ndarray  # (n,)
    rewards: dict[str, np.ndarray]
    tracking_err: np.ndarray  # (n,)
    engagement: np.ndarray  # (n,) governor weight w


class BatchSim:
    """Vectorized incremental simulator for a batch of independent agents.

    ``mode`` selects how actions are produced:

    * ``nominal_only``: proxy actions, zero residual, raw command.
    * ``governed``: proxy actions + scripted thermal governor.
    * external actions may be injected per step (adapter use), replacing
      the proxy nominal action and/or supplying the residual; no command
      modulation is applied in that case.
    """

    def __init__(
        self,
        ctx: SimContext,
        setups: list[AgentSetup],
        profiles: list[CommandProfile],
        mode: str = "nominal_only",
        terrain_factor: float = 1.0,
        zero_heat: bool = False,
    ):
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
        if len(setups) != len(profiles):
            raise ConfigError("setups and profiles must have equal length")
        self.ctx = ctx
        self.mode = mode
        self.terrain_factor = terrain_factor
        self.zero_heat = zero_heat
        n = len(setups)
        self.n = n

        self.payload = np.array([s.payload_mass for s in setups])
        self.com_shift = np.stack([np.asarray(s.com_shift, float) for s in setups])
        self.force = np.stack([np.asarray(s.external_force, float) for s in setups])
        self.ambient = np.array([s.ambient_temp for s in setups])

        self.temps = np.empty((n, ctx.net.n))
        for k, s in enumerate(setups):
            self.temps[k, :MOTOR_COUNT] = s.initial_motor_temps
            self.temps[k, COMPUTER_INDEX] = s.ambient_temp
            self.temps[k, AMBIENT_INDEX] = s.ambient_temp

        max_segs = max(len(p.segments) for p in profiles)
        self.seg_cmds = np.zeros((n, max_segs, 3))
        self.seg_ends = np.full((n, max_segs), np.inf)
        self.seg_count = np.array([len(p.segments) for p in profiles])
        for k, p in enumerate(profiles):
            t_end = 0.0
            for si, (dur, vx, vy, yaw) in enumerate(p.segments):
                t_end += dur
                self.seg_cmds[k, si] = (vx, vy, yaw)
                self.seg_ends[k, si] = t_end
        self.seg_idx = np.zeros(n, dtype=int)

        self.phase = np.zeros(n)
        self.v_ach = np.zeros((n, 2))
        self.yaw_ach = np.zeros(n)
        self.heading = np.zeros(n)
        self.pos = np.zeros((n, 2))
        self.heading_int = np.zeros(n)
        self.pos_int = np.zeros((n, 2))
        self.intended_dir = np.tile(np.array([1.0, 0.0]), (n, 1))
        self.theta = np.tile(ctx.theta0, (n, 1))
        self.joint_vel = np.zeros((n, JOINT_COUNT))
        self.a_nom_prev = np.zeros((n, JOINT_COUNT))
        self.a_res_prev = np.zeros((n, JOINT_COUNT))
        self.a_res_prev2 = np.zeros((n, JOINT_COUNT))
        self.step_index = 0
        self._rows = np.arange(n)

    @property
    def time(self) -> float:
        return self.step_index * self.ctx.dt

    def current_command(self) -> np.ndarray:
        t = self.time
        idx = self.seg_idx
        # Advance segment pointers past any expired boundaries.
        while True:
            expired = (t >= self.seg_ends[self._rows, idx]) & (idx < self.seg_count - 1)
            if not np.any(expired):
                break
            idx = idx + expired.astype(int)
        self.seg_idx = idx
        return self.seg_cmds[self._rows, idx]

    def motor_temps(self) -> np.ndarray:
        return self.temps[:, :MOTOR_COUNT]

    def step(
        self,
        a_nom_external: np.ndarray | None = None,
        a_res_external: np.ndarray | None = None,
    ) -> BatchStepOutput:
        ctx = self.ctx
        cfg = ctx.config
        n = self.n
        dt = ctx.dt
        t = self.time
        cmd = self.current_command()

        out = gait_proxy_step(
            cmd, self.phase, cfg.proxy, self.payload, self.force, self.com_shift,
            terrain_factor=self.terrain_factor,
            action_scale_rad=cfg.action.scale_rad_per_unit,
        )
        a_nom = out.a_nom if a_nom_external is None else np.asarray(a_nom_external, float)

        if self.mode == "governed" and a_res_external is None:
            a_res, cmd_mod, w = governor_modulate(
                cmd, a_nom, self.motor_temps(), cfg.governor, cfg.rewards)
            amp_f = (1.0 - cfg.governor.max_amplitude_reduction * w)[:, None]
            # The amplitude reduction doubles as posture efficiency: the
            # residual sheds load torque without giving up command speed.
            loads = load_torques(cmd_mod, cfg.proxy, self.payload, self.force,
                                 self.com_shift, self.terrain_factor) \
                * (1.0 - cfg.governor.load_relief_gain * w)[:, None]
            speed_mod = planar_speed(cmd_mod)
            foot_heights = out.foot_heights * amp_f[:, :1]
            foot_speeds = 2.0 * speed_mod[:, None] * out.swing_lift
            joint_vel_traj = out.joint_velocities * amp_f
        else:
            a_res = (np.zeros((n, JOINT_COUNT)) if a_res_external is None
                     else np.asarray(a_res_external, float))
            cmd_mod = cmd
            w = np.zeros(n)
            loads = out.load_torques
            speed_mod = planar_speed(cmd)
            foot_heights = out.foot_heights
            foot_speeds = out.foot_xy_speeds
            joint_vel_traj = out.joint_velocities

        # Plant velocity: first-order lag toward the executed command with a
        # configured speed deficit.
        target_xy = cmd_mod[:, :2] * (1.0 - cfg.plant.speed_deficit)
        self.v_ach = self.v_ach + ctx.cmd_alpha * (target_xy - self.v_ach)
        self.yaw_ach = self.yaw_ach + ctx.cmd_alpha * (cmd_mod[:, 2] - self.yaw_ach)

        # Joint targets and the 200 Hz PD window.
        theta_target, clipped_target = compose_actions(
            ctx.theta0,
            scale_action(a_nom, cfg.action),
            scale_action(a_res, cfg.action),
            joint_limit=cfg.action.joint_limit_rad,
        )

        gains = cfg.pd
        tau_lim = gains.torque_limit_nm
        lam = ctx.joint_lam
        tau_sq_acc = np.zeros((n, JOINT_COUNT))
        speed_acc = np.zeros((n, JOINT_COUNT))
        clip_acc = np.sum(clipped_target, axis=-1).astype(float)
        theta = self.theta
        thetadot = self.joint_vel
        for _ in range(cfg.rates.pd_substeps):
            err = theta_target - theta
            thetadot = err / cfg.plant.joint_lag_s + joint_vel_traj
            tau_pd = gains.kp * err - gains.kd * thetadot
            tau_total = tau_pd + loads
            over = np.abs(tau_total) > tau_lim
            tau_total = np.clip(tau_total, -tau_lim, tau_lim)
            clip_acc += np.sum(over, axis=-1)
            tau_sq_acc += tau_total * tau_total
            speed_acc += np.abs(thetadot)
            theta = theta + err * lam
        substeps = float(cfg.rates.pd_substeps)
        tau_rms = np.sqrt(tau_sq_acc / substeps)
        mean_speed = speed_acc / substeps

        heat = heat_vector_from_aggregates(
            tau_rms, mean_speed, ctx.motor_params, cfg.computer_power_w,
            n_nodes=ctx.net.n, computer_index=COMPUTER_INDEX)
        if self.zero_heat:
            heat = heat * 0.0

        # Thermal step with the velocity bucket of the achieved planar speed.
        speed_ach = np.sqrt(self.v_ach[:, 0] ** 2 + self.v_ach[:, 1] ** 2)
        buckets = np.minimum(
            (speed_ach / ctx.cache.bucket_width).astype(int), ctx.n_buckets - 1)
        A_sel = ctx.A_stack[buckets]
        B_sel = ctx.B_stack[buckets]
        temps_next = np.zeros_like(self.temps)
        for j in range(ctx.net.n):
            temps_next += A_sel[:, :, j] * self.temps[:, j:j + 1]
        for j in range(ctx.net.n):
            temps_next += B_sel[:, :, j] * heat[:, j:j + 1]
        temps_next[:, AMBIENT_INDEX] = self.temps[:, AMBIENT_INDEX]
        temp_rates = (temps_next[:, :MOTOR_COUNT] - self.temps[:, :MOTOR_COUNT]) / dt

        # Kinematic tracks (achieved vs commanded).
        self.heading = self.heading + self.yaw_ach * dt
        cos_h, sin_h = np.cos(self.heading), np.sin(self.heading)
        self.pos = self.pos + dt * np.stack(
            [cos_h * self.v_ach[:, 0] - sin_h * self.v_ach[:, 1],
             sin_h * self.v_ach[:, 0] + cos_h * self.v_ach[:, 1]], axis=-1)
        self.heading_int = self.heading_int + cmd[:, 2] * dt
        cos_i, sin_i = np.cos(self.heading_int), np.sin(self.heading_int)
        v_int = np.stack(
            [cos_i * cmd[:, 0] - sin_i * cmd[:, 1],
             sin_i * cmd[:, 0] + cos_i * cmd[:, 1]], axis=-1)
        self.pos_int = self.pos_int + dt * v_int
        v_int_norm = np.sqrt(v_int[:, 0] ** 2 + v_int[:, 1] ** 2)
        moving = v_int_norm > 1e-9
        self.intended_dir[moving] = v_int[moving] / v_int_norm[moving, None]

        tracking_err = np.sqrt(
            (cmd[:, 0] - self.v_ach[:, 0]) ** 2 + (cmd[:, 1] - self.v_ach[:, 1]) ** 2)

        joint_accels = (thetadot - self.joint_vel) / dt
        snap = RewardSnapshot(
            v_cmd_xy=cmd[:, :2],
            v_xy=self.v_ach,
            yaw_rate_cmd=cmd[:, 2],
            yaw_rate=self.yaw_ach,
            v_z=np.zeros(n),
            omega_xy=np.zeros((n, 2)),
            gravity_xy=np.zeros((n, 2)),
            joint_accels=joint_accels,
            body_height=np.full(n, cfg.rewards.h_target_m),
            foot_heights=foot_heights,
            foot_xy_speeds=foot_speeds,
            a_t=a_res,
            a_prev=self.a_res_prev,
            a_prev2=self.a_res_prev2,
            terminated=np.zeros(n, dtype=bool),
        )
        thermal_inp = ThermalRewardInput(
            temps=self.temps[:, :MOTOR_COUNT], temp_rates=temp_rates)
        rewards = residual_total(snap, thermal_inp, a_res, cfg.rewards)

        # Commit state.
        self.temps = temps_next
        self.joint_vel = thetadot
        self.theta = theta
        self.phase = (self.phase + dt * stride_frequency(speed_mod, cfg.proxy)) % 1.0
        self.a_nom_prev = a_nom
        self.a_res_prev2 = self.a_res_prev
        self.a_res_prev = a_res
        self.step_index += 1

        return BatchStepOutput(
            t=t,
            temps=temps_next.copy(),
            temp_rates=temp_rates,
            cmd=cmd.copy(),
            cmd_mod=np.array(cmd_mod, copy=True),
            v_achieved=np.concatenate([self.v_ach, self.yaw_ach[:, None]], axis=-1),
            pos=self.pos.copy(),
            pos_intended=self.pos_int.copy(),
            intended_dir=self.intended_dir.copy(),
            a_nom=np.array(a_nom, copy=True),
            a_res=np.array(a_res, copy=True),
            heat=heat,
            clip_count=clip_acc,
            rewards=rewards,
            tracking_err=tracking_err,
            engagement=w,
        )

    def observe(self, layout: str) -> np.ndarray:
        """Observation batch for the adapter: (n, 45) or (n, 73)."""
        cmd = self.current_command()
        omega = np.concatenate(
            [np.zeros((self.n, 2)), self.yaw_ach[:, None]], axis=-1)
        gravity = np.tile(np.array([0.0, 0.0, -1.0]), (self.n, 1))
        if layout == "nominal":
            parts = [cmd, omega, gravity, self.theta, self.joint_vel,
                     self.a_nom_prev]
        elif layout == "residual":
            parts = [cmd, omega, gravity, self.theta, self.joint_vel,
                     self.motor_temps(),
                     np.zeros((self.n, 16)), self.a_res_prev]
        else:
            raise ConfigError(f"unknown observation layout {layout!r}")
        return np.concatenate(parts, axis=-1)


@dataclass
class AgentStats:
    """Streaming per-agent statistics sufficient for metrics and outcomes."""

    max_motor_temp: np.ndarray
    tracking_err_sum: np.ndarray
    reward_total_sum: np.ndarray
    engagement_sum: np.ndarray
    max_lateral_dev: np.ndarray
    stuck: np.ndarray
    terminated: np.ndarray
    traversal_step: np.ndarray
    steps_counted: np.ndarray


class StatsCollector:
    """Accumulates AgentStats from BatchStepOutput, with optional traversal
    freezing for terrain trials (stats stop at the finish line)."""

    def __init__(self, n: int, initial_motor_temps: np.ndarray, dt: float,
                 thresholds: OutcomeThresholds, track_length: float | None = None):
        self.n = n
        self.dt = dt
        self.thresholds = thresholds
        self.track_length = track_length
        self.stats = AgentStats(
            max_motor_temp=np.max(initial_motor_temps, axis=-1).astype(float),
            tracking_err_sum=np.zeros(n),
            reward_total_sum=np.zeros(n),
            engagement_sum=np.zeros(n),
            max_lateral_dev=np.zeros(n),
            stuck=np.zeros(n, dtype=bool),
            terminated=np.zeros(n, dtype=bool),
            traversal_step=np.full(n, -1, dtype=int),
            steps_counted=np.zeros(n, dtype=int),
        )
        self.window = max(1, int(round(thresholds.stuck_window_s / dt)))
        self.check_every = max(1, self.window // 60)
        self._pos_ring = np.zeros((self.window, n, 2))
        self._speed_ring = np.full((self.window, n), np.inf)
        self._step = 0

    def active_mask(self) -> np.ndarray:
        return self.stats.traversal_step < 0

    def update(self, out: BatchStepOutput) -> None:
        st = self.stats
        active = self.active_mask()
        st.steps_counted[active] += 1
        st.max_motor_temp[active] = np.maximum(
            st.max_motor_temp[active],
            np.max(out.temps[active][:, :MOTOR_COUNT], axis=-1))
        st.tracking_err_sum[active] += out.tracking_err[active]
        st.reward_total_sum[active] += out.rewards["total"][active]
        st.engagement_sum[active] += out.engagement[active]

        d = out.pos - out.pos_intended
        lateral = np.abs(out.intended_dir[:, 0] * d[:, 1]
                         - out.intended_dir[:, 1] * d[:, 0])
        st.max_lateral_dev[active] = np.maximum(st.max_lateral_dev[active],
                                                lateral[active])

        slot = self._step % self.window
        cmd_speed = planar_speed(out.cmd)
        if self._step >= self.window and self._step % self.check_every == 0:
            # slot currently holds the sample from exactly `window` steps ago.
            disp = np.sqrt(np.sum((out.pos - self._pos_ring[slot]) ** 2, axis=-1))
            min_speed = np.min(self._speed_ring, axis=0)
            stuck_now = (
                (disp < self.thresholds.stuck_displacement_m)
                & (min_speed > self.thresholds.stuck_min_cmd_speed_mps)
            )
            st.stuck |= stuck_now & active
        self._pos_ring[slot] = out.pos
        self._speed_ring[slot] = cmd_speed
        self._step += 1

        if self.track_length is not None:
            progress = np.sum(out.pos * out.intended_dir, axis=-1)
            finished = active & (progress >= self.track_length)
            st.traversal_step[finished] = self._step


def classify_from_stats(stats: AgentStats, thresholds: OutcomeThresholds,
                        t_max: float) -> list[str]:
    """Outcome per agent with fixed precedence
    overheated > failed > stuck > drifting > success."""
    outcomes = []
    for k in range(len(stats.max_motor_temp)):
        if stats.max_motor_temp[k] > t_max:
            outcomes.append(OUTCOME_OVERHEATED)
        elif stats.terminated[k]:
            outcomes.append(OUTCOME_FAILED)
        elif stats.stuck[k]:
            outcomes.append(OUTCOME_STUCK)
        elif stats.max_lateral_dev[k] > thresholds.drift_threshold_m:
            outcomes.append(OUTCOME_DRIFTING)
        else:
            outcomes.append(OUTCOME_SUCCESS)
    return outcomes


@dataclass
class EpisodeRecord:
    """Full 50 Hz time series of one agent's episode."""

    time: np.ndarray  # (T,)
    temps: np.ndarray  # (T, 14)
    cmd: np.ndarray  # (T, 3)
    cmd_mod: np.ndarray  # (T, 3)
    v_achieved: np.ndarray  # (T, 3)
    pos: np.ndarray  # (T, 2)
    pos_intended: np.ndarray  # (T, 2)
    intended_dir: np.ndarray  # (T, 2)
    a_nom: np.ndarray  # (T, 12)
    a_res: np.ndarray  # (T, 12)
    heat: np.ndarray  # (T, 14)
    clip_count: np.ndarray  # (T,)
    rewards: dict[str, np.ndarray]  # name -> (T,)
    tracking_err: np.ndarray  # (T,)
    engagement: np.ndarray  # (T,)
    terminated: bool = False
    meta: dict = field(default_factory=dict)

    def validate(self) -> None:
        T = self.time.shape[0]
        if T == 0:
            raise IncompleteRecord("record has no steps")
        series = [self.temps, self.cmd, self.cmd_mod, self.v_achieved, self.pos,
                  self.pos_intended, self.intended_dir, self.a_nom, self.a_res,
                  self.heat, self.clip_count, self.tracking_err, self.engagement]
        for arr in series:
            if arr.shape[0] != T:
                raise IncompleteRecord("series lengths differ")
        for name in REWARD_KEYS:
            if name not in self.rewards or self.rewards[name].shape[0] != T:
                raise IncompleteRecord(f"reward series {name!r} missing or short")
        if np.any(np.diff(self.time) <= 0):
            raise IncompleteRecord("timestamps must be strictly increasing")


def record_stats(rec: EpisodeRecord, thresholds: OutcomeThresholds,
                 dt: float) -> AgentStats:
    """Reduce a record to the same statistics the streaming collector keeps."""
    rec.validate()
    T = rec.time.shape[0]
    max_temp = float(np.max(rec.temps[:, :MOTOR_COUNT]))
    if "initial_max_motor_temp" in rec.meta:
        max_temp = max(max_temp, float(rec.meta["initial_max_motor_temp"]))
    d = rec.pos - rec.pos_intended
    lateral = np.abs(rec.intended_dir[:, 0] * d[:, 1]
                     - rec.intended_dir[:, 1] * d[:, 0])
    window = max(1, int(round(thresholds.stuck_window_s / dt)))
    check_every = max(1, window // 60)
    stuck = False
    cmd_speed = planar_speed(rec.cmd)
    for t in range(window, T, check_every):
        disp = float(np.sqrt(np.sum((rec.pos[t] - rec.pos[t - window]) ** 2)))
        min_speed = float(np.min(cmd_speed[t - window:t]))
        if (disp < thresholds.stuck_displacement_m
                and min_speed > thresholds.stuck_min_cmd_speed_mps):
            stuck = True
            break
    return AgentStats(
        max_motor_temp=np.array([max_temp]),
        tracking_err_sum=np.array([float(np.sum(rec.tracking_err))]),
        reward_total_sum=np.array([float(np.sum(rec.rewards["total"]))]),
        engagement_sum=np.array([float(np.sum(rec.engagement))]),
        max_lateral_dev=np.array([float(np.max(lateral))]),
        stuck=np.array([stuck]),
        terminated=np.array([rec.terminated]),
        traversal_step=np.array([-1]),
        steps_counted=np.array([T]),
    )


def classify_outcome(rec: EpisodeRecord, thresholds: OutcomeThresholds,
                     t_max: float = 60.0, dt: float = 0.02) -> str:
    """Single-label outcome of an episode record."""
    stats = record_stats(rec, thresholds, dt)
    return classify_from_stats(stats, thresholds, t_max)[0]


def run_episode(
    setup: AgentSetup,
    profile: CommandProfile,
    mode: str,
    config: SimConfig,
    ctx: SimContext | None = None,
    terrain_factor: float = 1.0,
    zero_heat: bool = False,
    duration: float | None = None,
) -> EpisodeRecord:
    """Run one agent for the profile duration and keep the full trace.

    A single episode is a batch of one: the arithmetic is identical to the
    same agent running inside any larger batch.
    """
    ctx = ctx or build_context(config)
    sim = BatchSim(ctx, [setup], [profile], mode=mode,
                   terrain_factor=terrain_factor, zero_heat=zero_heat)
    duration = duration if duration is not None else profile.total_duration()
    n_steps = int(round(duration / ctx.dt))
    cols: dict[str, list] = {k: [] for k in (
        "time", "temps", "cmd", "cmd_mod", "v_achieved", "pos", "pos_intended",
        "intended_dir", "a_nom", "a_res", "heat", "clip_count", "tracking_err",
        "engagement")}
    rew: dict[str, list] = {k: [] for k in REWARD_KEYS}
    for _ in range(n_steps):
        out = sim.step()
        cols["time"].append(out.t)
        cols["temps"].append(out.temps[0])
        cols["cmd"].append(out.cmd[0])
        cols["cmd_mod"].append(out.cmd_mod[0])
        cols["v_achieved"].append(out.v_achieved[0])
        cols["pos"].append(out.pos[0])
        cols["pos_intended"].append(out.pos_intended[0])
        cols["intended_dir"].append(out.intended_dir[0])
        cols["a_nom"].append(out.a_nom[0])
        cols["a_res"].append(out.a_res[0])
        cols["heat"].append(out.heat[0])
        cols["clip_count"].append(out.clip_count[0])
        cols["tracking_err"].append(out.tracking_err[0])
        cols["engagement"].append(out.engagement[0])
        for k in REWARD_KEYS:
            rew[k].append(float(np.asarray(out.rewards[k]).reshape(-1)[0]))
    rec = EpisodeRecord(
        time=np.array(cols["time"]),
        temps=np.stack(cols["temps"]),
        cmd=np.stack(cols["cmd"]),
        cmd_mod=np.stack(cols["cmd_mod"]),
        v_achieved=np.stack(cols["v_achieved"]),
        pos=np.stack(cols["pos"]),
        pos_intended=np.stack(cols["pos_intended"]),
        intended_dir=np.stack(cols["intended_dir"]),
        a_nom=np.stack(cols["a_nom"]),
        a_res=np.stack(cols["a_res"]),
        heat=np.stack(cols["heat"]),
        clip_count=np.array(cols["clip_count"]),
        rewards={k: np.array(v) for k, v in rew.items()},
        tracking_err=np.array(cols["tracking_err"]),
        engagement=np.array(cols["engagement"]),
        meta={
            "mode": mode,
            "seed": setup.seed,
            "initial_max_motor_temp": float(np.max(setup.initial_motor_temps)),
        },
    )
    return rec


def _long_horizon_chunk(args) -> dict:
    (config, mode, seed, agent_lo, agent_hi, duration, payload_range,
     initial_temp_range, zero_heat, trace_agents) = args
    ctx = build_context(config)
    setups, profiles = [], []
    for idx in range(agent_lo, agent_hi):
        rng = agent_rng(seed, idx)
        setups.append(sample_setup(
            rng, config.randomization,
            payload_range=payload_range or config.long_horizon.payload_kg,
            initial_temp_range=(initial_temp_range
                                or config.long_horizon.initial_motor_temp_c)))
        profiles.append(sample_command_profile(rng, duration, config))
    sim = BatchSim(ctx, setups, profiles, mode=mode, zero_heat=zero_heat)
    init_temps = np.stack([s.initial_motor_temps for s in setups])
    collector = StatsCollector(len(setups), init_temps, ctx.dt, config.outcomes)
    n_steps = int(round(duration / ctx.dt))
    traces = {idx: [] for idx in range(agent_lo, agent_hi) if idx < trace_agents}
    for _ in range(n_steps):
        out = sim.step()
        collector.update(out)
        for idx in traces:
            traces[idx].append(_trace_row(out, idx - agent_lo))
    st = collector.stats
    outcomes = classify_from_stats(st, config.outcomes, config.rewards.t_max_c)
    agents = []
    for k, idx in enumerate(range(agent_lo, agent_hi)):
        steps = max(int(st.steps_counted[k]), 1)
        agents.append({
            "agent": idx,
            "payload_kg": float(setups[k].payload_mass),
            "ambient_c": float(setups[k].ambient_temp),
            "initial_max_temp_c": float(np.max(setups[k].initial_motor_temps)),
            "tracking_error": float(st.tracking_err_sum[k]) / steps,
            "max_motor_temp_c": float(st.max_motor_temp[k]),
            "overheated": bool(st.max_motor_temp[k] > config.rewards.t_max_c),
            "outcome": outcomes[k],
            "mean_reward_total": float(st.reward_total_sum[k]) / steps,
            "mean_engagement": float(st.engagement_sum[k]) / steps,
        })
    return {"agents": agents, "traces": traces}


def _trace_row(out: BatchStepOutput, k: int) -> dict:
    row = {
        "t": out.t,
        "temps": out.temps[k],
        "cmd": out.cmd[k],
        "cmd_mod": out.cmd_mod[k],
        "v_achieved": out.v_achieved[k],
        "pos": out.pos[k],
        "pos_intended": out.pos_intended[k],
        "a_nom": out.a_nom[k],
        "a_res": out.a_res[k],
        "heat": out.heat[k],
        "clip_count": out.clip_count[k],
        "tracking_err": out.tracking_err[k],
        "engagement": out.engagement[k],
        "rewards": {name: float(np.asarray(val).reshape(-1)[k])
                    for name, val in out.rewards.items()},
    }
    return row


def long_horizon_experiment(
    n_agents: int,
    duration: float,
    mode: str,
    seed: int,
    config: SimConfig,
    workers: int = 1,
    payload_range: tuple[float, float] | None = None,
    initial_temp_range: tuple[float, float] | None = None,
    zero_heat: bool = False,
    trace_agents: int = 0,
) -> dict:
    """Randomized batch of independent agents; returns the metrics table.

    Results are bit-identical for any worker count: agents depend only on
    (seed, agent index) and aggregation happens in agent order.
    """
    if n_agents < 1:
        raise ConfigError("n_agents must be >= 1")
    chunks = _split_chunks(n_agents, workers)
    args = [
        (config, mode, seed, lo, hi, duration, payload_range,
         initial_temp_range, zero_heat, trace_agents)
        for lo, hi in chunks
    ]
    if len(args) == 1 or workers <= 1:
        results = [_long_horizon_chunk(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_long_horizon_chunk, args))
    agents = [row for r in results for row in r["agents"]]
    traces = {}
    for r in results:
        traces.update(r["traces"])
    agg = aggregate_metrics(agents)
    return {
        "scenario": {
            "n_agents": n_agents,
            "duration_s": duration,
            "mode": mode,
            "seed": seed,
            "zero_heat": zero_heat,
        },
        "agents": agents,
        "aggregate": agg,
        "traces": traces,
    }


def aggregate_metrics(agents: list[dict]) -> dict:
    n = len(agents)
    hist = {name: 0 for name in OUTCOME_ORDER}
    for a in agents:
        hist[a["outcome"]] += 1
    return {
        "n_agents": n,
        "overheat_fraction": sum(1 for a in agents if a["overheated"]) / n,
        "mean_tracking_error": float(np.sum([a["tracking_error"] for a in agents]) / n),
        "mean_max_temp_c": float(np.sum([a["max_motor_temp_c"] for a in agents]) / n),
        "outcome_histogram": hist,
    }


def _split_chunks(n: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, n))
    base = n // workers
    rem = n % workers
    chunks = []
    lo = 0
    for w in range(workers):
        hi = lo + base + (1 if w < rem else 0)
        chunks.append((lo, hi))
        lo = hi
    return chunks


TERRAINS = ("stairs", "slope")


def terrain_trial_suite(
    terrain: str,
    n_trials: int,
    mode: str,
    seed: int,
    config: SimConfig,
    initial_temps: tuple[float, ...] | None = None,
    workers: int = 1,
) -> dict:
    """Fixed-command traversal trials over a sloped or staired track.

    The terrain enters as a multiplier on the proxy load-torque law. Trials
    are paired across modes: trial k in nominal_only and governed sees the
    same sampled scenario.
    """
    if terrain not in TERRAINS:
        raise ConfigError(f"terrain must be one of {TERRAINS}")
    tcfg = config.terrain
    factor = tcfg.stairs_factor if terrain == "stairs" else tcfg.slope_factor
    temps_levels = initial_temps or tcfg.initial_temps_c
    levels = []
    terrain_id = TERRAINS.index(terrain)
    for temp_idx, level in enumerate(temps_levels):
        chunks = _split_chunks(n_trials, workers)
        args = [
            (config, mode, seed, terrain_id, temp_idx, float(level), lo, hi, factor)
            for lo, hi in chunks
        ]
        if len(args) == 1 or workers <= 1:
            results = [_terrain_chunk(a) for a in args]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_terrain_chunk, args))
        trials = [row for r in results for row in r]
        hist = {name: 0 for name in OUTCOME_ORDER}
        for t in trials:
            hist[t["outcome"]] += 1
        times = sorted(t["traversal_time_s"] for t in trials
                       if t["traversal_time_s"] is not None
                       and t["outcome"] == OUTCOME_SUCCESS)
        quantiles = {}
        if times:
            arr = np.array(times)
            quantiles = {
                "q10": float(np.quantile(arr, 0.10)),
                "q50": float(np.quantile(arr, 0.50)),
                "q90": float(np.quantile(arr, 0.90)),
            }
        levels.append({
            "initial_temp_c": float(level),
            "n_trials": n_trials,
            "outcome_histogram": hist,
            "outcome_fractions": {k: v / n_trials for k, v in hist.items()},
            "traversal_time_quantiles_s": quantiles,
            "mean_max_temp_c": float(
                np.sum([t["max_motor_temp_c"] for t in trials]) / n_trials),
            "trials": trials,
        })
    return {
        "terrain": terrain,
        "mode": mode,
        "seed": seed,
        "load_factor": factor,
        "levels": levels,
    }


def _terrain_chunk(args) -> list[dict]:
    (config, mode, seed, terrain_id, temp_idx, level, lo, hi, factor) = args
    ctx = build_context(config)
    tcfg = config.terrain
    setups, profiles = [], []
    for trial in range(lo, hi):
        rng = np.random.default_rng(
            np.random.SeedSequence([seed, terrain_id, temp_idx, trial]))
        setup = sample_setup(
            rng, config.randomization,
            payload_range=(tcfg.payload_kg, tcfg.payload_kg),
            initial_temp_range=(level, level),
            ambient_range=tcfg.ambient_c,
            force_range=(0.0, 0.0),
        )
        setups.append(setup)
        profiles.append(constant_profile(tcfg.timeout_s, tcfg.command_vx_mps))
    sim = BatchSim(ctx, setups, profiles, mode=mode, terrain_factor=factor)
    init_temps = np.stack([s.initial_motor_temps for s in setups])
    collector = StatsCollector(len(setups), init_temps, ctx.dt, config.outcomes,
                               track_length=tcfg.horizontal_length_m)
    n_steps = int(round(tcfg.timeout_s / ctx.dt))
    for _ in range(n_steps):
        out = sim.step()
        collector.update(out)
        if not np.any(collector.active_mask()):
            break
    st = collector.stats
    outcomes = classify_from_stats(st, config.outcomes, config.rewards.t_max_c)
    rows = []
    for k, trial in enumerate(range(lo, hi)):
        step = st.traversal_step[k]
        rows.append({
            "trial": trial,
            "initial_temp_c": level,
            "traversal_time_s": float(step * ctx.dt) if step >= 0 else None,
            "max_motor_temp_c": float(st.max_motor_temp[k]),
            "outcome": outcomes[k],
            "max_lateral_dev_m": float(st.max_lateral_dev[k]),
        })
    return rows
