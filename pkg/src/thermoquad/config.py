"""Configuration schema, defaults, and YAML round-trip I/O.

Every physical constant used anywhere in the package lives here; nothing
numeric is hard-coded in the simulation modules. The shipped default
config (``data/default_config.yaml``) describes a 14-node quadruped
thermal network (12 motors, onboard computer, ambient) plus the control,
proxy, governor, and experiment parameters.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .errors import ConfigError

CONFIG_FORMAT = "thermoquad-config-v1"

MOTOR_COUNT = 12
NODE_COUNT = 14
LEG_NAMES = ("FL", "FR", "RL", "RR")
JOINT_NAMES = ("HAA", "HFE", "KFE")
MOTOR_LABELS = tuple(f"{leg}_{joint}" for leg in LEG_NAMES for joint in JOINT_NAMES)
COMPUTER_INDEX = 12
AMBIENT_INDEX = 13


@dataclass
class NodeConfig:
    id: int
    kind: str  # motor | computer | ambient
    label: str
    capacitance_j_per_k: float = 0.0


@dataclass
class EdgeConfig:
    i: int
    j: int
    resistance_k_per_w: float = 0.0  # conduction edges
    conv_base_k_per_w: float = 0.0  # convective edges: R0
    conv_coeff: float = 0.0
    conv_exponent: float = 1.0

    @property
    def convective(self) -> bool:
        return self.conv_base_k_per_w > 0.0


@dataclass
class MotorElectricalParams:
    """Electrical constants turning torque/speed into motor heat."""

    torque_constant_nm_per_a: float = 0.6
    winding_resistance_ohm: float = 0.3
    driver_power_w: float = 2.0
    friction_coeff: float = 0.01  # N*m*s/rad, viscous

    def validate(self) -> None:
        if self.torque_constant_nm_per_a <= 0:
            raise ConfigError("torque_constant_nm_per_a must be > 0")
        if self.winding_resistance_ohm <= 0:
            raise ConfigError("winding_resistance_ohm must be > 0")
        if self.driver_power_w < 0 or self.friction_coeff < 0:
            raise ConfigError("driver_power_w and friction_coeff must be >= 0")


@dataclass
class ElectricalConfig:
    default: MotorElectricalParams = field(default_factory=MotorElectricalParams)
    per_motor: dict[str, MotorElectricalParams] = field(default_factory=dict)

    def for_motor(self, label: str) -> MotorElectricalParams:
        return self.per_motor.get(label, self.default)


@dataclass
class PdGains:
    kp: float = 40.0
    kd: float = 1.0
    torque_limit_nm: float = 33.5


@dataclass
class ActionConfig:
    scale_rad_per_unit: float = 0.25
    clip_units: float = 3.0
    joint_limit_rad: float = 2.6


@dataclass
class PlantConfig:
    """First-order lag plant standing in for rigid-body dynamics."""

    command_lag_s: float = 0.3
    joint_lag_s: float = 0.05
    speed_deficit: float = 0.1  # fraction of commanded speed never achieved


@dataclass
class RatesConfig:
    policy_hz: float = 50.0
    pd_substeps: int = 4

    @property
    def policy_dt(self) -> float:
        return 1.0 / self.policy_hz

    @property
    def substep_dt(self) -> float:
        return self.policy_dt / self.pd_substeps


@dataclass
class GaitProxyParams:
    """Scripted trot generator standing in for the learned locomotion policy."""

    stride_frequency_hz: float = 1.5
    stride_freq_per_mps: float = 0.4
    base_load_torque_nm: float = 0.5
    speed_to_torque_gain: float = 4.2  # N*m per m/s of planar command
    payload_to_torque_gain: float = 0.3  # N*m per kg
    force_to_torque_gain: float = 0.02  # N*m per N of planar disturbance
    com_to_share_gain: float = 2.0  # per m of CoM shift
    swing_amplitude_rad: float = 0.3
    foot_height_per_rad: float = 0.5  # m of foot clearance per rad of swing
    swing_speed_ramp_mps: float = 0.1
    joint_share: tuple[float, float, float] = (0.4, 0.8, 1.0)  # HAA, HFE, KFE
    default_pose_rad: tuple[float, float, float] = (0.0, 0.8, -1.5)


@dataclass
class GovernorParams:
    """Scripted thermal governor standing in for the learned corrective policy.

    Two thermal levers: the swing-amplitude reduction also relieves load
    torque (``load_relief_gain``, standing in for the thermally-efficient
    posture a learned residual adopts) and engages smoothly with the
    thermal weight, while the command cut is an emergency brake that only
    bites near the threshold (``command_cut_exponent`` sharpens it; the cut
    never exceeds max_command_scale_reduction * w).
    """

    max_command_scale_reduction: float = 0.5
    command_cut_exponent: float = 14.0
    max_amplitude_reduction: float = 0.6
    load_relief_gain: float = 0.75  # fraction of load torque shed at w = 1
    yaw_relief_gain: float = 0.6  # rad/s of heading relief at full engagement
    yaw_joint_pattern_scale: float = 0.05  # action units per rad/s of relief


@dataclass
class RewardWeights:
    """Task reward weights plus thermal-safety and regularization constants."""

    lin_vel_tracking: float = 1.0
    ang_vel_tracking: float = 0.5
    lin_vel_z: float = -2.0
    ang_vel_xy: float = -0.05
    orientation: float = -0.2
    joint_accel: float = -2.5e-7
    termination: float = -200.0
    body_height: float = -1.0
    foot_clearance: float = -0.01
    action_rate: float = -0.01
    smoothness: float = -0.01
    sigma_track: float = 0.25
    h_target_m: float = 0.38
    pz_target_m: float = 0.2
    t_max_c: float = 60.0
    sigma_th_per_c: float = 0.35
    w_thermal: float = -1000.0
    w_reg: float = -0.1
    thermal_mode: str = "smooth"  # smooth | literal


@dataclass
class RandomizationRanges:
    payload_kg: tuple[float, float] = (0.0, 5.0)
    com_shift_m: tuple[float, float] = (-0.05, 0.05)
    external_force_n: tuple[float, float] = (-30.0, 30.0)
    ambient_c: tuple[float, float] = (0.0, 35.0)
    initial_motor_temp_c: tuple[float, float] = (35.0, 70.0)


@dataclass
class CommandRanges:
    vx_mps: tuple[float, float] = (-2.0, 2.0)
    vy_mps: tuple[float, float] = (-1.0, 1.0)
    yaw_rate_radps: tuple[float, float] = (-2.0, 2.0)
    segment_s: float = 30.0


@dataclass
class LongHorizonScenario:
    """Batched flat-ground endurance runs with periodic command resampling."""

    duration_s: float = 800.0
    payload_kg: tuple[float, float] = (2.0, 4.0)
    initial_motor_temp_c: tuple[float, float] = (20.0, 20.0)


@dataclass
class TerrainScenario:
    horizontal_length_m: float = 6.0
    payload_kg: float = 3.0
    command_vx_mps: float = 1.0
    initial_temps_c: tuple[float, ...] = (30.0, 50.0, 58.0)
    timeout_s: float = 120.0
    stairs_factor: float = 1.6
    slope_factor: float = 1.4
    stairs_rise_m: float = 0.1
    stairs_run_m: float = 0.3
    slope_angle_deg: float = 20.0
    ambient_c: tuple[float, float] = (20.0, 30.0)


@dataclass
class OutcomeThresholds:
    drift_threshold_m: float = 1.0
    stuck_displacement_m: float = 0.1
    stuck_window_s: float = 30.0
    stuck_min_cmd_speed_mps: float = 0.2


@dataclass
class ReferenceInput:
    """Heat input used by config validation / steady-state reports."""

    per_motor_w: float = 10.0
    computer_w: float = 10.0
    v_xy_mps: float = 0.0


@dataclass
class SimConfig:
    """Top-level configuration aggregating every section."""

    ambient_temp_c: float = 25.0
    bucket_width_mps: float = 0.1
    discretization: str = "exact"  # exact | euler
    nodes: list[NodeConfig] = field(default_factory=list)
    edges: list[EdgeConfig] = field(default_factory=list)
    electrical: ElectricalConfig = field(default_factory=ElectricalConfig)
    computer_power_w: float = 10.0
    pd: PdGains = field(default_factory=PdGains)
    action: ActionConfig = field(default_factory=ActionConfig)
    plant: PlantConfig = field(default_factory=PlantConfig)
    rates: RatesConfig = field(default_factory=RatesConfig)
    proxy: GaitProxyParams = field(default_factory=GaitProxyParams)
    governor: GovernorParams = field(default_factory=GovernorParams)
    rewards: RewardWeights = field(default_factory=RewardWeights)
    randomization: RandomizationRanges = field(default_factory=RandomizationRanges)
    commands: CommandRanges = field(default_factory=CommandRanges)
    long_horizon: LongHorizonScenario = field(default_factory=LongHorizonScenario)
    terrain: TerrainScenario = field(default_factory=TerrainScenario)
    outcomes: OutcomeThresholds = field(default_factory=OutcomeThresholds)
    reference_input: ReferenceInput = field(default_factory=ReferenceInput)
    adapter_termination_temp_c: float = 70.0


def _as_dict(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _as_dict(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, tuple):
        return [_as_dict(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _as_dict(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_as_dict(v) for v in obj]
    return obj


def _build(cls, data, path):
    """Construct dataclass ``cls`` from a plain dict, strictly by field name."""
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        f = fields[name]
        kwargs[name] = _coerce(f.type, value, f"{path}.{name}")
    return cls(**kwargs)


_NESTED = {
    "ElectricalConfig": ElectricalConfig,
    "MotorElectricalParams": MotorElectricalParams,
    "PdGains": PdGains,
    "ActionConfig": ActionConfig,
    "PlantConfig": PlantConfig,
    "RatesConfig": RatesConfig,
    "GaitProxyParams": GaitProxyParams,
    "GovernorParams": GovernorParams,
    "RewardWeights": RewardWeights,
    "RandomizationRanges": RandomizationRanges,
    "CommandRanges": CommandRanges,
    "LongHorizonScenario": LongHorizonScenario,
    "TerrainScenario": TerrainScenario,
    "OutcomeThresholds": OutcomeThresholds,
    "ReferenceInput": ReferenceInput,
    "NodeConfig": NodeConfig,
    "EdgeConfig": EdgeConfig,
}


def _coerce(ftype, value, path):
    ftype = str(ftype)
    if "list[NodeConfig]" in ftype:
        return [_build(NodeConfig, v, f"{path}[{i}]") for i, v in enumerate(value)]
    if "list[EdgeConfig]" in ftype:
        return [_build(EdgeConfig, v, f"{path}[{i}]") for i, v in enumerate(value)]
    if "dict[str, MotorElectricalParams]" in ftype:
        return {
            k: _build(MotorElectricalParams, v, f"{path}.{k}") for k, v in value.items()
        }
    for name, cls in _NESTED.items():
        if ftype == name or ftype.endswith(f".{name}") or ftype == f"<class '{name}'>":
            return _build(cls, value, path)
    if ftype.startswith("tuple"):
        return tuple(value)
    if ftype == "float":
        return float(value)
    if ftype == "int":
        return int(value)
    return value


def config_to_dict(cfg: SimConfig) -> dict:
    out = {"format": CONFIG_FORMAT}
    out.update(_as_dict(cfg))
    return out


def config_from_dict(data: dict) -> SimConfig:
    data = dict(data)
    fmt = data.pop("format", CONFIG_FORMAT)
    if fmt != CONFIG_FORMAT:
        raise ConfigError(f"unsupported config format tag: {fmt!r}")
    return _build(SimConfig, data, "config")


def save_config(cfg: SimConfig, path: str | Path) -> None:
    Path(path).write_text(dump_config(cfg))


def dump_config(cfg: SimConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=True, default_flow_style=False)


def load_config(path: str | Path) -> SimConfig:
    text = Path(path).read_text()
    return loads_config(text)


def loads_config(text: str) -> SimConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return config_from_dict(data)


def config_checksum(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode()
    return hashlib.sha256(text).hexdigest()


def default_network_nodes() -> list[NodeConfig]:
    nodes = [
        NodeConfig(id=i, kind="motor", label=MOTOR_LABELS[i], capacitance_j_per_k=200.0)
        for i in range(MOTOR_COUNT)
    ]
    nodes.append(
        NodeConfig(id=COMPUTER_INDEX, kind="computer", label="COMPUTER",
                   capacitance_j_per_k=500.0)
    )
    nodes.append(NodeConfig(id=AMBIENT_INDEX, kind="ambient", label="AMBIENT"))
    return nodes


def default_network_edges() -> list[EdgeConfig]:
    edges = []
    # Forced-convection path from every motor to ambient.
    for i in range(MOTOR_COUNT):
        edges.append(
            EdgeConfig(i=i, j=AMBIENT_INDEX, conv_base_k_per_w=4.0,
                       conv_coeff=0.5, conv_exponent=0.8)
        )
    # Conduction chains along each leg: HAA-HFE and HFE-KFE.
    for leg in range(4):
        base = leg * 3
        edges.append(EdgeConfig(i=base, j=base + 1, resistance_k_per_w=10.0))
        edges.append(EdgeConfig(i=base + 1, j=base + 2, resistance_k_per_w=10.0))
    # Onboard computer sheds heat to ambient, with its own convection params.
    edges.append(
        EdgeConfig(i=COMPUTER_INDEX, j=AMBIENT_INDEX, conv_base_k_per_w=3.0,
                   conv_coeff=0.3, conv_exponent=0.8)
    )
    return edges


def default_config() -> SimConfig:
    return SimConfig(nodes=default_network_nodes(), edges=default_network_edges())


def load_default_config() -> SimConfig:
    """Load the shipped default config from package data."""
    ref = resources.files("thermoquad").joinpath("data/default_config.yaml")
    return loads_config(ref.read_text())


def write_default_config_data(path: str | Path) -> None:
    save_config(default_config(), path)
