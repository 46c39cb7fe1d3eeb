"""Whole-body actuator thermal simulation for quadruped locomotion.

A numpy/scipy library with four layers:

* ``thermal``: lumped RC network, exact zero-order-hold discretization,
  steady-state solves, velocity-bucketed model caching.
* ``heat`` / ``rewards`` / ``control``: motor heat generation, the
  thermal-aware reward stack, action composition and PD control.
* ``proxy`` / ``harness``: scripted gait and thermal-governor policies plus
  batched, seeded long-horizon experiments with outcome classification.
* ``cli`` / ``traces``: command-line surface and deterministic CSV/JSON
  serialization.
"""

__version__ = "0.1.0"

from .config import (  # noqa: F401
    GaitProxyParams,
    GovernorParams,
    MotorElectricalParams,
    PdGains,
    RewardWeights,
    SimConfig,
    default_config,
    load_config,
    load_default_config,
    save_config,
)
from .errors import (  # noqa: F401
    ConfigError,
    DimensionMismatch,
    DisconnectedGraph,
    DuplicateEdge,
    EmptyWindow,
    IncompleteRecord,
    MissingNode,
    NonPositiveParameter,
    NotConvective,
    SingularSystem,
    ThermoquadError,
)
from .thermal import (  # noqa: F401
    DiscreteThermalModel,
    ModelCache,
    TemperatureState,
    ThermalEdge,
    ThermalNetwork,
    ThermalNode,
    build_network,
    continuous_derivative,
    convection_resistance,
    discretize,
    model_cache_lookup,
    steady_state,
    step,
)
from .heat import (  # noqa: F401
    MotorSample,
    assemble_heat_vector,
    friction_heat,
    joule_heat,
    rms_torque,
)
from .rewards import (  # noqa: F401
    RewardSnapshot,
    ThermalRewardInput,
    nominal_rewards,
    regularization_reward,
    residual_total,
    thermal_reward,
    thermal_weight,
)
from .control import (  # noqa: F401
    JointState,
    ObservationVector,
    assemble_obs_nominal,
    assemble_obs_residual,
    compose_actions,
    control_cycle,
    layout_table,
    pd_torque,
    split_observation,
)
from .proxy import (  # noqa: F401
    gait_proxy_step,
    governor_modulate,
    load_torques,
)
from .harness import (  # noqa: F401
    AgentSetup,
    BatchSim,
    CommandProfile,
    EpisodeRecord,
    build_context,
    classify_outcome,
    long_horizon_experiment,
    run_episode,
    sample_command_profile,
    sample_setup,
    terrain_trial_suite,
)
