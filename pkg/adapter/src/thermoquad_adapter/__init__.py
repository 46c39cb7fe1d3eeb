"""RL environment binding and plotting tools for the thermoquad simulator."""

__version__ = "0.1.0"

from .env import StepResult, ThermalQuadEnv  # noqa: F401
from .plotting import plot_scatter, plot_trace  # noqa: F401
