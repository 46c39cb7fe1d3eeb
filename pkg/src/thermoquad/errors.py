"""Exception hierarchy shared across the package."""


class ThermoquadError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ThermoquadError):
    """A configuration file or section is invalid."""


class NetworkValidationError(ConfigError):
    """A thermal network config violates structural constraints.

    The message enumerates every violation found, not just the first.
    """


class MissingNode(NetworkValidationError):
    pass


class NonPositiveParameter(NetworkValidationError):
    pass


class DuplicateEdge(NetworkValidationError):
    pass


class DisconnectedGraph(NetworkValidationError):
    pass


class NotConvective(ThermoquadError):
    """A convection-only operation was applied to a conduction edge."""


class DimensionMismatch(ThermoquadError):
    """An input array has the wrong shape or length."""


class SingularSystem(ThermoquadError):
    """The thermal system matrix cannot be solved (degenerate network)."""


class EmptyWindow(ThermoquadError):
    """An aggregation window contains no samples."""


class IncompleteRecord(ThermoquadError):
    """An episode record is missing series required for classification."""
