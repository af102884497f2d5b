"""Exception types raised by the simulator."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SimulationError, ValueError):
    """An operation was called with an out-of-range or malformed argument."""


class ConfigError(SimulationError, ValueError):
    """A configuration value is missing, unknown, or inconsistent."""


class InputError(SimulationError, ValueError):
    """An input record is too short or otherwise unusable for the requested operation."""
