"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration document or parameter record is invalid."""


class SimulationError(RuntimeError):
    """A simulation failed at runtime with a valid configuration."""
