"""Error types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration value or malformed config file."""


class DataError(ValueError):
    """Malformed trajectory data, model file, or report input."""


class ThresholdError(RuntimeError):
    """A requested quality threshold was not met."""


class BatteryExhausted(RuntimeError):
    """The battery cannot cover the next event; the run must stop."""
