"""UAV relay scheduling: a deterministic event simulator plus an
imitation-learning pipeline that clones the scripted scheduler."""

__version__ = "0.1.0"

from .config import SimConfig
from .errors import BatteryExhausted, ConfigError, DataError, ThresholdError

__all__ = [
    "SimConfig",
    "ConfigError",
    "DataError",
    "ThresholdError",
    "BatteryExhausted",
]
