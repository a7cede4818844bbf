from src.core.config import Settings, get_settings
from src.core.exceptions import (
    DocaSimError,
    UsageError,
    InvalidOverrideError,
    ConfigError,
    InvalidTbError,
    ShapeMismatchError,
    SimulationStateError,
    NoTransmissionsError,
    TrainingDivergenceError,
    CheckpointError,
    CheckpointMismatchError,
)
from src.core.seeding import derive_seed, derive_seeds, make_rng

__all__ = [
    "Settings",
    "get_settings",
    "DocaSimError",
    "UsageError",
    "InvalidOverrideError",
    "ConfigError",
    "InvalidTbError",
    "ShapeMismatchError",
    "SimulationStateError",
    "NoTransmissionsError",
    "TrainingDivergenceError",
    "CheckpointError",
    "CheckpointMismatchError",
    "derive_seed",
    "derive_seeds",
    "make_rng",
]
