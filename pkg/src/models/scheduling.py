import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from src.schemas.grid import PoolConfig


class SchedulerKind(str, enum.Enum):
    RANDOM = "random"
    ROUND_ROBIN = "round_robin"
    MODE4 = "mode4"
    RL = "rl"


class ReselectionMode(str, enum.Enum):
    WINDOW = "window"
    COUNTER = "counter"


@dataclass(frozen=True)
class ActionRecord:
    elapsed_s: float
    direction: int
    tb: int


@dataclass
class AssignContext:
    pool: "PoolConfig"
    occupancy: np.ndarray
    vehicle_id: int
    direction: int
    entry_time_ms: float
    action_history: tuple[ActionRecord, ...] = ()


@dataclass
class SensingRecord:
    """Per-vehicle Mode-4 sensing state.

    ``samples`` holds the last ``window`` observations of every TB (NaN where not yet
    observed); ``energies`` is the per-TB mean over those samples, carried forward for
    TBs without observations.
    """
    energies: np.ndarray
    samples: np.ndarray
    write_index: np.ndarray
    counter: int = 0
