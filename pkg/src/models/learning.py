import enum
from dataclasses import dataclass

import numpy as np


class EnvironmentKind(str, enum.Enum):
    E1 = "e1"
    E2 = "e2"


class ActionMode(str, enum.Enum):
    SAMPLE = "sample"
    GREEDY = "greedy"


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: int
    reward: float


class OptimizerKind(str, enum.Enum):
    RMSPROP = "rmsprop"
    SGD = "sgd"
