import enum
import math
from dataclasses import dataclass


class ArrivalMode(str, enum.Enum):
    CONSTANT_POPULATION = "constant_population"
    POISSON = "poisson"


class Direction(enum.IntEnum):
    EAST = 1  # west -> east
    WEST = -1  # east -> west


@dataclass
class Vehicle:
    id: int
    direction: Direction
    position: float
    speed: float
    lane_offset: float
    entry_time_ms: float

    tb: int | None = None
    cam_offset: int = 0
    # absolute pool subframe of the first CAM generation
    first_generation: int = 0
    # placed by the initial random fill, not by a scheduler action
    prefilled: bool = False

    def distance_to(self, other: "Vehicle") -> float:
        return math.hypot(self.position - other.position, self.lane_offset - other.lane_offset)


@dataclass(frozen=True, order=True)
class ArrivalEvent:
    time_ms: float
    direction: Direction
