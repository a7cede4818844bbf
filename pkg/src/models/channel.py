import enum
from dataclasses import dataclass


class ChannelModel(str, enum.Enum):
    E1_IDEAL = "e1_ideal"
    E2_RANGE = "e2_range"
    E2_FULL = "e2_full"


@dataclass
class LinkShadowState:
    """Shadowing of one unordered vehicle pair."""
    value_db: float
    separation_m: float
