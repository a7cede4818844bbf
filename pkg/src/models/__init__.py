from src.models.vehicle import Vehicle, Direction, ArrivalEvent, ArrivalMode
from src.models.channel import ChannelModel, LinkShadowState
from src.models.transmission import TxRecord, Snapshot
from src.models.scheduling import (
    SchedulerKind,
    ReselectionMode,
    ActionRecord,
    AssignContext,
    SensingRecord,
)
from src.models.learning import EnvironmentKind, ActionMode, Transition, OptimizerKind

__all__ = [
    "Vehicle",
    "Direction",
    "ArrivalEvent",
    "ArrivalMode",
    "ChannelModel",
    "LinkShadowState",
    "TxRecord",
    "Snapshot",
    "SchedulerKind",
    "ReselectionMode",
    "ActionRecord",
    "AssignContext",
    "SensingRecord",
    "EnvironmentKind",
    "ActionMode",
    "Transition",
    "OptimizerKind",
]
