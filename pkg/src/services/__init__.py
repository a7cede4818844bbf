from src.services import grid_service
from src.services import world_service
from src.services import channel_service
from src.services import state_service
from src.services import reward_service
from src.services import metrics_service
from src.services import scheduler_service
from src.services import simulation_service

__all__ = [
    "grid_service",
    "world_service",
    "channel_service",
    "state_service",
    "reward_service",
    "metrics_service",
    "scheduler_service",
    "simulation_service",
]
