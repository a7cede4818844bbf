from src.schemas.grid import PoolConfig
from src.schemas.world import DocaConfig
from src.schemas.channel import ChannelConfig
from src.schemas.scheduler import Mode4Config
from src.schemas.training import (
    LrScheduleKind,
    LrSchedule,
    CurriculumStage,
    ArchitectureConfig,
    TrainConfig,
)
from src.schemas.scenario import ScenarioPreset
from src.schemas.report import PrrStats, EpochReport, EvaluationSummary, RunManifest

__all__ = [
    "PoolConfig",
    "DocaConfig",
    "ChannelConfig",
    "Mode4Config",
    "LrScheduleKind",
    "LrSchedule",
    "CurriculumStage",
    "ArchitectureConfig",
    "TrainConfig",
    "ScenarioPreset",
    "PrrStats",
    "EpochReport",
    "EvaluationSummary",
    "RunManifest",
]
