from datetime import datetime, timezone

from pydantic import BaseModel, Field

from src.schemas.scenario import ScenarioPreset


class PrrStats(BaseModel):
    mean: float
    median: float
    p1: float
    p25: float
    p75: float
    p99: float
    count: int = Field(..., gt=0)


class EpochReport(BaseModel):
    epoch: int
    stage: str
    mean_reward: float
    min_reward: float
    max_reward: float
    lr_actor: float
    lr_critic: float
    empty_windows: int = 0


class EvaluationSummary(BaseModel):
    scheduler: str
    preset: str
    stats: PrrStats
    actions: int
    transient_actions: int
    mean_unused_resources: float
    mode4_collision_rate: float | None = None
    mode4_last_selector_collision_rate: float | None = None


class RunManifest(BaseModel):
    command: str
    version: str
    seed: int
    workers: int
    sync: bool
    scenario: ScenarioPreset
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    extra: dict[str, str | int | float | None] = {}
