from pydantic import BaseModel, ConfigDict, Field

from src.models.vehicle import ArrivalMode


class DocaConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: float = Field(500.0, gt=0, description="meters")
    lanes_per_direction: int = Field(1, ge=1)
    lane_width: float = Field(4.0, gt=0, description="meters")
    speed: float = Field(..., gt=0, description="meters/second")
    mean_headway: float = Field(2.5, gt=0, description="seconds")
    target_population: int = Field(..., ge=1)
    arrival_mode: ArrivalMode = ArrivalMode.CONSTANT_POPULATION

    cam_period: float = Field(100.0, gt=0, description="milliseconds")

    @property
    def transit_time_s(self) -> float:
        return self.length / self.speed
