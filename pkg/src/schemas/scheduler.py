from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.scheduling import ReselectionMode


class Mode4Config(BaseModel):
    model_config = ConfigDict(frozen=True)

    sensing_window: int = Field(10, ge=1, description="control periods")
    best_fraction: float = Field(0.2, gt=0, le=1)
    reselection: ReselectionMode = ReselectionMode.WINDOW
    counter_min: int = Field(5, ge=1, description="control periods")
    counter_max: int = Field(15, ge=1, description="control periods")

    # E1 has no pathloss: sensed energy is a binary busy/idle proxy (linear units)
    busy_energy: float = Field(1.0, gt=0)
    idle_energy: float = Field(1e-10, gt=0)

    @model_validator(mode="after")
    def check_counter_range(self) -> "Mode4Config":
        if self.counter_min > self.counter_max:
            raise ValueError("counter_min must not exceed counter_max")
        if self.idle_energy >= self.busy_energy:
            raise ValueError("idle_energy must be below busy_energy")
        return self
