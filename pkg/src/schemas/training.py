import enum
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.channel import ChannelModel
from src.models.learning import OptimizerKind


class LrScheduleKind(str, enum.Enum):
    CONSTANT = "constant"
    STEP = "step"
    INVERSE_POWER = "inverse_power"


class LrSchedule(BaseModel):
    """Learning rate as a function of the (stage-local) epoch index.

    - constant: ``initial``
    - step: ``initial``, then ``value_after`` once ``epoch > after_epoch``
    - inverse_power: ``initial / floor(1 + coefficient * epoch ** power)``
    """

    model_config = ConfigDict(frozen=True)

    kind: LrScheduleKind = LrScheduleKind.CONSTANT
    initial: float = Field(1e-4, gt=0)
    after_epoch: int | None = Field(None, ge=0)
    value_after: float | None = Field(None, gt=0)
    coefficient: float = Field(0.01, ge=0)
    power: float = Field(1.1, gt=0)

    @model_validator(mode="after")
    def check_step(self) -> "LrSchedule":
        incomplete = self.after_epoch is None or self.value_after is None
        if self.kind == LrScheduleKind.STEP and incomplete:
            raise ValueError("step schedule needs after_epoch and value_after")
        return self

    def at(self, epoch: int) -> float:
        if self.kind == LrScheduleKind.STEP and epoch > self.after_epoch:
            return self.value_after
        if self.kind == LrScheduleKind.INVERSE_POWER:
            return self.initial / math.floor(1 + self.coefficient * epoch ** self.power)
        return self.initial


class CurriculumStage(BaseModel):
    model_config = ConfigDict(frozen=True)

    channel_model: ChannelModel
    epochs: int = Field(..., ge=1)


class ArchitectureConfig(BaseModel):
    """Layer widths; the layer counts are fixed per environment kind."""

    model_config = ConfigDict(frozen=True)

    conv_filters: tuple[int, int] = (16, 16)
    kernel_size: int = Field(3, ge=1)
    hidden_units: int = Field(64, ge=1)
    branch_filters: int = Field(8, ge=1)
    shared_filters: int = Field(16, ge=1)


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    workers: int = Field(16, ge=1)
    actions_per_epoch: int = Field(..., ge=1)
    epochs: int = Field(..., ge=1)
    lr_actor: LrSchedule = LrSchedule()
    lr_critic: LrSchedule = LrSchedule()
    discount: float = Field(1.0, gt=0, le=1)
    entropy_coef: float = Field(0.01, ge=0)
    seed: int = 0
    sync: bool = True

    optimizer: OptimizerKind = OptimizerKind.RMSPROP
    rms_decay: float = Field(0.99, gt=0, lt=1)
    rms_epsilon: float = Field(1e-6, gt=0)

    reward_window: int = Field(10, ge=1, description="control periods")
    reward_keeps_success_branch: bool = True
    history_length: int = Field(30, ge=2, description="K columns of the E2 state")

    curriculum: tuple[CurriculumStage, ...] = ()
    architecture: ArchitectureConfig = ArchitectureConfig()

    def stage_plan(self, default_model: ChannelModel) -> list[tuple[ChannelModel, int]]:
        """Split ``epochs`` over the curriculum stages in order.

        Stages are truncated once all epochs are assigned; epochs beyond the curriculum's total
        extend the last stage.
        """
        if not self.curriculum:
            return [(default_model, self.epochs)]
        plan = []
        remaining = self.epochs
        for stage in self.curriculum:
            if remaining <= 0:
                break
            take = min(stage.epochs, remaining)
            plan.append((stage.channel_model, take))
            remaining -= take
        if remaining > 0:
            model, epochs = plan[-1]
            plan[-1] = (model, epochs + remaining)
        return plan
