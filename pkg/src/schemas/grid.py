from pydantic import BaseModel, ConfigDict, Field


class PoolConfig(BaseModel):
    """Periodic resource pool: ``subchannels`` x ``subframes`` transmission blocks."""

    model_config = ConfigDict(frozen=True)

    subchannels: int = Field(1, ge=1)
    subframes: int = Field(10, ge=1)
    subframe_duration: float = Field(1.0, gt=0, description="milliseconds")

    @property
    def n_tbs(self) -> int:
        return self.subchannels * self.subframes
