from pydantic import BaseModel, ConfigDict

from src.models.learning import EnvironmentKind
from src.schemas.channel import ChannelConfig
from src.schemas.grid import PoolConfig
from src.schemas.scheduler import Mode4Config
from src.schemas.training import TrainConfig
from src.schemas.world import DocaConfig


class ScenarioPreset(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    environment: EnvironmentKind
    doca: DocaConfig
    pool: PoolConfig
    channel: ChannelConfig
    mode4: Mode4Config = Mode4Config()
    train: TrainConfig
    # count the transmitter in the PRR denominator
    prr_counts_transmitter: bool = False
