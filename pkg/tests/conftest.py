import numpy as np
import pytest

from src.cli.presets import get_preset
from src.core.config import get_settings
from src.models.vehicle import Direction
from src.schemas.channel import ChannelConfig
from src.schemas.grid import PoolConfig
from src.schemas.world import DocaConfig
from src.services.world_service import World


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def e1a():
    return get_preset("E1-A")


@pytest.fixture
def e1b():
    return get_preset("E1-B")


@pytest.fixture
def e2():
    return get_preset("E2")


@pytest.fixture
def pool_2x10():
    return PoolConfig(subchannels=2, subframes=10)


@pytest.fixture
def e2_channel(e2):
    return e2.channel


@pytest.fixture
def make_world(rng):
    """Empty frozen world on a 2 x 10 pool, for placing vehicles by hand."""

    def build(
        pool: PoolConfig | None = None,
        doca: DocaConfig | None = None,
        frozen: bool = True,
    ) -> World:
        return World(
            doca or DocaConfig(speed=38.89, target_population=2),
            pool or PoolConfig(subchannels=2, subframes=10),
            rng,
            frozen=frozen,
        )

    return build


@pytest.fixture
def pair(make_world):
    """Two vehicles ``distance`` metres apart on the same lane line."""

    def build(distance: float, tb_a: int = 0, tb_b: int = 1):
        world = make_world()
        a = world.add_vehicle(Direction.EAST, 100.0, tb=tb_a)
        b = world.add_vehicle(Direction.EAST, 100.0 + distance, tb=tb_b)
        b.lane_offset = a.lane_offset
        return a, b

    return build


@pytest.fixture
def zero_shadow_channel():
    return ChannelConfig(shadow_sigma=0.0)


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch, tmp_path):
    for name in ("DOCA_PRESET", "DOCA_SEED", "DOCA_OVERRIDES", "DOCA_CONFIG_FILE", "DOCA_OUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    # keep a developer's .env out of the tests
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
