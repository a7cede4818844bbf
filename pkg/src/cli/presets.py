"""Scenario presets.

E1-A/B/C use the ideal single-collision-domain channel; E2 uses WINNER+ B1 pathloss with
shadowing and is trained first on the range-based model (E2-RANGE) and then on the full one.
"""

from src.core.exceptions import UsageError
from src.models.channel import ChannelModel
from src.models.learning import EnvironmentKind
from src.schemas.channel import ChannelConfig
from src.schemas.grid import PoolConfig
from src.schemas.scenario import ScenarioPreset
from src.schemas.training import CurriculumStage, LrSchedule, LrScheduleKind, TrainConfig
from src.schemas.world import DocaConfig
from src.services.channel_service import winner_b1_pathloss


def kmh(speed: float) -> float:
    return speed / 3.6


E1_CHANNEL = ChannelConfig(model=ChannelModel.E1_IDEAL, tx_power=23.0)

_E2_TX_POWER = -5.0
_E2_PRR_RANGE = 100.0
# zero-shadowing power received at the PRR range sits at the noise floor
_E2_NOISE = round(_E2_TX_POWER - winner_b1_pathloss(_E2_PRR_RANGE, ChannelConfig()), 2)

E2_CHANNEL = ChannelConfig(
    model=ChannelModel.E2_FULL,
    tx_power=_E2_TX_POWER,
    noise_power=_E2_NOISE,
    sinr_threshold=2.0,
    range=120.0,
    prr_range=_E2_PRR_RANGE,
)

E2_LR = LrSchedule(kind=LrScheduleKind.INVERSE_POWER, initial=1e-3, coefficient=0.01, power=1.1)


def _e1_a() -> ScenarioPreset:
    return ScenarioPreset(
        name="E1-A",
        environment=EnvironmentKind.E1,
        doca=DocaConfig(speed=kmh(140), target_population=10),
        pool=PoolConfig(subchannels=1, subframes=10),
        channel=E1_CHANNEL,
        train=TrainConfig(actions_per_epoch=20, epochs=400),
    )


def _e1_b() -> ScenarioPreset:
    return ScenarioPreset(
        name="E1-B",
        environment=EnvironmentKind.E1,
        doca=DocaConfig(speed=kmh(140), target_population=12),
        pool=PoolConfig(subchannels=2, subframes=10),
        channel=E1_CHANNEL,
        train=TrainConfig(actions_per_epoch=30, epochs=1400),
    )


def _e1_c() -> ScenarioPreset:
    drop = LrSchedule(kind=LrScheduleKind.STEP, initial=1e-4, after_epoch=1000, value_after=1e-5)
    return ScenarioPreset(
        name="E1-C",
        environment=EnvironmentKind.E1,
        doca=DocaConfig(speed=kmh(70), target_population=24),
        pool=PoolConfig(subchannels=2, subframes=10),
        channel=E1_CHANNEL,
        train=TrainConfig(actions_per_epoch=48, epochs=1200, lr_actor=drop, lr_critic=drop),
    )


def _e2() -> ScenarioPreset:
    return ScenarioPreset(
        name="E2",
        environment=EnvironmentKind.E2,
        doca=DocaConfig(speed=kmh(50), target_population=30),
        pool=PoolConfig(subchannels=2, subframes=10),
        channel=E2_CHANNEL,
        train=TrainConfig(
            actions_per_epoch=120,
            epochs=930,
            lr_actor=E2_LR,
            lr_critic=E2_LR,
            history_length=30,
            curriculum=(
                CurriculumStage(channel_model=ChannelModel.E2_RANGE, epochs=760),
                CurriculumStage(channel_model=ChannelModel.E2_FULL, epochs=170),
            ),
        ),
    )


def _e2_range() -> ScenarioPreset:
    base = _e2()
    return base.model_copy(
        update={
            "name": "E2-RANGE",
            "channel": E2_CHANNEL.model_copy(update={"model": ChannelModel.E2_RANGE}),
            "train": base.train.model_copy(update={"epochs": 760, "curriculum": ()}),
        }
    )


PRESETS = {
    "E1-A": _e1_a,
    "E1-B": _e1_b,
    "E1-C": _e1_c,
    "E2": _e2,
    "E2-RANGE": _e2_range,
}


def get_preset(name: str) -> ScenarioPreset:
    try:
        return PRESETS[name.upper()]()
    except KeyError:
        raise UsageError(f"Unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
