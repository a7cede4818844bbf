import json

import pytest
from pydantic import ValidationError

from src.cli.main import build_parser, resolve
from src.cli.overrides import (
    apply_overrides,
    coerce,
    load_config_file,
    parse_assignment,
    split_settings,
)
from src.cli.presets import PRESETS, get_preset, kmh
from src.core.exceptions import ConfigError, InvalidOverrideError, UsageError
from src.models.channel import ChannelModel
from src.models.learning import EnvironmentKind
from src.schemas.training import LrSchedule, LrScheduleKind


class TestPresets:
    @pytest.mark.parametrize(
        "name, vehicles, speed_kmh, subchannels, actions, epochs",
        [
            ("E1-A", 10, 140, 1, 20, 400),
            ("E1-B", 12, 140, 2, 30, 1400),
            ("E1-C", 24, 70, 2, 48, 1200),
            ("E2", 30, 50, 2, 120, 930),
        ],
    )
    def test_scenario_values(self, name, vehicles, speed_kmh, subchannels, actions, epochs):
        preset = get_preset(name)
        assert preset.doca.target_population == vehicles
        assert preset.doca.speed == pytest.approx(speed_kmh / 3.6)
        assert preset.doca.length == 500.0
        assert preset.pool.subchannels == subchannels
        assert preset.pool.subframes == 10
        assert preset.train.actions_per_epoch == actions
        assert preset.train.epochs == epochs
        assert preset.train.workers == 16
        assert preset.train.discount == 1.0
        assert preset.train.entropy_coef == 0.01

    def test_e1_presets_use_the_ideal_channel(self):
        for name in ("E1-A", "E1-B", "E1-C"):
            preset = get_preset(name)
            assert preset.environment == EnvironmentKind.E1
            assert preset.channel.model == ChannelModel.E1_IDEAL
            assert preset.train.lr_actor.initial == 1e-4

    def test_e2_channel(self):
        channel = get_preset("E2").channel
        assert channel.model == ChannelModel.E2_FULL
        assert channel.tx_power == -5.0
        assert channel.noise_power == pytest.approx(-105.06)
        assert channel.sinr_threshold == 2.0
        assert channel.range == 120.0
        assert channel.prr_range == 100.0
        assert channel.shadow_sigma == 3.0
        assert channel.decorrelation_distance == 25.0

    def test_e2_training(self):
        train = get_preset("E2").train
        assert train.history_length == 30
        assert [(s.channel_model, s.epochs) for s in train.curriculum] == [
            (ChannelModel.E2_RANGE, 760),
            (ChannelModel.E2_FULL, 170),
        ]
        assert train.lr_actor.kind == LrScheduleKind.INVERSE_POWER

    def test_e2_range_is_the_first_stage_alone(self):
        preset = get_preset("E2-RANGE")
        assert preset.channel.model == ChannelModel.E2_RANGE
        assert preset.train.epochs == 760
        assert preset.train.curriculum == ()

    def test_lookup_is_case_insensitive(self):
        assert get_preset("e1-b").name == "E1-B"
        assert set(PRESETS) == {"E1-A", "E1-B", "E1-C", "E2", "E2-RANGE"}

    def test_unknown_preset(self):
        with pytest.raises(UsageError, match="E3"):
            get_preset("E3")

    def test_kmh(self):
        assert kmh(36.0) == pytest.approx(10.0)


class TestLearningRates:
    def test_inverse_power_decay(self):
        schedule = get_preset("E2").train.lr_actor
        assert schedule.at(0) == 1e-3
        assert schedule.at(10) == 1e-3
        assert schedule.at(100) == pytest.approx(5e-4)
        rates = [schedule.at(e) for e in range(0, 930, 31)]
        assert rates == sorted(rates, reverse=True)

    def test_step_drop(self):
        schedule = get_preset("E1-C").train.lr_actor
        assert schedule.at(1000) == 1e-4
        assert schedule.at(1001) == 1e-5

    def test_step_needs_both_values(self):
        with pytest.raises(ValidationError):
            LrSchedule(kind=LrScheduleKind.STEP, after_epoch=10)

    def test_constant(self):
        assert LrSchedule(initial=0.5).at(10_000) == 0.5


class TestStagePlan:
    @pytest.mark.parametrize(
        "epochs, plan",
        [
            (930, [(ChannelModel.E2_RANGE, 760), (ChannelModel.E2_FULL, 170)]),
            (800, [(ChannelModel.E2_RANGE, 760), (ChannelModel.E2_FULL, 40)]),
            (100, [(ChannelModel.E2_RANGE, 100)]),
            (1000, [(ChannelModel.E2_RANGE, 760), (ChannelModel.E2_FULL, 240)]),
        ],
    )
    def test_curriculum_split(self, epochs, plan):
        train = get_preset("E2").train.model_copy(update={"epochs": epochs})
        assert train.stage_plan(ChannelModel.E2_FULL) == plan

    def test_without_curriculum(self):
        train = get_preset("E1-A").train
        assert train.stage_plan(ChannelModel.E1_IDEAL) == [(ChannelModel.E1_IDEAL, 400)]


class TestOverrides:
    def test_nested_override(self, e2):
        scenario = apply_overrides(e2, {"channel.sinr_threshold": 3, "train.epochs": "12"})
        assert scenario.channel.sinr_threshold == 3.0
        assert scenario.train.epochs == 12
        assert e2.channel.sinr_threshold == 2.0

    def test_no_overrides_returns_the_preset(self, e1a):
        assert apply_overrides(e1a, {}) is e1a

    @pytest.mark.parametrize("key", ["channel.gain", "nope.speed", "doca.speed.x", "doca.cam_size"])
    def test_unknown_key(self, e1a, key):
        with pytest.raises(InvalidOverrideError) as excinfo:
            apply_overrides(e1a, {key: 1})
        assert excinfo.value.key == key
        assert key in excinfo.value.message
        assert excinfo.value.exit_code == 2

    def test_invalid_value(self, e1a):
        with pytest.raises(ConfigError, match="doca.speed"):
            apply_overrides(e1a, {"doca.speed": -1})

    def test_cross_field_validation(self, e1a):
        with pytest.raises(ConfigError):
            apply_overrides(e1a, {"mode4.counter_min": 20})

    def test_coerce(self):
        assert coerce("3") == 3
        assert coerce("2.5") == 2.5
        assert coerce("true") is True
        assert coerce("[1, 2]") == [1, 2]
        assert coerce("window") == "window"
        assert coerce(7) == 7

    def test_parse_assignment(self):
        assert parse_assignment("channel.range = 80") == ("channel.range", 80)
        assert parse_assignment("mode4.reselection=counter") == ("mode4.reselection", "counter")
        with pytest.raises(UsageError):
            parse_assignment("channel.range")
        with pytest.raises(UsageError):
            parse_assignment("=3")

    def test_split_settings(self):
        settings, scenario = split_settings({"seed": 3, "preset": "E2", "doca.speed": 10})
        assert settings == {"seed": 3, "preset": "E2"}
        assert scenario == {"doca.speed": 10}
        for key in ("bogus", "debug"):
            with pytest.raises(InvalidOverrideError):
                split_settings({key: 1})


class TestConfigFiles:
    def test_dotenv_style(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("# comment\nseed=3\npreset=E2\nchannel.sinr_threshold=3.5\n")
        assert load_config_file(path) == {
            "seed": 3,
            "preset": "E2",
            "channel.sinr_threshold": 3.5,
        }

    def test_json_is_flattened(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(
            json.dumps(
                {
                    "seed": 4,
                    "channel": {"sinr_threshold": 3},
                    "overrides": {"doca.speed": 20},
                }
            )
        )
        assert load_config_file(path) == {
            "seed": 4,
            "channel.sinr_threshold": 3,
            "overrides": {"doca.speed": 20},
        }

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config_file(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{seed: ")
        with pytest.raises(ConfigError):
            load_config_file(path)

    def test_json_must_be_an_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="object"):
            load_config_file(path)


class TestResolve:
    def parse(self, *argv):
        return build_parser().parse_args(["eval", *argv])

    def test_defaults(self):
        settings, scenario = resolve(self.parse())
        assert settings.seed == 0
        assert scenario.name == "E1-A"

    def test_precedence(self, tmp_path, monkeypatch):
        config = tmp_path / "run.conf"
        config.write_text("seed=3\npreset=E2\nchannel.sinr_threshold=3\n")

        settings, scenario = resolve(self.parse("--config", str(config)))
        assert (settings.seed, scenario.name) == (3, "E2")
        assert scenario.channel.sinr_threshold == 3.0

        monkeypatch.setenv("DOCA_SEED", "7")
        settings, _ = resolve(self.parse("--config", str(config)))
        assert settings.seed == 7

        settings, scenario = resolve(
            self.parse("--config", str(config), "--seed", "9", "--set", "channel.sinr_threshold=4")
        )
        assert settings.seed == 9
        assert scenario.channel.sinr_threshold == 4.0

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("DOCA_PRESET", "E1-B")
        monkeypatch.setenv("DOCA_OVERRIDES", '{"doca.mean_headway": 3.0}')
        settings, scenario = resolve(self.parse())
        assert scenario.name == "E1-B"
        assert scenario.doca.mean_headway == 3.0

    def test_config_file_from_environment(self, tmp_path, monkeypatch):
        config = tmp_path / "env.json"
        config.write_text('{"preset": "E1-C"}')
        monkeypatch.setenv("DOCA_CONFIG_FILE", str(config))
        _, scenario = resolve(self.parse())
        assert scenario.name == "E1-C"

    def test_unknown_file_key(self, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("speed=3\n")
        with pytest.raises(InvalidOverrideError, match="speed"):
            resolve(self.parse("--config", str(config)))
