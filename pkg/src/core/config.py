from functools import lru_cache
from typing import Any

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    log_level: str = "INFO"

    preset: str = "E1-A"
    seed: int = 0

    # None keeps the preset's value
    workers: int | None = None
    epochs: int | None = None
    sync: bool | None = None
    actions: int = 1000

    out_dir: str = "./runs"
    config_file: str | None = None

    # dotted scenario keys, e.g. {"channel.sinr_threshold": 3}
    overrides: dict[str, Any] = {}

    model_config = SettingsConfigDict(
        env_prefix="DOCA_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        # config-file values are passed as init kwargs and rank below the environment
        return env_settings, dotenv_settings, init_settings, file_secret_settings


@lru_cache
def get_settings() -> Settings:
    return Settings()
