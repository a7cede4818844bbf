"""Config files and dotted-key overrides.

Precedence, lowest first: preset < config file < ``DOCA_*`` environment < command-line flags.
"""

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from dotenv import dotenv_values
from pydantic import ValidationError

from src.core.config import Settings
from src.core.exceptions import ConfigError, InvalidOverrideError, UsageError
from src.schemas.scenario import ScenarioPreset


def coerce(value: Any) -> Any:
    """Parse a text value as JSON when possible (numbers, booleans, lists), else keep it."""
    if not isinstance(value, str):
        return value
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def _flatten(data: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping) and name != "overrides":
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read ``key = value`` text (parsed with python-dotenv) or JSON into a flat key map."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return _flatten(data)
    values = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            raise ConfigError(f"{path}: key {key!r} has no value")
        values[key] = coerce(value)
    return values


def split_settings(values: Mapping[str, Any]) -> tuple[dict[str, Any], dict[str, Any]]:
    """Separate Settings fields from dotted scenario overrides."""
    settings_values, scenario_values = {}, {}
    for key, value in values.items():
        if key in Settings.model_fields:
            settings_values[key] = value
        elif "." in key:
            scenario_values[key] = value
        else:
            raise InvalidOverrideError(key)
    return settings_values, scenario_values


def parse_assignment(text: str) -> tuple[str, Any]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise UsageError(f"expected key=value, got {text!r}")
    return key.strip(), coerce(value.strip())


def apply_overrides(preset: ScenarioPreset, overrides: Mapping[str, Any]) -> ScenarioPreset:
    """Return a validated copy of ``preset`` with dotted keys replaced."""
    if not overrides:
        return preset
    data = preset.model_dump(mode="json")
    for key, value in overrides.items():
        parts = key.split(".")
        node = data
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise InvalidOverrideError(key)
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise InvalidOverrideError(key)
        node[parts[-1]] = coerce(value)
    try:
        return ScenarioPreset.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        raise ConfigError(f"invalid value for {where}: {error['msg']}") from e
