from .main import build_parser, resolve, run
from .presets import PRESETS, get_preset

__all__ = ["PRESETS", "build_parser", "get_preset", "resolve", "run"]
