"""Command-line entry point: ``doca-sched {train,eval,compare,inspect-checkpoint}``.

Exit codes: 0 success, 1 runtime error, 2 usage or configuration error, 3 checkpoint
error, 4 training divergence.
"""

import argparse
import logging
import sys
from collections.abc import Sequence

from src import __version__
from src.core.config import Settings, get_settings
from src.core.exceptions import DocaSimError, UsageError
from src.schemas.scenario import ScenarioPreset

from .commands import run_compare, run_eval, run_inspect, run_train
from .overrides import (
    apply_overrides,
    load_config_file,
    parse_assignment,
    split_settings,
)
from .presets import PRESETS, get_preset

logger = logging.getLogger(__name__)

COMMANDS = {
    "train": run_train,
    "eval": run_eval,
    "compare": run_compare,
    "inspect-checkpoint": run_inspect,
}


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> CliParser:
    parser = CliParser(prog="doca-sched", description="DOCA V2V resource scheduling")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = CliParser(add_help=False)
    common.add_argument("--preset", help=f"scenario preset ({', '.join(PRESETS)})")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", dest="out_dir", help="output directory")
    common.add_argument("--config", help="config file (key = value lines or JSON)")
    common.add_argument(
        "--set",
        dest="assignments",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a scenario value, e.g. channel.sinr_threshold=3",
    )
    common.add_argument("--checkpoint")
    common.add_argument("--log-level")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    train = sub.add_parser("train", parents=[common], help="train actor and critic")
    train.add_argument("--workers", type=int)
    train.add_argument("--epochs", type=int)
    mode = train.add_mutually_exclusive_group()
    mode.add_argument("--sync", dest="sync", action="store_true", default=None)
    mode.add_argument("--async", dest="sync", action="store_false")

    evaluate = sub.add_parser("eval", parents=[common], help="evaluate one scheduler")
    evaluate.add_argument("--scheduler", default="random")
    evaluate.add_argument("--actions", type=int)

    compare = sub.add_parser("compare", parents=[common], help="compare schedulers")
    compare.add_argument("--scheduler", default="random,round_robin,mode4")
    compare.add_argument("--actions", type=int)
    compare.add_argument("--seeds", type=int, default=1)

    sub.add_parser("inspect-checkpoint", parents=[common], help="print a checkpoint header")
    return parser


def resolve(args: argparse.Namespace) -> tuple[Settings, ScenarioPreset]:
    """Merge preset, config file, environment and flags into settings and a scenario."""
    config_path = args.config or get_settings().config_file
    file_overrides = {}
    if config_path:
        file_settings, file_overrides = split_settings(load_config_file(config_path))
        settings = Settings(**file_settings)
    else:
        settings = get_settings()

    flags = {
        name: getattr(args, name)
        for name in ("preset", "seed", "out_dir", "workers", "epochs", "sync", "actions")
        if getattr(args, name, None) is not None
    }
    if args.log_level:
        flags["log_level"] = args.log_level
    settings = settings.model_copy(update=flags)
    if settings.actions < 1:
        raise UsageError("--actions must be >= 1")

    overrides = {**file_overrides, **settings.overrides}
    for text in args.assignments:
        key, value = parse_assignment(text)
        overrides[key] = value
    scenario = apply_overrides(get_preset(settings.preset), overrides)
    return settings, scenario


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings, scenario = resolve(args)
        logging.getLogger().setLevel(settings.log_level.upper())
        logger.debug(f"Resolved scenario: {scenario.model_dump_json()}")
        return COMMANDS[args.command](args, settings, scenario)
    except DocaSimError as e:
        logger.debug("Command failed", exc_info=True)
        print(e.to_error_line(), file=sys.stderr)
        return e.exit_code


def main() -> None:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    sys.exit(run())
