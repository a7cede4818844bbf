import argparse
import logging

from src.core.config import Settings
from src.core.exceptions import NoTransmissionsError, UsageError
from src.core.seeding import make_rng
from src.models.scheduling import SchedulerKind
from src.schemas.report import EvaluationSummary
from src.schemas.scenario import ScenarioPreset
from src.services import metrics_service
from src.services.simulation_service import run_evaluation

from .common import (
    load_scenario_checkpoint,
    out_dir,
    parse_schedulers,
    scheduler_factory,
    write_manifest,
)

logger = logging.getLogger(__name__)


def run_eval(args: argparse.Namespace, settings: Settings, scenario: ScenarioPreset) -> int:
    kinds = parse_schedulers(args.scheduler)
    if len(kinds) != 1:
        raise UsageError("eval takes exactly one scheduler; use compare for several")
    kind = kinds[0]
    if kind == SchedulerKind.RL and not args.checkpoint:
        raise UsageError("--scheduler rl requires --checkpoint")
    if kind != SchedulerKind.RL and args.checkpoint:
        raise UsageError(f"--checkpoint is only valid with --scheduler rl, not {kind.value}")

    checkpoint = load_scenario_checkpoint(args.checkpoint, scenario) if args.checkpoint else None
    scheduler = scheduler_factory(kind, scenario, checkpoint)()
    run = run_evaluation(scheduler, scenario, settings.actions, make_rng(settings.seed))
    if not run.records:
        raise NoTransmissionsError(f"{kind.value} on {scenario.name} produced no transmissions")

    summary = EvaluationSummary(
        scheduler=kind.value,
        preset=scenario.name,
        stats=metrics_service.prr_stats(run.prr_values),
        actions=run.actions,
        transient_actions=run.transient_actions,
        mean_unused_resources=run.mean_unused_resources,
        mode4_collision_rate=run.collision_rate,
        mode4_last_selector_collision_rate=run.last_selector_collision_rate,
    )
    out = out_dir(settings)
    metrics_service.write_csv(metrics_service.summary_frame([summary]), out / "summary.csv")
    metrics_service.write_csv(
        metrics_service.transmissions_frame(run.records), out / "transmissions.csv"
    )
    write_manifest(
        out / "manifest.json",
        "eval",
        settings,
        scenario,
        scheduler=kind.value,
        actions=settings.actions,
        checkpoint=args.checkpoint,
    )
    logger.info(
        f"{kind.value}: mean PRR {summary.stats.mean:.4f}, median {summary.stats.median:.4f} "
        f"over {summary.stats.count} transmissions"
    )
    return 0
