import argparse
import logging

from src.core.config import Settings
from src.core.exceptions import UsageError
from src.core.seeding import make_rng
from src.models.scheduling import SchedulerKind
from src.schemas.report import EvaluationSummary
from src.schemas.scenario import ScenarioPreset
from src.services import metrics_service
from src.services.simulation_service import evaluate_sharded

from .common import (
    load_scenario_checkpoint,
    out_dir,
    parse_schedulers,
    scheduler_factory,
    write_manifest,
)

logger = logging.getLogger(__name__)


def run_compare(args: argparse.Namespace, settings: Settings, scenario: ScenarioPreset) -> int:
    """Evaluate several schedulers on the same seeds, one row each in compare.csv."""
    kinds = parse_schedulers(args.scheduler)
    if len(kinds) < 2:
        raise UsageError("compare needs at least two schedulers")
    if SchedulerKind.RL in kinds and not args.checkpoint:
        raise UsageError("comparing rl requires --checkpoint")
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")

    checkpoint = load_scenario_checkpoint(args.checkpoint, scenario) if args.checkpoint else None
    summaries = []
    for kind in kinds:
        # every scheduler sees the same seed streams
        rngs = [make_rng(settings.seed, i) for i in range(args.seeds)]
        stats, runs = evaluate_sharded(
            scheduler_factory(kind, scenario, checkpoint), scenario, settings.actions, rngs
        )
        rates = [r.collision_rate for r in runs if r.collision_rate is not None]
        last = [
            r.last_selector_collision_rate
            for r in runs
            if r.last_selector_collision_rate is not None
        ]
        summaries.append(
            EvaluationSummary(
                scheduler=kind.value,
                preset=scenario.name,
                stats=stats,
                actions=sum(r.actions for r in runs),
                transient_actions=sum(r.transient_actions for r in runs),
                mean_unused_resources=sum(r.mean_unused_resources for r in runs) / len(runs),
                mode4_collision_rate=sum(rates) / len(rates) if rates else None,
                mode4_last_selector_collision_rate=sum(last) / len(last) if last else None,
            )
        )
        logger.info(f"{kind.value}: mean PRR {stats.mean:.4f} over {stats.count} transmissions")

    out = out_dir(settings)
    metrics_service.write_csv(metrics_service.compare_frame(summaries), out / "compare.csv")
    write_manifest(
        out / "manifest.json",
        "compare",
        settings,
        scenario,
        schedulers=",".join(k.value for k in kinds),
        seeds=args.seeds,
        actions=settings.actions,
        checkpoint=args.checkpoint,
    )
    return 0
