import logging
from pathlib import Path

from src import __version__
from src.core.config import Settings
from src.core.exceptions import UsageError
from src.core.seeding import make_rng
from src.models.scheduling import SchedulerKind
from src.nn.architectures import build_networks
from src.nn.checkpoint import Checkpoint, load_checkpoint
from src.schemas.report import RunManifest
from src.schemas.scenario import ScenarioPreset
from src.services.scheduler_service import Scheduler, make_scheduler

logger = logging.getLogger(__name__)


def out_dir(settings: Settings) -> Path:
    path = Path(settings.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_manifest(
    path: Path,
    command: str,
    settings: Settings,
    scenario: ScenarioPreset,
    **extra,
) -> Path:
    manifest = RunManifest(
        command=command,
        version=__version__,
        seed=settings.seed,
        workers=settings.workers if settings.workers is not None else scenario.train.workers,
        sync=settings.sync if settings.sync is not None else scenario.train.sync,
        scenario=scenario,
        extra=extra,
    )
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Manifest written to {path}")
    return path


def load_scenario_checkpoint(path: str, scenario: ScenarioPreset) -> Checkpoint:
    """Load a checkpoint whose networks must match the scenario's architecture."""
    # only the layout is compared, so the initial parameters do not matter
    actor, critic = build_networks(
        scenario.environment,
        scenario.pool.n_tbs,
        scenario.train.history_length,
        scenario.train.architecture,
        make_rng(0),
    )
    return load_checkpoint(path, actor.descriptor(), critic.descriptor())


def parse_schedulers(text: str) -> list[SchedulerKind]:
    kinds = []
    for name in (part.strip() for part in text.split(",")):
        try:
            kinds.append(SchedulerKind(name.replace("-", "_")))
        except ValueError:
            choices = ", ".join(k.value for k in SchedulerKind)
            raise UsageError(f"Unknown scheduler {name!r}; choose from {choices}") from None
    return kinds


def scheduler_factory(
    kind: SchedulerKind, scenario: ScenarioPreset, checkpoint: Checkpoint | None
):
    def build() -> Scheduler:
        return make_scheduler(
            kind,
            scenario.pool,
            scenario.channel,
            scenario.mode4,
            actor=checkpoint.actor if checkpoint is not None else None,
            environment=scenario.environment,
            history_length=scenario.train.history_length,
            doca_length=scenario.doca.length,
        )

    return build
