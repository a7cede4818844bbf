import argparse
import logging

from src.core.config import Settings
from src.core.exceptions import TrainingDivergenceError
from src.nn.checkpoint import save_checkpoint
from src.schemas.scenario import ScenarioPreset
from src.services import metrics_service
from src.workers.coordinator import train

from .common import load_scenario_checkpoint, out_dir, write_manifest

logger = logging.getLogger(__name__)


def run_train(args: argparse.Namespace, settings: Settings, scenario: ScenarioPreset) -> int:
    """Train actor and critic; ``--checkpoint`` continues from a saved pair."""
    out = out_dir(settings)
    initial = None
    if args.checkpoint:
        initial = load_scenario_checkpoint(args.checkpoint, scenario)
        logger.info(f"Continuing from {args.checkpoint}")

    ckpt_path = out / "checkpoint.ckpt"
    try:
        result = train(
            scenario,
            workers=settings.workers,
            epochs=settings.epochs,
            sync=settings.sync,
            seed=settings.seed,
            initial=initial,
        )
    except TrainingDivergenceError as e:
        if e.last_good is not None:
            save_checkpoint(ckpt_path, e.last_good)
            logger.error(f"Saved last good parameters to {ckpt_path}")
        raise

    save_checkpoint(ckpt_path, result.checkpoint)
    metrics_service.write_csv(
        metrics_service.learning_curve_frame(result.curve), out / "learning_curve.csv"
    )
    write_manifest(
        out / "manifest.json",
        "train",
        settings,
        scenario,
        epochs=len(result.curve),
        checkpoint=str(ckpt_path),
        initial=args.checkpoint,
    )
    if not result.completed:
        logger.warning(f"Training stopped after {len(result.curve)} epochs")
    return 0
