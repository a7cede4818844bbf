from src.workers.rollout_worker import EpochResult, RolloutWorker
from src.workers.coordinator import TrainingCoordinator, TrainingResult, train

__all__ = ["EpochResult", "RolloutWorker", "TrainingCoordinator", "TrainingResult", "train"]
