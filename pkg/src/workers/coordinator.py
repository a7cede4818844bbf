import asyncio
import logging
import signal
from dataclasses import dataclass, field

from src.core.exceptions import TrainingDivergenceError
from src.core.seeding import derive_seed, make_rng
from src.models.channel import ChannelModel
from src.nn.architectures import build_networks
from src.nn.checkpoint import Checkpoint
from src.nn.network import Gradients
from src.nn.optimizer import apply_update, make_optimizer_state
from src.schemas.report import EpochReport
from src.schemas.scenario import ScenarioPreset
from src.workers.rollout_worker import EpochResult, RolloutWorker

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpochSlot:
    epoch: int
    stage: int
    channel_model: ChannelModel
    # epoch index within the stage; learning-rate schedules restart at each stage
    stage_epoch: int


@dataclass
class TrainingResult:
    checkpoint: Checkpoint
    curve: list[EpochReport] = field(default_factory=list)
    completed: bool = True


class TrainingCoordinator:
    """Owns the canonical actor/critic and applies the workers' gradients.

    Seed streams: stream 0 initializes the networks, stream ``i + 1`` drives worker ``i``.

    - sync: every epoch all workers run on the same snapshot; their gradients are averaged in
      worker order and applied once.
    - async: each worker applies its own gradients under a lock as soon as it finishes.
    """

    def __init__(
        self,
        scenario: ScenarioPreset,
        *,
        workers: int | None = None,
        epochs: int | None = None,
        sync: bool | None = None,
        seed: int | None = None,
        initial: Checkpoint | None = None,
    ):
        cfg = scenario.train
        self.scenario = scenario
        self.cfg = cfg
        self.n_workers = workers if workers is not None else cfg.workers
        self.epochs = epochs if epochs is not None else cfg.epochs
        self.sync = sync if sync is not None else cfg.sync
        self.seed = seed if seed is not None else cfg.seed
        self.running = False
        self.lock = asyncio.Lock()

        if initial is not None:
            self.actor, self.critic = initial.actor.clone(), initial.critic.clone()
        else:
            self.actor, self.critic = build_networks(
                scenario.environment,
                scenario.pool.n_tbs,
                cfg.history_length,
                cfg.architecture,
                make_rng(self.seed, 0),
            )
        self.actor_opt = make_optimizer_state(
            self.actor, cfg.optimizer, cfg.rms_decay, cfg.rms_epsilon
        )
        self.critic_opt = make_optimizer_state(
            self.critic, cfg.optimizer, cfg.rms_decay, cfg.rms_epsilon
        )

        plan = cfg.model_copy(update={"epochs": self.epochs}).stage_plan(scenario.channel.model)
        self.slots = self._expand(plan)
        self.workers = [
            RolloutWorker(i, scenario, derive_seed(self.seed, i + 1), plan[0][0])
            for i in range(self.n_workers)
        ]

        self.curve: list[EpochReport] = []
        self.last_good = self._checkpoint(0)
        self._partial: dict[int, list[EpochResult]] = {}

    @staticmethod
    def _expand(plan: list[tuple[ChannelModel, int]]) -> list[EpochSlot]:
        slots = []
        for stage, (model, count) in enumerate(plan):
            for stage_epoch in range(count):
                slots.append(EpochSlot(len(slots), stage, model, stage_epoch))
        return slots

    def _checkpoint(self, epochs_done: int) -> Checkpoint:
        return Checkpoint(
            self.actor.clone(),
            self.critic.clone(),
            {
                "scenario": self.scenario.name,
                "environment": self.scenario.environment.value,
                "epochs": epochs_done,
                "seed": self.seed,
            },
        )

    # ----- lifecycle -----

    async def start(self) -> TrainingResult:
        self.running = True
        logger.info(
            f"Training {self.scenario.name}: {self.epochs} epochs, {self.n_workers} workers, "
            f"{'sync' if self.sync else 'async'}"
        )
        try:
            await self.run_loop()
        finally:
            self.running = False
        completed = len(self.curve) == len(self.slots)
        return TrainingResult(self._checkpoint(len(self.curve)), list(self.curve), completed)

    def stop(self):
        self.running = False
        logger.info("Training stop requested")

    async def run_loop(self):
        if self.sync:
            await self._run_sync()
        else:
            await asyncio.gather(*(self._run_worker(w) for w in self.workers))

    # ----- updates -----

    def _learning_rates(self, slot: EpochSlot) -> tuple[float, float]:
        return self.cfg.lr_actor.at(slot.stage_epoch), self.cfg.lr_critic.at(slot.stage_epoch)

    def _apply(self, actor_grads: Gradients, critic_grads: Gradients, slot: EpochSlot) -> None:
        lr_actor, lr_critic = self._learning_rates(slot)
        try:
            apply_update(self.actor, actor_grads, lr_actor, self.actor_opt)
            apply_update(self.critic, critic_grads, lr_critic, self.critic_opt)
        except TrainingDivergenceError as e:
            self.running = False
            logger.warning(f"Epoch {slot.epoch}: {e.message}; keeping the last good parameters")
            self.actor = self.last_good.actor.clone()
            self.critic = self.last_good.critic.clone()
            raise TrainingDivergenceError(
                f"training diverged at epoch {slot.epoch}: {e.message}",
                last_good=self.last_good,
            ) from e

    def _stage_switch(self, slot: EpochSlot) -> None:
        if slot.stage_epoch == 0:
            logger.info(f"Stage {slot.stage}: training on {slot.channel_model.value}")

    def _report(self, slot: EpochSlot, results: list[EpochResult]) -> EpochReport:
        means = [r.mean_reward for r in results]
        lr_actor, lr_critic = self._learning_rates(slot)
        empty = sum(r.empty_windows for r in results)
        report = EpochReport(
            epoch=slot.epoch,
            stage=slot.channel_model.value,
            mean_reward=sum(means) / len(means),
            min_reward=min(means),
            max_reward=max(means),
            lr_actor=lr_actor,
            lr_critic=lr_critic,
            empty_windows=empty,
        )
        self.curve.append(report)
        self.last_good = self._checkpoint(len(self.curve))
        logger.info(
            f"Epoch {slot.epoch} [{report.stage}] reward mean={report.mean_reward:.3f} "
            f"min={report.min_reward:.3f} max={report.max_reward:.3f} "
            f"lr={lr_actor:.2e}/{lr_critic:.2e}"
        )
        if empty:
            logger.warning(f"Epoch {slot.epoch}: {empty} reward windows without transmissions")
        return report

    async def _run_sync(self):
        for slot in self.slots:
            if not self.running:
                break
            self._stage_switch(slot)
            actor, critic = self.actor.clone(), self.critic.clone()
            results = await asyncio.gather(
                *(
                    asyncio.to_thread(w.collect_epoch, actor, critic, slot.channel_model)
                    for w in self.workers
                )
            )
            self._apply(
                Gradients.mean([r.actor_grads for r in results]),
                Gradients.mean([r.critic_grads for r in results]),
                slot,
            )
            self._report(slot, list(results))

    async def _run_worker(self, worker: RolloutWorker):
        for slot in self.slots:
            if not self.running:
                break
            async with self.lock:
                if worker.index == 0:
                    self._stage_switch(slot)
                actor, critic = self.actor.clone(), self.critic.clone()
            result = await asyncio.to_thread(
                worker.collect_epoch, actor, critic, slot.channel_model
            )
            async with self.lock:
                self._apply(result.actor_grads, result.critic_grads, slot)
                done = self._partial.setdefault(slot.epoch, [])
                done.append(result)
                if len(done) == self.n_workers:
                    del self._partial[slot.epoch]
                    self._report(slot, sorted(done, key=lambda r: r.worker))


def train(
    scenario: ScenarioPreset,
    *,
    workers: int | None = None,
    epochs: int | None = None,
    sync: bool | None = None,
    seed: int | None = None,
    initial: Checkpoint | None = None,
) -> TrainingResult:
    coordinator = TrainingCoordinator(
        scenario, workers=workers, epochs=epochs, sync=sync, seed=seed, initial=initial
    )

    async def _main() -> TrainingResult:
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGTERM, signal.SIGINT):
            try:
                loop.add_signal_handler(sig, coordinator.stop)
            except (NotImplementedError, RuntimeError, ValueError):
                # not the main thread, or a platform without loop signal handlers
                break
        return await coordinator.start()

    return asyncio.run(_main())
