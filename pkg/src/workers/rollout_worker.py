import logging
from dataclasses import dataclass, field

import numpy as np

from src.models.channel import ChannelModel
from src.models.learning import ActionMode, Transition
from src.nn.network import Gradients, Network
from src.rl.actor_critic import actor_critic_update, select_action
from src.schemas.scenario import ScenarioPreset
from src.services import reward_service, state_service
from src.services.scheduler_service import Scheduler
from src.services.simulation_service import Environment

logger = logging.getLogger(__name__)


@dataclass
class EpochResult:
    worker: int
    actor_grads: Gradients
    critic_grads: Gradients
    rewards: list[float] = field(default_factory=list)
    empty_windows: int = 0

    @property
    def mean_reward(self) -> float:
        return float(np.mean(self.rewards)) if self.rewards else 0.0


class RolloutWorker:
    """One environment instance collecting transitions on parameter snapshots.

    The environment persists across epochs; only the parameters change between them.
    """

    def __init__(
        self,
        index: int,
        scenario: ScenarioPreset,
        seed: int,
        channel_model: ChannelModel | None = None,
    ):
        self.index = index
        self.scenario = scenario
        self.train = scenario.train
        self.rng = np.random.default_rng(seed)
        # actions come from the actor snapshot, so the environment's own scheduler stays idle
        self.env = Environment(scenario, Scheduler(), self.rng, channel_model=channel_model)
        self.env.reset()
        self.window_ms = self.train.reward_window * scenario.doca.cam_period

    def collect_epoch(
        self,
        actor: Network,
        critic: Network,
        channel_model: ChannelModel | None = None,
    ) -> EpochResult:
        if channel_model is not None and channel_model != self.env.channel.model:
            self.env.set_channel_model(channel_model)

        kind = self.scenario.environment
        transitions: list[Transition] = []
        empty = 0
        while len(transitions) < self.train.actions_per_epoch:
            if self.env.request() is None:
                self.env.run_interval()
                continue
            state = state_service.encode_context(
                self.env.context(), kind, self.train.history_length
            )
            action = select_action(actor, state, ActionMode.SAMPLE, self.rng)
            self.env.commit(action)
            unused = self.env.unused_resources()

            # a second arrival on the same tick leaves this action an empty window
            window = []
            if self.env.request() is None:
                window = self.env.run_interval(self.window_ms)
            reward, was_empty = reward_service.window_reward(
                kind,
                [r.prr for r in window],
                unused,
                self.train.reward_keeps_success_branch,
            )
            empty += int(was_empty)
            transitions.append(Transition(state=state, action=action, reward=reward))

        actor_grads, critic_grads = actor_critic_update(
            transitions,
            actor,
            critic,
            discount=self.train.discount,
            entropy_coef=self.train.entropy_coef,
        )
        return EpochResult(
            worker=self.index,
            actor_grads=actor_grads,
            critic_grads=critic_grads,
            rewards=[t.reward for t in transitions],
            empty_windows=empty,
        )
