"""Action selection and advantage actor-critic gradients.

Gradients returned here are gradients of losses to be minimized:

    actor loss  = -sum_t [ log pi(a_t | s_t) * A_t + entropy_coef * H(pi(. | s_t)) ]
    critic loss =  sum_t (R_t - V(s_t))^2

with R_t the return from step t to the end of the epoch (bootstrap 0) and A_t = R_t - V(s_t).
"""

import logging
from collections.abc import Sequence

import numpy as np

from src.core.exceptions import TrainingDivergenceError
from src.models.learning import ActionMode, Transition
from src.nn.network import Gradients, Network

logger = logging.getLogger(__name__)

# floor for probabilities inside log and division
_PROB_FLOOR = 1e-12


def select_action(
    actor: Network, state: np.ndarray, mode: ActionMode, rng: np.random.Generator
) -> int:
    probs = actor.forward(state)
    if ActionMode(mode) == ActionMode.GREEDY:
        # argmax returns the lowest index among ties
        return int(np.argmax(probs))
    return int(rng.choice(probs.size, p=probs / probs.sum()))


def discounted_returns(rewards: Sequence[float], discount: float) -> np.ndarray:
    returns = np.zeros(len(rewards))
    running = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        running = rewards[t] + discount * running
        returns[t] = running
    return returns


def policy_upstream(
    probs: np.ndarray, action: int, advantage: float, entropy_coef: float
) -> np.ndarray:
    """Derivative of one step's actor loss w.r.t. the action probabilities."""
    p = np.maximum(probs, _PROB_FLOOR)
    upstream = entropy_coef * (np.log(p) + 1.0)
    upstream[action] -= advantage / p[action]
    return upstream


def actor_critic_update(
    trajectory: Sequence[Transition],
    actor: Network,
    critic: Network,
    *,
    discount: float = 1.0,
    entropy_coef: float = 0.01,
) -> tuple[Gradients, Gradients]:
    """Actor and critic gradients summed over one worker's epoch."""
    actor_grads = Gradients.zeros_like(actor)
    critic_grads = Gradients.zeros_like(critic)
    if not trajectory:
        return actor_grads, critic_grads

    returns = discounted_returns([t.reward for t in trajectory], discount)
    for transition, ret in zip(trajectory, returns):
        value_out, value_caches = critic.forward_cached(transition.state)
        value = float(value_out[0])
        advantage = ret - value
        if not np.isfinite(advantage):
            raise TrainingDivergenceError(f"non-finite advantage (return {ret}, value {value})")

        probs, actor_caches = actor.forward_cached(transition.state)
        upstream = policy_upstream(probs, transition.action, advantage, entropy_coef)
        actor_grads.add(actor.backward(transition.state, upstream, caches=actor_caches))
        critic_grads.add(
            critic.backward(transition.state, np.array([2.0 * (value - ret)]), caches=value_caches)
        )
    return actor_grads, critic_grads
