from src.rl.actor_critic import (
    actor_critic_update,
    discounted_returns,
    policy_upstream,
    select_action,
)

__all__ = [
    "actor_critic_update",
    "discounted_returns",
    "policy_upstream",
    "select_action",
]
