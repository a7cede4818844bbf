from collections.abc import Sequence

from src.core.exceptions import NoTransmissionsError
from src.models.learning import EnvironmentKind


# =============================================================================
# REWARD CONSTANTS
# =============================================================================

# Reward when every transmission in the window reaches the PRR target
SUCCESS_REWARD = 10.0

# Minimum PRR (inclusive) for the success branch
PRR_TARGET = 0.9

# Penalty scale applied to (1 - min PRR)
FAILURE_SCALE = 10.0


# =============================================================================
# REWARDS
# =============================================================================

def reward_e1(prr_per_transmission: Sequence[float]) -> float:
    if len(prr_per_transmission) == 0:
        raise NoTransmissionsError()
    worst = min(prr_per_transmission)
    if worst >= PRR_TARGET:
        return SUCCESS_REWARD
    return -FAILURE_SCALE * (1.0 - worst)


def reward_e2(
    prr_per_transmission: Sequence[float],
    unused_resources: int,
    keep_success_branch: bool = True,
) -> float:
    """E1 reward minus the number of TBs left unassigned.

    With ``keep_success_branch`` off the reward is always ``-10 (1 - min PRR) - N0``.
    """
    if len(prr_per_transmission) == 0:
        raise NoTransmissionsError()
    if keep_success_branch:
        base = reward_e1(prr_per_transmission)
    else:
        base = -FAILURE_SCALE * (1.0 - min(prr_per_transmission))
    return base - unused_resources


def window_reward(
    kind: EnvironmentKind,
    prr_per_transmission: Sequence[float],
    unused_resources: int,
    keep_success_branch: bool = True,
) -> tuple[float, bool]:
    """Reward of one action's window; returns ``(reward, window_was_empty)``.

    An empty window yields 0 in E1 and ``-N0`` in E2.
    """
    try:
        if kind == EnvironmentKind.E1:
            return reward_e1(prr_per_transmission), False
        return reward_e2(prr_per_transmission, unused_resources, keep_success_branch), False
    except NoTransmissionsError:
        return (0.0 if kind == EnvironmentKind.E1 else -float(unused_resources)), True
