"""Observation encodings for the RL scheduler.

E1 quantizes the occupancy of every TB to {-1, 0, 1}. E2 is a 3 x K matrix of the last K-1
actions (elapsed seconds, direction, TB) followed by the requester column (0, direction, -1).
"""

import math
from collections.abc import Sequence

import numpy as np

from src.models.learning import EnvironmentKind
from src.models.scheduling import ActionRecord, AssignContext
from src.schemas.grid import PoolConfig

# cold-start column: no action yet (direction 0) and no TB
NEUTRAL_COLUMN = (0.0, 0.0, -1.0)


def encode_e1(occupancy: np.ndarray) -> np.ndarray:
    counts = np.asarray(occupancy)
    return np.where(counts == 0, -1.0, np.where(counts == 1, 0.0, 1.0))


def round_elapsed(seconds: float) -> int:
    """Round to the closest whole second, halves up."""
    return int(math.floor(seconds + 0.5))


def encode_e2(
    history: Sequence[ActionRecord],
    requester_direction: int,
    history_length: int = 30,
) -> np.ndarray:
    """Build the 3 x K action-history matrix, oldest action first.

    Only the newest K-1 actions are kept; a shorter history is left-padded with neutral
    columns.
    """
    kept = list(history)[-(history_length - 1):] if history_length > 1 else []
    state = np.empty((3, history_length), dtype=np.float64)
    pad = history_length - 1 - len(kept)
    state[:, :pad] = np.array(NEUTRAL_COLUMN)[:, None]
    for column, record in enumerate(kept, start=pad):
        state[0, column] = round_elapsed(record.elapsed_s)
        state[1, column] = record.direction
        state[2, column] = record.tb
    state[:, -1] = (0.0, float(requester_direction), -1.0)
    return state


def input_shape(kind: EnvironmentKind, pool: PoolConfig, history_length: int) -> tuple[int, int]:
    if kind == EnvironmentKind.E1:
        return (1, pool.n_tbs)
    return (3, history_length)


def encode_context(ctx: AssignContext, kind: EnvironmentKind, history_length: int) -> np.ndarray:
    """Network input for the vehicle requesting a TB."""
    if kind == EnvironmentKind.E1:
        return encode_e1(ctx.occupancy)[None, :]
    return encode_e2(ctx.action_history, ctx.direction, history_length)
