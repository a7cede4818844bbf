"""Gradient steps on a Network: RMSProp (default) and plain SGD."""

from dataclasses import dataclass, field

import numpy as np

from src.core.exceptions import ConfigError, ShapeMismatchError, TrainingDivergenceError
from src.models.learning import OptimizerKind
from src.nn.network import Gradients, Network


@dataclass
class OptimizerState:
    kind: OptimizerKind = OptimizerKind.RMSPROP
    decay: float = 0.99
    epsilon: float = 1e-6
    # running mean of squared gradients, one array per parameter
    mean_square: list[np.ndarray] = field(default_factory=list)
    steps: int = 0


def make_optimizer_state(
    net: Network,
    kind: OptimizerKind = OptimizerKind.RMSPROP,
    decay: float = 0.99,
    epsilon: float = 1e-6,
) -> OptimizerState:
    return OptimizerState(
        kind=OptimizerKind(kind),
        decay=decay,
        epsilon=epsilon,
        mean_square=[np.zeros_like(p) for p in net.parameters()],
    )


def apply_update(
    net: Network, grads: Gradients, lr: float, state: OptimizerState
) -> Network:
    """Move the parameters against ``grads`` in place and advance ``state``.

    The update is computed in full before any parameter changes, so a non-finite result
    leaves both the network and the optimizer state untouched.
    """
    if lr <= 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    params = net.parameters()
    if len(grads.arrays) != len(params):
        raise ShapeMismatchError("gradients do not match the network")
    grads.check_finite()

    if state.kind == OptimizerKind.SGD:
        new_params = [p - lr * g for p, g in zip(params, grads.arrays)]
        new_squares = state.mean_square
    else:
        new_squares = [
            state.decay * ms + (1.0 - state.decay) * g * g
            for ms, g in zip(state.mean_square, grads.arrays)
        ]
        new_params = [
            p - lr * g / np.sqrt(ms + state.epsilon)
            for p, g, ms in zip(params, grads.arrays, new_squares)
        ]

    if not all(np.isfinite(p).all() for p in new_params):
        raise TrainingDivergenceError("update produced non-finite parameters")
    net.set_parameters(new_params)
    state.mean_square = new_squares
    state.steps += 1
    return net
