"""Actor and critic layouts per environment kind.

E1 (input 1 x N): conv1d, conv1d, dense, head.
E2 (input 3 x K): one conv1d branch per state row (a grouped convolution), a shared conv1d,
then the head directly.

The actor head is a softmax over the N TBs, the critic head a single linear unit. Actor and
critic never share layers.
"""

import numpy as np

from src.models.learning import EnvironmentKind
from src.nn.layers import Activation, Conv1D, Dense
from src.nn.network import Network, NetworkRole
from src.schemas.training import ArchitectureConfig


def _head(role: NetworkRole, in_features: int, n_tbs: int, rng) -> Dense:
    if role == NetworkRole.ACTOR:
        return Dense(in_features, n_tbs, Activation.SOFTMAX, rng=rng)
    return Dense(in_features, 1, Activation.LINEAR, rng=rng)


def build_e1(
    role: NetworkRole, n_tbs: int, arch: ArchitectureConfig, rng: np.random.Generator
) -> Network:
    first, second = arch.conv_filters
    layers = [
        Conv1D(1, first, arch.kernel_size, Activation.TANH, rng=rng),
        Conv1D(first, second, arch.kernel_size, Activation.TANH, rng=rng),
        Dense(second * n_tbs, arch.hidden_units, Activation.TANH, rng=rng),
        _head(role, arch.hidden_units, n_tbs, rng),
    ]
    return Network(role, (1, n_tbs), layers)


def build_e2(
    role: NetworkRole,
    n_tbs: int,
    history_length: int,
    arch: ArchitectureConfig,
    rng: np.random.Generator,
) -> Network:
    branches = 3 * arch.branch_filters
    layers = [
        Conv1D(3, branches, arch.kernel_size, Activation.TANH, groups=3, rng=rng),
        Conv1D(branches, arch.shared_filters, arch.kernel_size, Activation.TANH, rng=rng),
        _head(role, arch.shared_filters * history_length, n_tbs, rng),
    ]
    return Network(role, (3, history_length), layers)


def build_networks(
    kind: EnvironmentKind,
    n_tbs: int,
    history_length: int,
    arch: ArchitectureConfig,
    rng: np.random.Generator,
) -> tuple[Network, Network]:
    """Return freshly initialized ``(actor, critic)``."""
    if kind == EnvironmentKind.E1:
        return (
            build_e1(NetworkRole.ACTOR, n_tbs, arch, rng),
            build_e1(NetworkRole.CRITIC, n_tbs, arch, rng),
        )
    return (
        build_e2(NetworkRole.ACTOR, n_tbs, history_length, arch, rng),
        build_e2(NetworkRole.CRITIC, n_tbs, history_length, arch, rng),
    )
