from src.nn.architectures import build_networks
from src.nn.checkpoint import Checkpoint, load_checkpoint, read_descriptor, save_checkpoint
from src.nn.layers import Activation, Conv1D, Dense
from src.nn.network import Gradients, Network, NetworkRole, backward, forward
from src.nn.optimizer import OptimizerState, apply_update, make_optimizer_state

__all__ = [
    "build_networks",
    "Checkpoint",
    "load_checkpoint",
    "read_descriptor",
    "save_checkpoint",
    "Activation",
    "Conv1D",
    "Dense",
    "Gradients",
    "Network",
    "NetworkRole",
    "backward",
    "forward",
    "OptimizerState",
    "apply_update",
    "make_optimizer_state",
]
