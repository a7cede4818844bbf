import copy
import enum
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import ShapeMismatchError, TrainingDivergenceError
from src.nn.layers import Activation, Layer, layer_from_descriptor


class NetworkRole(str, enum.Enum):
    ACTOR = "actor"
    CRITIC = "critic"


@dataclass
class Gradients:
    """Per-parameter gradients, in the network's parameter declaration order."""

    arrays: list[np.ndarray]

    @classmethod
    def zeros_like(cls, net: "Network") -> "Gradients":
        return cls([np.zeros_like(p) for p in net.parameters()])

    def add(self, other: "Gradients") -> "Gradients":
        if len(other.arrays) != len(self.arrays):
            raise ShapeMismatchError("gradient sets of different networks")
        for mine, theirs in zip(self.arrays, other.arrays):
            mine += theirs
        return self

    def scale(self, factor: float) -> "Gradients":
        for array in self.arrays:
            array *= factor
        return self

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.arrays)

    def check_finite(self) -> "Gradients":
        if not self.is_finite():
            raise TrainingDivergenceError("non-finite gradient")
        return self

    @classmethod
    def mean(cls, grads: list["Gradients"]) -> "Gradients":
        if not grads:
            raise ValueError("no gradients to average")
        total = cls([a.copy() for a in grads[0].arrays])
        for g in grads[1:]:
            total.add(g)
        return total.scale(1.0 / len(grads))


class Network:
    """A feed-forward stack of conv1d / dense layers.

    The actor ends in a softmax over the N TBs, the critic in a single linear unit.
    """

    def __init__(self, role: NetworkRole, input_shape: tuple[int, ...], layers: list[Layer]):
        self.role = NetworkRole(role)
        self.input_shape = tuple(input_shape)
        self.layers = layers
        self._check_layout()

    def _check_layout(self) -> None:
        if not self.layers:
            raise ShapeMismatchError("network has no layers")
        shape = self.input_shape
        for index, layer in enumerate(self.layers):
            expected = getattr(layer, "in_channels", None)
            if expected is not None and (len(shape) != 2 or shape[0] != expected):
                raise ShapeMismatchError(f"layer {index} expects {expected} channels, got {shape}")
            expected = getattr(layer, "in_features", None)
            if expected is not None and int(np.prod(shape)) != expected:
                raise ShapeMismatchError(f"layer {index} expects {expected} inputs, got {shape}")
            last = index == len(self.layers) - 1
            actor_head = last and self.role == NetworkRole.ACTOR
            critic_head = last and self.role == NetworkRole.CRITIC
            if layer.activation == Activation.SOFTMAX and not actor_head:
                raise ShapeMismatchError("softmax is only allowed on the actor's final layer")
            if layer.activation == Activation.LINEAR and not critic_head:
                raise ShapeMismatchError("linear is only allowed on the critic's final layer")
            shape = layer.output_shape(shape)
        self.output_shape = shape

    # ----- evaluation -----

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.input_shape:
            raise ShapeMismatchError(f"input shape {x.shape} != {self.input_shape}")
        return x

    def forward(self, x: np.ndarray) -> np.ndarray:
        out, _ = self.forward_cached(x)
        return out

    def forward_cached(self, x: np.ndarray):
        x = self._check_input(x)
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x)
            caches.append(cache)
        return x, caches

    def value(self, x: np.ndarray) -> float:
        return float(self.forward(x)[0])

    def backward(self, x: np.ndarray, upstream: np.ndarray, caches=None) -> Gradients:
        """Gradients of the loss whose derivative w.r.t. the output is ``upstream``."""
        if caches is None:
            _, caches = self.forward_cached(x)
        grad = np.asarray(upstream, dtype=np.float64).reshape(self.output_shape)
        per_layer = []
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            param_grads, grad = layer.backward(cache, grad)
            if not np.isfinite(grad).all():
                raise TrainingDivergenceError(f"non-finite gradient in {layer.kind} layer")
            per_layer.append([param_grads[name] for name in layer.param_names])
        arrays = [a for group in reversed(per_layer) for a in group]
        return Gradients(arrays).check_finite()

    # ----- parameters -----

    def parameters(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.parameters()]

    def set_parameters(self, arrays: list[np.ndarray]) -> None:
        params = self.parameters()
        if len(arrays) != len(params):
            raise ShapeMismatchError("parameter count mismatch")
        for target, source in zip(params, arrays):
            if target.shape != source.shape:
                raise ShapeMismatchError(f"parameter shape {source.shape} != {target.shape}")
            target[...] = source

    def parameters_finite(self) -> bool:
        return all(np.isfinite(p).all() for p in self.parameters())

    def clone(self) -> "Network":
        return copy.deepcopy(self)

    def descriptor(self) -> dict:
        return {
            "role": self.role.value,
            "input_shape": list(self.input_shape),
            "layers": [layer.descriptor() for layer in self.layers],
        }

    @classmethod
    def from_descriptor(cls, descriptor: dict) -> "Network":
        layers = [layer_from_descriptor(layer) for layer in descriptor["layers"]]
        return cls(NetworkRole(descriptor["role"]), tuple(descriptor["input_shape"]), layers)


def forward(net: Network, x: np.ndarray) -> np.ndarray:
    return net.forward(x)


def backward(net: Network, x: np.ndarray, upstream: np.ndarray) -> Gradients:
    return net.backward(x, upstream)
