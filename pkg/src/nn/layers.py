"""Layers of the numpy network core.

Every layer owns its parameters as float64 arrays, applies its activation in ``forward`` and
returns a cache that ``backward`` consumes. ``backward`` receives the gradient of the loss
with respect to the layer's activated output.
"""

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class Activation(str, enum.Enum):
    TANH = "tanh"
    LINEAR = "linear"
    SOFTMAX = "softmax"


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z)
    e = np.exp(shifted)
    return e / e.sum()


def activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation == Activation.TANH:
        return np.tanh(z)
    if activation == Activation.SOFTMAX:
        return softmax(z.ravel()).reshape(z.shape)
    return z


def activation_backward(y: np.ndarray, upstream: np.ndarray, activation: Activation) -> np.ndarray:
    """Gradient w.r.t. the pre-activation given the activated output ``y``."""
    if activation == Activation.TANH:
        return upstream * (1.0 - y * y)
    if activation == Activation.SOFTMAX:
        return y * (upstream - np.sum(upstream * y))
    return upstream


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int):
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


@dataclass
class LayerCache:
    x: np.ndarray
    y: np.ndarray
    extra: Any = None


class Layer:
    kind: str = "layer"
    param_names: tuple[str, ...] = ("weight", "bias")

    def __init__(self, activation: Activation):
        self.activation = Activation(activation)
        self.params: dict[str, np.ndarray] = {}

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        raise NotImplementedError

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, LayerCache]:
        raise NotImplementedError

    def backward(
        self, cache: LayerCache, upstream: np.ndarray
    ) -> tuple[dict[str, np.ndarray], np.ndarray]:
        """Return ``(parameter gradients, gradient w.r.t. the layer input)``."""
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def parameters(self) -> list[np.ndarray]:
        return [self.params[name] for name in self.param_names]


class Conv1D(Layer):
    """1-D convolution over ``(channels, length)`` inputs with same padding and stride 1.

    ``groups`` splits the channels into independent branches: group ``g`` maps input channels
    ``g * in/groups ...`` to output channels ``g * out/groups ...``.
    """

    kind = "conv1d"

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        activation: Activation = Activation.TANH,
        groups: int = 1,
        rng: np.random.Generator | None = None,
    ):
        super().__init__(activation)
        if in_channels % groups or out_channels % groups:
            raise ValueError("channels must be divisible by groups")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.groups = groups
        self.pad_left = (kernel_size - 1) // 2
        self.pad_right = kernel_size - 1 - self.pad_left

        cin_g = in_channels // groups
        cout_g = out_channels // groups
        shape = (out_channels, cin_g, kernel_size)
        if rng is None:
            self.params["weight"] = np.zeros(shape)
        else:
            self.params["weight"] = glorot_uniform(
                rng, shape, fan_in=cin_g * kernel_size, fan_out=cout_g * kernel_size
            )
        self.params["bias"] = np.zeros(out_channels)

    def output_shape(self, input_shape):
        return (self.out_channels, input_shape[1])

    def _grouped_weight(self) -> np.ndarray:
        w = self.params["weight"]
        return w.reshape(self.groups, self.out_channels // self.groups, *w.shape[1:])

    def forward(self, x):
        length = x.shape[1]
        padded = np.pad(x, ((0, 0), (self.pad_left, self.pad_right)))
        # (C_in, L, k) -> (G, C_in/G, L, k)
        windows = sliding_window_view(padded, self.kernel_size, axis=1)
        windows = windows.reshape(self.groups, self.in_channels // self.groups, length, -1)
        z = np.einsum("gocj,gclj->gol", self._grouped_weight(), windows)
        z = z.reshape(self.out_channels, length) + self.params["bias"][:, None]
        y = activate(z, self.activation)
        return y, LayerCache(x=x, y=y, extra=windows)

    def backward(self, cache, upstream):
        dz = activation_backward(cache.y, upstream, self.activation)
        length = dz.shape[1]
        dz_g = dz.reshape(self.groups, self.out_channels // self.groups, length)
        windows = cache.extra

        d_weight = np.einsum("gol,gclj->gocj", dz_g, windows).reshape(self.params["weight"].shape)
        d_bias = dz.sum(axis=1)

        d_windows = np.einsum("gocj,gol->gclj", self._grouped_weight(), dz_g)
        d_windows = d_windows.reshape(self.in_channels, length, self.kernel_size)
        d_padded = np.zeros((self.in_channels, length + self.kernel_size - 1))
        for j in range(self.kernel_size):
            d_padded[:, j:j + length] += d_windows[:, :, j]
        dx = d_padded[:, self.pad_left:self.pad_left + length]
        return {"weight": d_weight, "bias": d_bias}, dx

    def descriptor(self):
        return {
            "kind": self.kind,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "kernel_size": self.kernel_size,
            "groups": self.groups,
            "activation": self.activation.value,
        }


class Dense(Layer):
    """Fully connected layer; inputs of any shape are flattened."""

    kind = "dense"

    def __init__(
        self,
        in_features: int,
        out_features: int,
        activation: Activation = Activation.TANH,
        rng: np.random.Generator | None = None,
    ):
        super().__init__(activation)
        self.in_features = in_features
        self.out_features = out_features
        shape = (out_features, in_features)
        if rng is None:
            self.params["weight"] = np.zeros(shape)
        else:
            self.params["weight"] = glorot_uniform(rng, shape, in_features, out_features)
        self.params["bias"] = np.zeros(out_features)

    def output_shape(self, input_shape):
        return (self.out_features,)

    def forward(self, x):
        flat = x.reshape(-1)
        z = self.params["weight"] @ flat + self.params["bias"]
        y = activate(z, self.activation)
        return y, LayerCache(x=x, y=y)

    def backward(self, cache, upstream):
        dz = activation_backward(cache.y, upstream, self.activation)
        flat = cache.x.reshape(-1)
        grads = {"weight": np.outer(dz, flat), "bias": dz.copy()}
        dx = (self.params["weight"].T @ dz).reshape(cache.x.shape)
        return grads, dx

    def descriptor(self):
        return {
            "kind": self.kind,
            "in_features": self.in_features,
            "out_features": self.out_features,
            "activation": self.activation.value,
        }


def layer_from_descriptor(desc: dict) -> Layer:
    """Build a zero-initialized layer from its descriptor."""
    kind = desc.get("kind")
    if kind == Conv1D.kind:
        return Conv1D(
            desc["in_channels"],
            desc["out_channels"],
            desc["kernel_size"],
            Activation(desc["activation"]),
            groups=desc.get("groups", 1),
        )
    if kind == Dense.kind:
        return Dense(desc["in_features"], desc["out_features"], Activation(desc["activation"]))
    raise ValueError(f"unknown layer kind: {kind}")
