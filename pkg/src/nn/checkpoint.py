"""Checkpoint files.

Layout, all integers little-endian:

    8 bytes   magic ``DOCACKPT``
    uint32    format version
    uint32    descriptor length in bytes
    ...       UTF-8 JSON descriptor: networks (role, input shape, layers) and run metadata
    ...       every parameter array as float64 ('<f8'), actor first, in declaration order
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.core.exceptions import CheckpointError, CheckpointMismatchError
from src.nn.network import Network

logger = logging.getLogger(__name__)

MAGIC = b"DOCACKPT"
FORMAT_VERSION = 1
_HEADER_DTYPE = np.dtype("<u4")
_PARAM_DTYPE = np.dtype("<f8")


@dataclass
class Checkpoint:
    actor: Network
    critic: Network
    metadata: dict = field(default_factory=dict)

    def descriptor(self) -> dict:
        return {
            "format": "doca-sched-checkpoint",
            "version": FORMAT_VERSION,
            "networks": {
                "actor": self.actor.descriptor(),
                "critic": self.critic.descriptor(),
            },
            "parameter_dtype": "<f8",
            "metadata": self.metadata,
        }

    def clone(self) -> "Checkpoint":
        return Checkpoint(self.actor.clone(), self.critic.clone(), dict(self.metadata))


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    descriptor = json.dumps(checkpoint.descriptor(), sort_keys=True).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(np.array([FORMAT_VERSION, len(descriptor)], dtype=_HEADER_DTYPE).tobytes())
        fh.write(descriptor)
        for net in (checkpoint.actor, checkpoint.critic):
            for param in net.parameters():
                fh.write(np.ascontiguousarray(param, dtype=_PARAM_DTYPE).tobytes())
    logger.info(f"Checkpoint written to {path}")
    return path


def _read_header(data: bytes, path: Path) -> tuple[dict, int]:
    if len(data) < len(MAGIC) + 8 or not data.startswith(MAGIC):
        raise CheckpointError(f"{path} is not a checkpoint file")
    version, length = np.frombuffer(data, dtype=_HEADER_DTYPE, count=2, offset=len(MAGIC))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    start = len(MAGIC) + 8
    try:
        descriptor = json.loads(data[start:start + int(length)].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: corrupt descriptor ({e})") from e
    return descriptor, start + int(length)


def read_descriptor(path: str | Path) -> dict:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read {path}: {e}") from e
    descriptor, _ = _read_header(data, path)
    return descriptor


def load_checkpoint(
    path: str | Path,
    expected_actor: dict | None = None,
    expected_critic: dict | None = None,
) -> Checkpoint:
    """Load a checkpoint; expected descriptors, when given, must match exactly."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read {path}: {e}") from e
    descriptor, offset = _read_header(data, path)

    networks = descriptor.get("networks", {})
    for role, expected in (("actor", expected_actor), ("critic", expected_critic)):
        if expected is not None and networks.get(role) != expected:
            raise CheckpointMismatchError(f"{path}: {role} architecture differs from the scenario")
    try:
        actor = Network.from_descriptor(networks["actor"])
        critic = Network.from_descriptor(networks["critic"])
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"{path}: invalid network descriptor ({e})") from e

    for net in (actor, critic):
        arrays = []
        for param in net.parameters():
            nbytes = param.size * _PARAM_DTYPE.itemsize
            if offset + nbytes > len(data):
                raise CheckpointError(f"{path}: truncated parameter data")
            flat = np.frombuffer(data, dtype=_PARAM_DTYPE, count=param.size, offset=offset)
            arrays.append(flat.reshape(param.shape).astype(np.float64))
            offset += nbytes
        net.set_parameters(arrays)
    if offset != len(data):
        raise CheckpointError(f"{path}: trailing bytes after parameter data")
    return Checkpoint(actor, critic, descriptor.get("metadata", {}))
