"""Resource pool geometry and per-TB occupancy.

TB ids are row-major over subchannels: ids ``0..F-1`` fill subchannel 0, ids ``F..2F-1``
fill subchannel 1, and so on. The pool repeats with a period of F subframes.
"""

from collections.abc import Mapping

import numpy as np

from src.core.exceptions import InvalidTbError
from src.schemas.grid import PoolConfig


def validate_tb(tb: int, pool: PoolConfig) -> int:
    if isinstance(tb, bool) or int(tb) != tb or not 0 <= tb < pool.n_tbs:
        raise InvalidTbError(f"TB id {tb} outside [0, {pool.n_tbs})")
    return int(tb)


def tb_coords(tb: int, pool: PoolConfig) -> tuple[int, int]:
    """Return ``(subchannel, subframe)`` of a TB id."""
    tb = validate_tb(tb, pool)
    return divmod(tb, pool.subframes)


def tb_id(subchannel: int, subframe: int, pool: PoolConfig) -> int:
    if not 0 <= subchannel < pool.subchannels or not 0 <= subframe < pool.subframes:
        raise InvalidTbError(f"cell ({subchannel}, {subframe}) outside the pool")
    return subchannel * pool.subframes + subframe


def tbs_in_subframe(subframe: int, pool: PoolConfig) -> list[int]:
    return [tb_id(sc, subframe, pool) for sc in range(pool.subchannels)]


def pool_subframe(abs_subframe: int, pool: PoolConfig) -> int:
    return abs_subframe % pool.subframes


def occupancy(assignments: Mapping[int, int], pool: PoolConfig) -> np.ndarray:
    """Number of vehicles assigned to each TB.

    ``assignments`` maps vehicle id to TB id; the result has length ``pool.n_tbs``.
    """
    if not assignments:
        return np.zeros(pool.n_tbs, dtype=np.int64)
    tbs = np.fromiter(assignments.values(), dtype=np.int64, count=len(assignments))
    if tbs.min() < 0 or tbs.max() >= pool.n_tbs:
        raise InvalidTbError(f"assignment outside [0, {pool.n_tbs})")
    return np.bincount(tbs, minlength=pool.n_tbs)


def unused_resources(counts: np.ndarray) -> int:
    return int(np.count_nonzero(counts == 0))
