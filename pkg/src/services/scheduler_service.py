"""Schedulers: the interface all of them implement and the baselines.

Centralized schedulers (random, round-robin, RL) pick a TB once, when a vehicle enters the
DOCA. Mode-4 vehicles choose for themselves among the least busy TBs they sensed: once on
arrival, from what they heard while approaching, and again whenever their TB no longer looks
as quiet as the quietest one.
"""

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import replace

import numpy as np

from src.models.channel import ChannelModel
from src.models.learning import ActionMode, EnvironmentKind
from src.models.scheduling import (
    AssignContext,
    ReselectionMode,
    SchedulerKind,
    SensingRecord,
)
from src.models.vehicle import Direction, Vehicle
from src.nn.network import Network
from src.rl.actor_critic import select_action
from src.schemas.channel import ChannelConfig
from src.schemas.grid import PoolConfig
from src.schemas.scheduler import Mode4Config
from src.services import channel_service, grid_service, state_service

logger = logging.getLogger(__name__)


class Scheduler:
    kind: SchedulerKind

    def assign(self, ctx: AssignContext, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def on_enter(self, vehicle: Vehicle, rng: np.random.Generator) -> None:
        """Called once the vehicle holds its TB (prefilled vehicles included)."""

    def on_exit(self, vehicle: Vehicle) -> None:
        pass

    def observe_subframe(
        self,
        abs_subframe: int,
        transmitters: Sequence[tuple[Vehicle, int]],
        vehicles: Iterable[Vehicle],
        channel: ChannelConfig,
        shadows: channel_service.ShadowField | None,
    ) -> None:
        pass

    def on_period_end(
        self, assignments: Mapping[int, int], rng: np.random.Generator
    ) -> dict[int, int]:
        """TB changes decided at the end of a control period, by vehicle id."""
        return {}


class RandomScheduler(Scheduler):
    kind = SchedulerKind.RANDOM

    def assign(self, ctx, rng):
        return int(rng.integers(ctx.pool.n_tbs))


class RoundRobinScheduler(Scheduler):
    kind = SchedulerKind.ROUND_ROBIN

    def __init__(self):
        self._next = 0

    def assign(self, ctx, rng):
        tb = self._next % ctx.pool.n_tbs
        self._next = tb + 1
        return tb


# =============================================================================
# MODE-4
# =============================================================================

def candidate_count(n_tbs: int, best_fraction: float = 0.2) -> int:
    return max(1, math.ceil(best_fraction * n_tbs - 1e-9))


def new_sensing_record(n_tbs: int, window: int, floor: float, counter: int = 0) -> SensingRecord:
    return SensingRecord(
        energies=np.full(n_tbs, floor, dtype=np.float64),
        samples=np.full((window, n_tbs), np.nan),
        write_index=np.zeros(n_tbs, dtype=np.int64),
        counter=counter,
    )


def mode4_sense(record: SensingRecord, observations: Mapping[int, float]) -> SensingRecord:
    """Fold one subframe's per-TB energies into the sensing window.

    Each TB keeps its last ``window`` samples; its energy is their mean. TBs absent from
    ``observations`` keep their previous energy.
    """
    window = record.samples.shape[0]
    for tb, energy in observations.items():
        record.samples[record.write_index[tb] % window, tb] = energy
        record.write_index[tb] += 1
        column = record.samples[:, tb]
        record.energies[tb] = float(np.mean(column[~np.isnan(column)]))
    return record


def mode4_select(
    record: SensingRecord,
    rng: np.random.Generator,
    pool: PoolConfig,
    *,
    best_fraction: float = 0.2,
    counter: int = 0,
) -> int:
    """Pick uniformly among the lowest-energy TBs and reset the reselection counter.

    Ties at the candidate boundary are broken uniformly at random.
    """
    k = candidate_count(pool.n_tbs, best_fraction)
    order = rng.permutation(pool.n_tbs)
    ranked = order[np.argsort(record.energies[order], kind="stable")]
    candidates = ranked[:k]
    record.counter = counter
    return int(candidates[rng.integers(k)])


def mode4_keeps(record: SensingRecord, tb: int) -> bool:
    """Whether the held TB still looks as quiet as the quietest TB.

    The holder never senses its own subframe, so ``energies[tb]`` is the value it saw when it
    picked the TB.
    """
    return bool(record.energies[tb] <= record.energies.min() * (1.0 + 1e-9))


def copy_sensing_record(record: SensingRecord) -> SensingRecord:
    return replace(
        record,
        energies=record.energies.copy(),
        samples=record.samples.copy(),
        write_index=record.write_index.copy(),
    )


class Mode4Scheduler(Scheduler):
    kind = SchedulerKind.MODE4

    def __init__(
        self,
        config: Mode4Config,
        pool: PoolConfig,
        channel: ChannelConfig,
        *,
        doca_length: float = 500.0,
    ):
        self.config = config
        self.pool = pool
        self.channel = channel
        self.records: dict[int, SensingRecord] = {}
        self._arriving: dict[int, SensingRecord] = {}

        if channel.model == ChannelModel.E2_FULL:
            self._floor = channel_service.dbm_to_mw(channel_service.effective_noise_power(channel))
        else:
            self._floor = config.idle_energy

        # silent listeners at both entry points; an arriving vehicle starts from their record
        self.approach: dict[Direction, tuple[Vehicle, SensingRecord]] = {}
        for listener_id, direction in enumerate(Direction, start=1):
            listener = Vehicle(
                id=-listener_id,
                direction=direction,
                position=0.0 if direction == Direction.EAST else doca_length,
                speed=0.0,
                lane_offset=0.0,
                entry_time_ms=0.0,
            )
            record = new_sensing_record(pool.n_tbs, config.sensing_window, self._floor)
            self.approach[direction] = (listener, record)

        self.reset_statistics()

    # ----- statistics -----

    def reset_statistics(self) -> None:
        self.selections = 0
        self.collisions = 0
        # selections made while fewer TBs were free than there are candidates
        self.last_selections = 0
        self.last_collisions = 0

    @property
    def collision_rate(self) -> float | None:
        if self.selections == 0:
            return None
        return self.collisions / self.selections

    @property
    def last_selector_collision_rate(self) -> float | None:
        if self.last_selections == 0:
            return None
        return self.last_collisions / self.last_selections

    def _count(self, tb: int, taken: np.ndarray) -> None:
        collided = bool(taken[tb])
        self.selections += 1
        self.collisions += int(collided)
        free = int(np.count_nonzero(~taken))
        if free < candidate_count(self.pool.n_tbs, self.config.best_fraction):
            self.last_selections += 1
            self.last_collisions += int(collided)

    # ----- lifecycle -----

    def _draw_counter(self, rng: np.random.Generator) -> int:
        if self.config.reselection == ReselectionMode.COUNTER:
            return int(rng.integers(self.config.counter_min, self.config.counter_max + 1))
        return self.config.sensing_window

    def _select(self, record: SensingRecord, rng: np.random.Generator) -> int:
        return mode4_select(
            record,
            rng,
            self.pool,
            best_fraction=self.config.best_fraction,
            counter=self._draw_counter(rng),
        )

    def assign(self, ctx, rng):
        # out of coverage: the vehicle picks from what it sensed on its way in
        _, heard = self.approach[Direction(ctx.direction)]
        record = copy_sensing_record(heard)
        tb = self._select(record, rng)
        self._count(tb, np.asarray(ctx.occupancy) > 0)
        self._arriving[ctx.vehicle_id] = record
        return tb

    def on_enter(self, vehicle, rng):
        record = self._arriving.pop(vehicle.id, None)
        if record is not None:
            self.records[vehicle.id] = record
            return
        if vehicle.prefilled:
            # desynchronize the initial population's reselections
            counter = int(rng.integers(1, self._draw_counter(rng) + 1))
        else:
            counter = self._draw_counter(rng)
        self.records[vehicle.id] = new_sensing_record(
            self.pool.n_tbs, self.config.sensing_window, self._floor, counter
        )

    def on_exit(self, vehicle):
        self.records.pop(vehicle.id, None)
        self._arriving.pop(vehicle.id, None)

    # ----- sensing -----

    def _energy(
        self,
        sensing: Vehicle,
        on_tb: Sequence[Vehicle],
        shadows: channel_service.ShadowField | None,
    ) -> float:
        if self.channel.model == ChannelModel.E1_IDEAL:
            return self.config.busy_energy if on_tb else self.config.idle_energy
        if self.channel.model == ChannelModel.E2_RANGE:
            heard = any(tx.distance_to(sensing) <= self.channel.range for tx in on_tb)
            return self.config.busy_energy if heard else self.config.idle_energy
        total = self._floor
        for tx in on_tb:
            total += channel_service.dbm_to_mw(
                channel_service.received_power(tx, sensing, self.channel, shadows)
            )
        return total

    def observe_subframe(self, abs_subframe, transmitters, vehicles, channel, shadows):
        subframe = grid_service.pool_subframe(abs_subframe, self.pool)
        by_tb: dict[int, list[Vehicle]] = {
            tb: [] for tb in grid_service.tbs_in_subframe(subframe, self.pool)
        }
        transmitting = set()
        for vehicle, tb in transmitters:
            by_tb[tb].append(vehicle)
            transmitting.add(vehicle.id)
        for vehicle in vehicles:
            record = self.records.get(vehicle.id)
            # a transmitting vehicle cannot sense its own subframe
            if record is None or vehicle.id in transmitting:
                continue
            observations = {tb: self._energy(vehicle, txs, shadows) for tb, txs in by_tb.items()}
            mode4_sense(record, observations)
        # listeners have no shadowing state of their own
        for listener, record in self.approach.values():
            heard = {tb: self._energy(listener, txs, None) for tb, txs in by_tb.items()}
            mode4_sense(record, heard)

    def on_period_end(self, assignments, rng):
        changes: dict[int, int] = {}
        current = dict(assignments)
        for vehicle_id in sorted(self.records):
            record = self.records[vehicle_id]
            record.counter -= 1
            if record.counter > 0:
                continue
            held = current.get(vehicle_id)
            if held is not None and mode4_keeps(record, held):
                record.counter = self._draw_counter(rng)
                continue
            others = {other: t for other, t in current.items() if other != vehicle_id}
            tb = self._select(record, rng)
            self._count(tb, grid_service.occupancy(others, self.pool) > 0)
            current[vehicle_id] = tb
            if tb != assignments.get(vehicle_id):
                changes[vehicle_id] = tb
        return changes


# =============================================================================
# RL
# =============================================================================

class RLScheduler(Scheduler):
    kind = SchedulerKind.RL

    def __init__(
        self,
        actor: Network,
        environment: EnvironmentKind,
        history_length: int = 30,
        mode: ActionMode = ActionMode.GREEDY,
    ):
        self.actor = actor
        self.environment = environment
        self.history_length = history_length
        self.mode = mode

    def assign(self, ctx, rng):
        state = state_service.encode_context(ctx, self.environment, self.history_length)
        return select_action(self.actor, state, self.mode, rng)


def make_scheduler(
    kind: SchedulerKind,
    pool: PoolConfig,
    channel: ChannelConfig,
    mode4: Mode4Config | None = None,
    *,
    actor: Network | None = None,
    environment: EnvironmentKind = EnvironmentKind.E1,
    history_length: int = 30,
    doca_length: float = 500.0,
) -> Scheduler:
    kind = SchedulerKind(kind)
    if kind == SchedulerKind.RANDOM:
        return RandomScheduler()
    if kind == SchedulerKind.ROUND_ROBIN:
        return RoundRobinScheduler()
    if kind == SchedulerKind.MODE4:
        return Mode4Scheduler(mode4 or Mode4Config(), pool, channel, doca_length=doca_length)
    if actor is None:
        raise ValueError("the RL scheduler needs a trained actor")
    return RLScheduler(actor, environment, history_length)
