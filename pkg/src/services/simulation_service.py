"""Closed-loop simulation: world, channel and scheduler stepped together.

An ``Environment`` alternates between two phases. ``run_interval`` plays ticks until a vehicle
arrives (or a horizon passes) and returns the transmissions it evaluated. Arrivals then wait in
a queue: the tick they arrived on is only played after every one of them has been given a TB
through ``commit``, so the scheduler always acts before the vehicle's first transmission.
"""

import logging
from collections import defaultdict, deque
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.core.exceptions import NoTransmissionsError, SimulationStateError
from src.models.channel import ChannelModel
from src.models.scheduling import ActionRecord, AssignContext
from src.models.transmission import Snapshot, TxRecord
from src.models.vehicle import Vehicle
from src.schemas.channel import ChannelConfig
from src.schemas.report import PrrStats
from src.schemas.scenario import ScenarioPreset
from src.services import channel_service, grid_service, metrics_service
from src.services.scheduler_service import Mode4Scheduler, Scheduler
from src.services.world_service import World

logger = logging.getLogger(__name__)


class Environment:
    def __init__(
        self,
        scenario: ScenarioPreset,
        scheduler: Scheduler,
        rng: np.random.Generator,
        *,
        channel_model: ChannelModel | None = None,
        frozen: bool = False,
        shadow_seed: int | None = None,
        history_length: int | None = None,
    ):
        self.scenario = scenario
        self.pool = scenario.pool
        self.scheduler = scheduler
        self.rng = rng
        self.world = World(scenario.doca, scenario.pool, rng, frozen=frozen)

        self.channel = scenario.channel
        if channel_model is not None:
            self.channel = scenario.channel.model_copy(update={"model": channel_model})
        if shadow_seed is None:
            shadow_seed = int(rng.integers(2**62))
        self.shadows = channel_service.ShadowField(self.channel, shadow_seed)

        keep = history_length if history_length is not None else scenario.train.history_length
        self.history: deque[ActionRecord] = deque(maxlen=max(1, keep - 1))
        self.pending: deque[Vehicle] = deque()
        self.actions = 0
        self.transient_end_ms: float | None = None

        self._started = False
        self._tick_played = False
        self._last_action_ms = 0.0

    # ----- lifecycle -----

    def reset(self) -> list[Vehicle]:
        """Prefill the DOCA and hand every initial vehicle to the scheduler."""
        if self._started:
            raise SimulationStateError("environment already started")
        placed = self.world.prefill()
        for vehicle in placed:
            self.scheduler.on_enter(vehicle, self.rng)
        self._started = True
        return placed

    def set_channel_model(self, model: ChannelModel) -> None:
        self.channel = self.channel.model_copy(update={"model": model})

    @property
    def in_transient(self) -> bool:
        return self.transient_end_ms is None

    # ----- actions -----

    def request(self) -> Vehicle | None:
        """The vehicle waiting for a TB, oldest arrival first."""
        return self.pending[0] if self.pending else None

    def occupancy(self) -> np.ndarray:
        return grid_service.occupancy(self.world.assignments(), self.pool)

    def unused_resources(self) -> int:
        return grid_service.unused_resources(self.occupancy())

    def context(self) -> AssignContext:
        vehicle = self.request()
        if vehicle is None:
            raise SimulationStateError("no vehicle is waiting for a TB")
        return AssignContext(
            pool=self.pool,
            occupancy=self.occupancy(),
            vehicle_id=vehicle.id,
            direction=int(vehicle.direction),
            entry_time_ms=vehicle.entry_time_ms,
            action_history=tuple(self.history),
        )

    def commit(self, tb: int) -> ActionRecord:
        if not self.pending:
            raise SimulationStateError("no vehicle is waiting for a TB")
        tb = grid_service.validate_tb(tb, self.pool)
        vehicle = self.pending.popleft()
        vehicle.tb = tb
        self.scheduler.on_enter(vehicle, self.rng)

        now = self.world.now_ms
        record = ActionRecord(
            elapsed_s=(now - self._last_action_ms) / 1000.0,
            direction=int(vehicle.direction),
            tb=tb,
        )
        self.history.append(record)
        self._last_action_ms = now
        self.actions += 1
        logger.debug(f"t={now:.0f} ms: vehicle {vehicle.id} -> TB {tb}")
        return record

    def assign_pending(self, scheduler: Scheduler | None = None) -> list[ActionRecord]:
        scheduler = scheduler or self.scheduler
        actions = []
        while self.pending:
            actions.append(self.commit(scheduler.assign(self.context(), self.rng)))
        return actions

    # ----- time -----

    def run_interval(self, horizon_ms: float | None = None) -> list[TxRecord]:
        """Play ticks until a vehicle arrives or ``horizon_ms`` has elapsed."""
        if not self._started:
            raise SimulationStateError("call reset() before running")
        if self.pending:
            raise SimulationStateError("vehicles are waiting for a TB")
        if horizon_ms is None and self.world.frozen:
            raise SimulationStateError("a frozen world needs a horizon")

        world = self.world
        horizon_tick = None
        if horizon_ms is not None:
            horizon_tick = world.tick + world.ms_to_tick(horizon_ms)

        records: list[TxRecord] = []
        while True:
            if not self._tick_played:
                records.extend(self._play_tick())
                self._tick_played = True
            if horizon_tick is not None and world.tick >= horizon_tick:
                return records

            target = world.next_pool_tick(world.tick)
            event = world.next_event_tick()
            if event is not None:
                target = min(target, event)
            if horizon_tick is not None:
                target = min(target, horizon_tick)

            exited, entered = world.step(target - world.tick)
            self._tick_played = False
            for vehicle in exited:
                self.scheduler.on_exit(vehicle)
                self.shadows.forget(vehicle.id)
            if self.transient_end_ms is None and exited and not world.has_prefilled:
                self.transient_end_ms = world.now_ms
                logger.debug(f"Transient over at t={world.now_ms:.0f} ms")
            if entered:
                self.pending.extend(entered)
                return records

    def _play_tick(self) -> list[TxRecord]:
        abs_subframe = self.world.pool_subframe_at(self.world.tick)
        if abs_subframe is None:
            return []
        transmitters = self.world.cam_transmissions(abs_subframe)
        records = self._evaluate(abs_subframe, transmitters)
        self.scheduler.observe_subframe(
            abs_subframe, transmitters, self.world.vehicles.values(), self.channel, self.shadows
        )
        if abs_subframe % self.pool.subframes == self.pool.subframes - 1:
            self._end_period()
        return records

    def _end_period(self) -> None:
        changes = self.scheduler.on_period_end(self.world.assignments(), self.rng)
        for vehicle_id, tb in changes.items():
            self.world.vehicles[vehicle_id].tb = grid_service.validate_tb(tb, self.pool)

    def _eligible(self, tx: Vehicle, rx: Vehicle) -> bool:
        limit = self.channel.prr_range
        return limit is None or tx.distance_to(rx) <= limit

    def _evaluate(
        self, abs_subframe: int, transmitters: Sequence[tuple[Vehicle, int]]
    ) -> list[TxRecord]:
        by_tb: dict[int, list[Vehicle]] = defaultdict(list)
        for vehicle, tb in transmitters:
            by_tb[tb].append(vehicle)
        transmitting = {vehicle.id for vehicle, _ in transmitters}
        receivers = sorted(self.world.vehicles.values(), key=lambda v: v.id)
        extra = 1 if self.scenario.prr_counts_transmitter else 0

        records = []
        for tx, tb in transmitters:
            interferers = [v for v in by_tb[tb] if v.id != tx.id]
            outcomes = {}
            for rx in receivers:
                if rx.id == tx.id or not self._eligible(tx, rx):
                    continue
                outcomes[rx.id] = channel_service.receive(
                    tx, rx, interferers, rx.id in transmitting, self.channel, self.shadows
                )
            if not outcomes:
                continue
            records.append(
                TxRecord(
                    tx_id=tx.id,
                    tb=tb,
                    abs_subframe=abs_subframe,
                    time_ms=self.world.now_ms,
                    outcomes=outcomes,
                    prr=sum(outcomes.values()) / (len(outcomes) + extra),
                )
            )
        return records


# =============================================================================
# INDEPENDENT ORACLE
# =============================================================================

def brute_force_prr(
    snapshot: Snapshot,
    channel: ChannelConfig,
    subframes: int,
    shadows: channel_service.ShadowField | None = None,
    *,
    prr_counts_transmitter: bool = False,
) -> list[float]:
    """PRR of every transmission of one pool period over a static snapshot.

    Every transmitter/receiver pair is checked against the reception rule directly. Results
    are ordered by subframe, then transmitter id.
    """
    noise_mw = channel_service.dbm_to_mw(channel_service.effective_noise_power(channel))

    def power_mw(a: Vehicle, b: Vehicle) -> float:
        shadow = shadows.get(a, b) if shadows is not None else 0.0
        loss = channel_service.winner_b1_pathloss(a.distance_to(b), channel)
        return 10.0 ** ((channel.tx_power - loss - shadow) / 10.0)

    prrs = []
    for subframe in range(subframes):
        for tx in snapshot.transmitters_at(subframe, subframes):
            same_tb = [v for v in snapshot.vehicles if v.id != tx.id and v.tb == tx.tb]
            successes = 0
            eligible = 0
            for rx in snapshot.vehicles:
                if rx.id == tx.id:
                    continue
                if channel.prr_range is not None and tx.distance_to(rx) > channel.prr_range:
                    continue
                eligible += 1
                if rx.tb is not None and rx.tb % subframes == subframe:
                    continue
                if channel.model == ChannelModel.E1_IDEAL:
                    ok = not same_tb
                elif channel.model == ChannelModel.E2_RANGE:
                    ok = tx.distance_to(rx) <= channel.range and all(
                        v.distance_to(rx) > channel.range for v in same_tb
                    )
                else:
                    interference = sum(power_mw(v, rx) for v in same_tb)
                    sinr = power_mw(tx, rx) / (noise_mw + interference)
                    ok = 10.0 * np.log10(sinr) >= channel.sinr_threshold
                successes += int(ok)
            if eligible:
                prrs.append(successes / (eligible + (1 if prr_counts_transmitter else 0)))
    return prrs


# =============================================================================
# EVALUATION
# =============================================================================

@dataclass
class EvaluationRun:
    records: list[TxRecord] = field(default_factory=list)
    actions: int = 0
    transient_actions: int = 0
    unused_at_action: list[int] = field(default_factory=list)
    collision_rate: float | None = None
    last_selector_collision_rate: float | None = None

    @property
    def prr_values(self) -> list[float]:
        return [r.prr for r in self.records]

    @property
    def mean_unused_resources(self) -> float:
        return float(np.mean(self.unused_at_action)) if self.unused_at_action else 0.0


def run_evaluation(
    scheduler: Scheduler,
    scenario: ScenarioPreset,
    min_actions: int,
    rng: np.random.Generator,
    *,
    channel_model: ChannelModel | None = None,
) -> EvaluationRun:
    """Closed-loop run until ``min_actions`` scheduler actions after the transient.

    The transient lasts until every prefilled vehicle has left; its actions and
    transmissions are discarded.
    """
    if min_actions < 1:
        raise ValueError("min_actions must be >= 1")
    env = Environment(scenario, scheduler, rng, channel_model=channel_model)
    env.reset()
    run = EvaluationRun()
    mode4 = scheduler if isinstance(scheduler, Mode4Scheduler) else None
    counting = False
    while run.actions < min_actions:
        interval = env.run_interval()
        if mode4 is not None and not counting and not env.in_transient:
            mode4.reset_statistics()
            counting = True
        if not env.in_transient:
            run.records.extend(r for r in interval if r.time_ms >= env.transient_end_ms)
        while env.request() is not None:
            env.commit(scheduler.assign(env.context(), rng))
            if env.in_transient:
                run.transient_actions += 1
            else:
                run.actions += 1
                run.unused_at_action.append(env.unused_resources())
    if mode4 is not None:
        run.collision_rate = mode4.collision_rate
        run.last_selector_collision_rate = mode4.last_selector_collision_rate
    logger.info(
        f"{scenario.name}/{scheduler.kind.value}: {run.actions} actions "
        f"({run.transient_actions} transient), {len(run.records)} transmissions"
    )
    return run


def evaluate(
    scheduler: Scheduler,
    scenario: ScenarioPreset,
    min_actions: int,
    rng: np.random.Generator,
) -> PrrStats:
    run = run_evaluation(scheduler, scenario, min_actions, rng)
    if not run.records:
        raise NoTransmissionsError("evaluation produced no transmissions")
    return metrics_service.prr_stats(run.prr_values)


def evaluate_sharded(
    scheduler_factory: Callable[[], Scheduler],
    scenario: ScenarioPreset,
    min_actions: int,
    rngs: Sequence[np.random.Generator],
) -> tuple[PrrStats, list[EvaluationRun]]:
    """Evaluate one fresh scheduler per generator and pool the raw PRR samples."""
    runs = [
        run_evaluation(scheduler_factory(), scenario, min_actions, rng) for rng in rngs
    ]
    samples = [prr for run in runs for prr in run.prr_values]
    return metrics_service.prr_stats(samples), runs
