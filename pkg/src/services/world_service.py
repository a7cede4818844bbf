"""Vehicle mobility on the DOCA segment and periodic CAM generation.

The clock advances in integer ticks of one subframe. A pool instance of F subframes starts
every CAM period; the remaining ticks of the period are idle. ``abs_subframe`` counts pool
subframes only, so pool subframe ``o`` of period ``p`` is ``p * F + o``.
"""

import heapq
import logging
import math

import numpy as np

from src.models.transmission import Snapshot
from src.models.vehicle import ArrivalEvent, ArrivalMode, Direction, Vehicle
from src.schemas.grid import PoolConfig
from src.schemas.world import DocaConfig

logger = logging.getLogger(__name__)

# positions within this distance of a boundary count as having crossed it
_BOUNDARY_EPS = 1e-9


def draw_interarrival(rng: np.random.Generator, mean_headway: float) -> float:
    """Exponential time headway in seconds (spatial Poisson traffic at constant speed)."""
    if mean_headway <= 0:
        raise ValueError("mean_headway must be positive")
    return float(rng.exponential(mean_headway))


class World:
    def __init__(
        self,
        doca: DocaConfig,
        pool: PoolConfig,
        rng: np.random.Generator,
        *,
        frozen: bool = False,
    ):
        self.doca = doca
        self.pool = pool
        self.rng = rng
        # frozen worlds keep the clock running but never move, add or remove vehicles
        self.frozen = frozen

        self.vehicles: dict[int, Vehicle] = {}
        self.tick = 0
        self._arrivals: list[ArrivalEvent] = []
        self._next_id = 0

        self.ticks_per_period = max(1, round(doca.cam_period / pool.subframe_duration))
        if self.ticks_per_period < pool.subframes:
            raise ValueError("CAM period shorter than the resource pool")

    # ----- clock -----

    @property
    def now_ms(self) -> float:
        return self.tick * self.pool.subframe_duration

    def period_of(self, tick: int) -> int:
        return tick // self.ticks_per_period

    def pool_subframe_at(self, tick: int) -> int | None:
        """Absolute pool subframe played at ``tick``, or None when the tick is idle."""
        offset = tick % self.ticks_per_period
        if offset >= self.pool.subframes:
            return None
        return self.period_of(tick) * self.pool.subframes + offset

    def next_pool_tick(self, after: int) -> int:
        """First tick strictly after ``after`` that plays a pool subframe."""
        tick = after + 1
        offset = tick % self.ticks_per_period
        if offset < self.pool.subframes:
            return tick
        return tick + self.ticks_per_period - offset

    def ms_to_tick(self, time_ms: float) -> int:
        return math.ceil(time_ms / self.pool.subframe_duration - 1e-9)

    # ----- population -----

    def _lane_offset(self, direction: Direction) -> float:
        lane = int(self.rng.integers(self.doca.lanes_per_direction))
        return int(direction) * self.doca.lane_width * (lane + 0.5)

    def _new_vehicle(self, direction: Direction, position: float) -> Vehicle:
        vehicle = Vehicle(
            id=self._next_id,
            direction=direction,
            position=position,
            speed=self.doca.speed,
            lane_offset=self._lane_offset(direction),
            entry_time_ms=self.now_ms,
            cam_offset=int(self.rng.integers(self.pool.subframes)),
        )
        self._next_id += 1
        return vehicle

    def _first_generation(self, cam_offset: int) -> int:
        # the CAM is generated at ms ``cam_offset`` of a period; a vehicle entering after that
        # instant waits for the next period
        period = self.period_of(self.tick)
        if self.tick % self.ticks_per_period > cam_offset:
            period += 1
        return period * self.pool.subframes + cam_offset

    def schedule_arrival(self, direction: Direction, delay_s: float) -> ArrivalEvent:
        event = ArrivalEvent(time_ms=self.now_ms + delay_s * 1000.0, direction=direction)
        heapq.heappush(self._arrivals, event)
        return event

    @property
    def pending_arrivals(self) -> list[ArrivalEvent]:
        return sorted(self._arrivals)

    def prefill(self) -> list[Vehicle]:
        """Fill the DOCA with ``target_population`` vehicles at uniform random positions.

        Each vehicle gets a random TB and CAM offset; in Poisson mode the first arrival of each
        direction is scheduled as well.
        """
        placed = []
        for i in range(self.doca.target_population):
            direction = Direction.EAST if i % 2 == 0 else Direction.WEST
            position = float(self.rng.uniform(0.0, self.doca.length))
            vehicle = self._new_vehicle(direction, position)
            vehicle.tb = int(self.rng.integers(self.pool.n_tbs))
            vehicle.prefilled = True
            vehicle.first_generation = vehicle.cam_offset
            self.vehicles[vehicle.id] = vehicle
            placed.append(vehicle)
        if self.doca.arrival_mode == ArrivalMode.POISSON and not self.frozen:
            for direction in (Direction.EAST, Direction.WEST):
                delay = draw_interarrival(self.rng, self.doca.mean_headway)
                self.schedule_arrival(direction, delay)
        logger.debug(f"Prefilled DOCA with {len(placed)} vehicles")
        return placed

    def add_vehicle(
        self,
        direction: Direction,
        position: float,
        tb: int | None = None,
        cam_offset: int | None = None,
    ) -> Vehicle:
        """Place a vehicle directly; used to build fixed snapshots."""
        vehicle = self._new_vehicle(direction, position)
        if cam_offset is not None:
            vehicle.cam_offset = cam_offset
        vehicle.tb = tb
        vehicle.first_generation = self._first_generation(vehicle.cam_offset)
        self.vehicles[vehicle.id] = vehicle
        return vehicle

    # ----- motion -----

    def next_event_tick(self) -> int | None:
        """Earliest future tick at which a vehicle exits or an arrival is due."""
        if self.frozen:
            return None
        candidates = []
        if self._arrivals:
            candidates.append(max(self.tick + 1, self.ms_to_tick(self._arrivals[0].time_ms)))
        metres_per_tick = self.doca.speed * self.pool.subframe_duration / 1000.0
        for vehicle in self.vehicles.values():
            remaining = (
                self.doca.length - vehicle.position
                if vehicle.direction == Direction.EAST
                else vehicle.position
            )
            ticks = max(1, math.ceil((remaining - _BOUNDARY_EPS) / metres_per_tick))
            candidates.append(self.tick + ticks)
        return min(candidates) if candidates else None

    def step(self, ticks: int = 1) -> tuple[list[Vehicle], list[Vehicle]]:
        """Advance the clock by ``ticks`` subframes.

        Returns ``(exited, entered)``. Entered vehicles have no TB yet. Callers that step more
        than one tick must not skip past ``next_event_tick()``.
        """
        if ticks < 1:
            raise ValueError("ticks must be >= 1")
        self.tick += ticks
        if self.frozen:
            return [], []

        dt_s = ticks * self.pool.subframe_duration / 1000.0
        exited = []
        for vehicle in list(self.vehicles.values()):
            vehicle.position += int(vehicle.direction) * vehicle.speed * dt_s
            if vehicle.direction == Direction.EAST:
                done = vehicle.position >= self.doca.length - _BOUNDARY_EPS
            else:
                done = vehicle.position <= _BOUNDARY_EPS
            if done:
                vehicle.position = min(max(vehicle.position, 0.0), self.doca.length)
                del self.vehicles[vehicle.id]
                exited.append(vehicle)
                if self.doca.arrival_mode == ArrivalMode.CONSTANT_POPULATION:
                    self.schedule_arrival(
                        vehicle.direction, draw_interarrival(self.rng, self.doca.mean_headway)
                    )

        entered = []
        while self._arrivals and self.ms_to_tick(self._arrivals[0].time_ms) <= self.tick:
            event = heapq.heappop(self._arrivals)
            position = 0.0 if event.direction == Direction.EAST else self.doca.length
            vehicle = self._new_vehicle(event.direction, position)
            vehicle.first_generation = self._first_generation(vehicle.cam_offset)
            self.vehicles[vehicle.id] = vehicle
            entered.append(vehicle)
            if self.doca.arrival_mode == ArrivalMode.POISSON:
                self.schedule_arrival(
                    event.direction, draw_interarrival(self.rng, self.doca.mean_headway)
                )

        if exited or entered:
            logger.debug(
                f"t={self.now_ms:.0f} ms: {len(exited)} exited, {len(entered)} entered, "
                f"{len(self.vehicles)} inside"
            )
        return exited, entered

    # ----- traffic -----

    def cam_transmissions(self, abs_subframe: int) -> list[tuple[Vehicle, int]]:
        """Vehicles transmitting in pool subframe ``abs_subframe``, ordered by id."""
        subframe = abs_subframe % self.pool.subframes
        return [
            (vehicle, vehicle.tb)
            for vehicle in sorted(self.vehicles.values(), key=lambda v: v.id)
            if vehicle.tb is not None
            and vehicle.tb % self.pool.subframes == subframe
            and abs_subframe >= vehicle.first_generation
        ]

    def assignments(self) -> dict[int, int]:
        return {vid: v.tb for vid, v in self.vehicles.items() if v.tb is not None}

    def snapshot(self) -> Snapshot:
        return Snapshot(vehicles=sorted(self.vehicles.values(), key=lambda v: v.id))

    @property
    def has_prefilled(self) -> bool:
        return any(v.prefilled for v in self.vehicles.values())
