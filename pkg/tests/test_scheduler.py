import numpy as np
import pytest
from scipy import stats

from src.models.channel import ChannelModel
from src.models.scheduling import AssignContext, ReselectionMode, SchedulerKind
from src.models.vehicle import Direction
from src.schemas.channel import ChannelConfig
from src.schemas.grid import PoolConfig
from src.schemas.scheduler import Mode4Config
from src.services import channel_service, grid_service
from src.services.scheduler_service import (
    Mode4Scheduler,
    RandomScheduler,
    RoundRobinScheduler,
    candidate_count,
    copy_sensing_record,
    make_scheduler,
    mode4_keeps,
    mode4_select,
    mode4_sense,
    new_sensing_record,
)

POOL_1X10 = PoolConfig(subchannels=1, subframes=10)


def context(pool: PoolConfig) -> AssignContext:
    return AssignContext(
        pool=pool,
        occupancy=np.zeros(pool.n_tbs, dtype=np.int64),
        vehicle_id=0,
        direction=1,
        entry_time_ms=0.0,
    )


class TestCentralized:
    def test_random_is_uniform(self, pool_2x10):
        rng = np.random.default_rng(42)
        scheduler = RandomScheduler()
        ctx = context(pool_2x10)
        draws = [scheduler.assign(ctx, rng) for _ in range(10_000)]
        counts = np.bincount(draws, minlength=20)
        assert stats.chisquare(counts).pvalue > 0.01

    def test_round_robin_cycles(self, pool_2x10, rng):
        scheduler = RoundRobinScheduler()
        ctx = context(pool_2x10)
        assert [scheduler.assign(ctx, rng) for _ in range(45)] == [i % 20 for i in range(45)]

    def test_kinds(self):
        assert RandomScheduler().kind == SchedulerKind.RANDOM
        assert RoundRobinScheduler().kind == SchedulerKind.ROUND_ROBIN

    def test_rl_needs_actor(self, pool_2x10):
        with pytest.raises(ValueError):
            make_scheduler(SchedulerKind.RL, pool_2x10, ChannelConfig())

    def test_factory(self, pool_2x10):
        assert isinstance(make_scheduler("random", pool_2x10, ChannelConfig()), RandomScheduler)
        scheduler = make_scheduler(SchedulerKind.MODE4, pool_2x10, ChannelConfig())
        assert isinstance(scheduler, Mode4Scheduler)


class TestSensing:
    def test_idle_pool_stays_at_floor(self):
        record = new_sensing_record(10, window=10, floor=1e-10)
        for _ in range(30):
            mode4_sense(record, {tb: 1e-10 for tb in range(10)})
        np.testing.assert_allclose(record.energies, 1e-10)

    def test_persistent_transmitter(self):
        record = new_sensing_record(10, window=10, floor=1e-10)
        for _ in range(10):
            mode4_sense(record, {tb: (1.0 if tb == 4 else 1e-10) for tb in range(10)})
        assert record.energies[4] == 1.0
        assert record.energies[4] > 1e6 * np.delete(record.energies, 4).max()

    def test_missing_observations_keep_stale_values(self):
        record = new_sensing_record(20, window=10, floor=1e-10)
        mode4_sense(record, {3: 1.0, 13: 1.0})
        mode4_sense(record, {4: 1e-10, 14: 1e-10})
        assert record.energies[3] == record.energies[13] == 1.0

    def test_window_average(self):
        record = new_sensing_record(2, window=2, floor=0.0)
        for energy in (9.0, 1.0, 3.0):
            mode4_sense(record, {0: energy})
        assert record.energies[0] == pytest.approx(2.0)
        assert record.energies[1] == 0.0


class TestSelection:
    def test_candidate_count(self):
        assert candidate_count(10) == 2
        assert candidate_count(20) == 4
        assert candidate_count(3) == 1
        assert candidate_count(10, 1.0) == 10

    def test_picks_among_lowest(self):
        rng = np.random.default_rng(0)
        record = new_sensing_record(10, window=10, floor=0.0)
        record.energies[:] = [5.0, 0.2, 7.0, 0.1, 9.0, 4.0, 6.0, 8.0, 3.0, 2.0]
        picks = {mode4_select(record, rng, POOL_1X10) for _ in range(500)}
        assert picks == {1, 3}

    def test_total_tie_is_uniform(self):
        rng = np.random.default_rng(1)
        record = new_sensing_record(10, window=10, floor=1e-10)
        draws = [mode4_select(record, rng, POOL_1X10) for _ in range(10_000)]
        assert stats.chisquare(np.bincount(draws, minlength=10)).pvalue > 0.01

    def test_last_selector_collides_half_the_time(self):
        # 9 of 10 TBs busy: the candidates are the idle TB and one busy TB
        rng = np.random.default_rng(2)
        record = new_sensing_record(10, window=10, floor=1e-10)
        record.energies[:] = 1.0
        record.energies[6] = 1e-10
        draws = np.array([mode4_select(record, rng, POOL_1X10) for _ in range(4000)])
        assert np.mean(draws != 6) == pytest.approx(0.5, abs=0.03)

    def test_resets_counter(self):
        record = new_sensing_record(10, window=10, floor=0.0, counter=0)
        mode4_select(record, np.random.default_rng(0), POOL_1X10, counter=7)
        assert record.counter == 7


class TestMode4Scheduler:
    @pytest.fixture
    def world(self, make_world):
        return make_world(pool=POOL_1X10)

    def test_floor_follows_channel(self, e2_channel):
        full = Mode4Scheduler(Mode4Config(), PoolConfig(subchannels=2), e2_channel)
        noise_mw = channel_service.dbm_to_mw(e2_channel.noise_power)
        assert full._floor == pytest.approx(noise_mw)
        ideal = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        assert ideal._floor == Mode4Config().idle_energy

    def test_prefilled_counters_are_spread(self, world, rng):
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        counters = set()
        for _ in range(200):
            vehicle = world.add_vehicle(Direction.EAST, 10.0, tb=0)
            vehicle.prefilled = True
            scheduler.on_enter(vehicle, rng)
            counters.add(scheduler.records[vehicle.id].counter)
        assert counters == set(range(1, 11))

    def test_counter_mode(self, world, rng):
        config = Mode4Config(reselection=ReselectionMode.COUNTER, counter_min=5, counter_max=15)
        scheduler = Mode4Scheduler(config, POOL_1X10, ChannelConfig())
        vehicle = world.add_vehicle(Direction.EAST, 10.0, tb=0)
        scheduler.on_enter(vehicle, rng)
        assert 5 <= scheduler.records[vehicle.id].counter <= 15

    def test_senses_busy_tb_and_reselects(self, world, rng):
        scheduler = Mode4Scheduler(Mode4Config(sensing_window=1), POOL_1X10, ChannelConfig())
        sender = world.add_vehicle(Direction.EAST, 10.0, tb=3)
        listener = world.add_vehicle(Direction.WEST, 300.0, tb=3)
        for vehicle in (sender, listener):
            scheduler.on_enter(vehicle, rng)

        vehicles = [sender, listener]
        scheduler.observe_subframe(3, [(sender, 3)], vehicles, ChannelConfig(), None)
        for subframe in (0, 1, 2, 4, 5, 6, 7, 8, 9):
            scheduler.observe_subframe(subframe, [], vehicles, ChannelConfig(), None)

        listener_record = scheduler.records[listener.id]
        assert listener_record.energies[3] == 1.0
        assert np.delete(listener_record.energies, 3).max() == 1e-10
        # the sender cannot sense the subframe it transmits in
        assert scheduler.records[sender.id].energies[3] == 1e-10

        changes = scheduler.on_period_end(world.assignments(), rng)
        assert changes[listener.id] != 3
        # the sender still sees its TB as idle and keeps it
        assert sender.id not in changes
        assert scheduler.selections == 1
        assert 0.0 <= scheduler.collision_rate <= 1.0

    def test_range_proxy(self, world, rng):
        channel = ChannelConfig(model=ChannelModel.E2_RANGE, range=120.0)
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, channel)
        near = world.add_vehicle(Direction.EAST, 100.0, tb=2)
        far = world.add_vehicle(Direction.EAST, 400.0, tb=5)
        listener = world.add_vehicle(Direction.EAST, 150.0, tb=9)
        scheduler.on_enter(listener, rng)
        scheduler.observe_subframe(2, [(near, 2)], [listener], channel, None)
        scheduler.observe_subframe(5, [(far, 5)], [listener], channel, None)
        energies = scheduler.records[listener.id].energies
        assert energies[2] == 1.0
        assert energies[5] == 1e-10

    def test_exit_drops_record(self, world, rng):
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        vehicle = world.add_vehicle(Direction.EAST, 10.0, tb=0)
        scheduler.on_enter(vehicle, rng)
        scheduler.on_exit(vehicle)
        assert scheduler.records == {}
        assert scheduler.collision_rate is None

    def test_listeners_sit_at_both_entry_points(self, world, rng):
        channel = ChannelConfig(model=ChannelModel.E2_RANGE, range=120.0)
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, channel, doca_length=500.0)
        near_west_end = world.add_vehicle(Direction.EAST, 50.0, tb=2)
        scheduler.observe_subframe(2, [(near_west_end, 2)], [], channel, None)
        east, _ = scheduler.approach[Direction.EAST]
        assert east.position == 0.0
        assert scheduler.approach[Direction.EAST][1].energies[2] == 1.0
        assert scheduler.approach[Direction.WEST][1].energies[2] == 1e-10


def sense_full_window(scheduler, world, busy_tbs):
    """One control period with a vehicle transmitting on each of ``busy_tbs``."""
    senders = [world.add_vehicle(Direction.EAST, 10.0 + tb, tb=tb) for tb in busy_tbs]
    for subframe in range(scheduler.pool.subframes):
        in_subframe = set(grid_service.tbs_in_subframe(subframe, scheduler.pool))
        transmitters = [(v, v.tb) for v in senders if v.tb in in_subframe]
        scheduler.observe_subframe(subframe, transmitters, senders, ChannelConfig(), None)
    return senders


def arrival_context(occupancy: np.ndarray, vehicle_id: int) -> AssignContext:
    return AssignContext(
        pool=POOL_1X10,
        occupancy=occupancy,
        vehicle_id=vehicle_id,
        direction=int(Direction.EAST),
        entry_time_ms=0.0,
    )


class TestMode4Arrival:
    @pytest.fixture
    def world(self, make_world):
        return make_world(pool=POOL_1X10)

    def test_last_arrival_collides_half_the_time(self, world):
        rng = np.random.default_rng(3)
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        sense_full_window(scheduler, world, range(9))
        occupancy = grid_service.occupancy(world.assignments(), POOL_1X10)

        picks = np.array(
            [scheduler.assign(arrival_context(occupancy, 100 + i), rng) for i in range(4000)]
        )
        # candidates: the idle TB 9 and one of the busy ones
        assert np.mean(picks == 9) == pytest.approx(0.5, abs=0.03)
        assert scheduler.selections == scheduler.last_selections == 4000
        assert scheduler.last_selector_collision_rate == pytest.approx(0.5, abs=0.03)
        assert scheduler.collision_rate == scheduler.last_selector_collision_rate

    def test_arrival_with_free_tbs_never_collides(self, world):
        rng = np.random.default_rng(4)
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        sense_full_window(scheduler, world, range(5))
        occupancy = grid_service.occupancy(world.assignments(), POOL_1X10)

        picks = {scheduler.assign(arrival_context(occupancy, 100 + i), rng) for i in range(500)}
        assert picks <= set(range(5, 10))
        assert scheduler.collision_rate == 0.0
        assert scheduler.last_selector_collision_rate is None

    def test_arrival_starts_from_what_it_heard(self, world, rng):
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        sense_full_window(scheduler, world, range(9))
        occupancy = grid_service.occupancy(world.assignments(), POOL_1X10)
        vehicle = world.add_vehicle(Direction.EAST, 0.0)
        vehicle.tb = scheduler.assign(arrival_context(occupancy, vehicle.id), rng)
        scheduler.on_enter(vehicle, rng)

        heard = scheduler.approach[Direction.EAST][1]
        record = scheduler.records[vehicle.id]
        np.testing.assert_array_equal(record.energies, heard.energies)
        assert record.counter == Mode4Config().sensing_window
        # the vehicle's copy is its own
        record.energies[0] = 5.0
        assert heard.energies[0] == 1.0

    def test_quiet_holder_keeps_its_tb(self, world, rng):
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        vehicle = world.add_vehicle(Direction.EAST, 10.0, tb=4)
        scheduler.on_enter(vehicle, rng)
        record = scheduler.records[vehicle.id]
        record.energies[:] = 1.0
        record.energies[4] = 1e-10
        record.counter = 1

        assert scheduler.on_period_end(world.assignments(), rng) == {}
        assert record.counter == Mode4Config().sensing_window
        assert scheduler.selections == 0

    def test_holder_that_picked_a_busy_tb_moves(self, world, rng):
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        other = world.add_vehicle(Direction.WEST, 400.0, tb=4)
        vehicle = world.add_vehicle(Direction.EAST, 10.0, tb=4)
        scheduler.on_enter(vehicle, rng)
        record = scheduler.records[vehicle.id]
        # TB 4 was already busy when picked; TB 8 has gone quiet since
        record.energies[:] = 1.0
        record.energies[4] = 2.0
        record.energies[8] = 1e-10
        record.counter = 1

        changes = scheduler.on_period_end({vehicle.id: 4, other.id: 4}, rng)
        assert changes[vehicle.id] != 4
        assert scheduler.selections == 1

    def test_statistics_reset(self, world):
        rng = np.random.default_rng(5)
        scheduler = Mode4Scheduler(Mode4Config(), POOL_1X10, ChannelConfig())
        sense_full_window(scheduler, world, range(9))
        occupancy = grid_service.occupancy(world.assignments(), POOL_1X10)
        scheduler.assign(arrival_context(occupancy, 1), rng)
        scheduler.reset_statistics()
        assert scheduler.collision_rate is None
        assert scheduler.last_selector_collision_rate is None


class TestRecordHelpers:
    def test_keeps_only_the_quietest(self):
        record = new_sensing_record(10, window=10, floor=1e-10)
        assert mode4_keeps(record, 3)
        record.energies[3] = 0.5
        assert not mode4_keeps(record, 3)
        record.energies[:] = 1.0
        assert mode4_keeps(record, 3)

    def test_copy_is_deep(self):
        record = new_sensing_record(10, window=4, floor=1e-10, counter=3)
        mode4_sense(record, {2: 1.0})
        copy = copy_sensing_record(record)
        mode4_sense(copy, {2: 0.0})
        assert record.energies[2] == 1.0
        assert record.write_index[2] == 1
        assert copy.counter == 3
