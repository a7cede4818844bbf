"""Reception outcome models.

- E1_IDEAL: one collision domain; a packet is received when no other vehicle uses the same TB
  and the receiver is not transmitting in that subframe.
- E2_RANGE: constant received power up to ``range`` metres and nothing beyond.
- E2_FULL: WINNER+ B1 LOS pathloss, correlated log-normal shadowing and an SINR threshold.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from src.models.channel import ChannelModel, LinkShadowState
from src.models.vehicle import Vehicle
from src.schemas.channel import ChannelConfig

logger = logging.getLogger(__name__)


# =============================================================================
# PROPAGATION CONSTANTS
# =============================================================================

SPEED_OF_LIGHT = 3.0e8

# effective antenna height is the physical height minus the environment height
ENVIRONMENT_HEIGHT = 1.0

# reference distance used to calibrate the default noise power
NOISE_REFERENCE_DISTANCE = 100.0


# =============================================================================
# PATHLOSS AND POWER
# =============================================================================

def winner_b1_pathloss(d: float, cfg: ChannelConfig) -> float:
    """WINNER+ B1 line-of-sight pathloss in dB at distance ``d`` metres."""
    if d < 0:
        raise ValueError("distance must be non-negative")
    d = max(d, cfg.min_pathloss_distance)
    h_eff = cfg.antenna_height - ENVIRONMENT_HEIGHT
    fc = cfg.carrier_freq
    d_bp = 4 * h_eff * h_eff * fc * 1e9 / SPEED_OF_LIGHT
    if d < d_bp:
        return 22.7 * math.log10(d) + 41.0 + 20.0 * math.log10(fc / 5.0)
    return (
        40.0 * math.log10(d)
        + 9.45
        - 17.3 * math.log10(h_eff)
        - 17.3 * math.log10(h_eff)
        + 2.7 * math.log10(fc / 5.0)
    )


def effective_noise_power(cfg: ChannelConfig) -> float:
    """Noise power in dBm; calibrated to the zero-shadowing power at the PRR range if unset."""
    if cfg.noise_power is not None:
        return cfg.noise_power
    reference = cfg.prr_range if cfg.prr_range is not None else NOISE_REFERENCE_DISTANCE
    return cfg.tx_power - winner_b1_pathloss(reference, cfg)


def dbm_to_mw(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0)


def mw_to_dbm(value_mw: float) -> float:
    return 10.0 * math.log10(value_mw)


# =============================================================================
# SHADOWING
# =============================================================================

def update_shadowing(
    state: LinkShadowState,
    new_separation: float,
    rng: np.random.Generator,
    *,
    sigma_db: float = 3.0,
    decorrelation_m: float = 25.0,
) -> float:
    """Move a link's shadowing to a new separation and return the new value in dB.

    The update keeps the N(0, sigma^2) marginal: rho = exp(-delta / decorrelation) and
    S' = rho * S + sqrt(1 - rho^2) * N(0, sigma^2).
    """
    delta = abs(new_separation - state.separation_m)
    if delta == 0.0:
        return state.value_db
    rho = math.exp(-delta / decorrelation_m)
    innovation = rng.normal(0.0, sigma_db) if sigma_db > 0 else 0.0
    state.value_db = rho * state.value_db + math.sqrt(1.0 - rho * rho) * innovation
    state.separation_m = new_separation
    return state.value_db


class ShadowField:
    """Shadowing of every vehicle pair, symmetric in the pair.

    A pair's first value is drawn from a generator seeded by ``(seed, low id, high id)`` so it
    does not depend on the order links are first used; later updates draw from the field's
    own generator.
    """

    def __init__(self, cfg: ChannelConfig, seed: int):
        self.sigma_db = cfg.shadow_sigma
        self.decorrelation_m = cfg.decorrelation_distance
        self.seed = seed
        self.rng = np.random.default_rng([seed, 0xD0CA])
        self._links: dict[tuple[int, int], LinkShadowState] = {}
        self._by_vehicle: dict[int, set[tuple[int, int]]] = {}

    def __len__(self) -> int:
        return len(self._links)

    def get(self, a: Vehicle, b: Vehicle) -> float:
        key = (min(a.id, b.id), max(a.id, b.id))
        separation = a.distance_to(b)
        state = self._links.get(key)
        if state is None:
            initial = 0.0
            if self.sigma_db > 0:
                initial = float(np.random.default_rng([self.seed, *key]).normal(0.0, self.sigma_db))
            state = LinkShadowState(value_db=initial, separation_m=separation)
            self._links[key] = state
            self._by_vehicle.setdefault(key[0], set()).add(key)
            self._by_vehicle.setdefault(key[1], set()).add(key)
            return state.value_db
        return update_shadowing(
            state,
            separation,
            self.rng,
            sigma_db=self.sigma_db,
            decorrelation_m=self.decorrelation_m,
        )

    def forget(self, vehicle_id: int) -> None:
        for key in self._by_vehicle.pop(vehicle_id, set()):
            self._links.pop(key, None)
            other = key[0] if key[1] == vehicle_id else key[1]
            peers = self._by_vehicle.get(other)
            if peers is not None:
                peers.discard(key)


def received_power(
    tx: Vehicle, rx: Vehicle, cfg: ChannelConfig, shadows: ShadowField | None
) -> float:
    """Received power in dBm."""
    shadow = shadows.get(tx, rx) if shadows is not None else 0.0
    return cfg.tx_power - winner_b1_pathloss(tx.distance_to(rx), cfg) - shadow


# =============================================================================
# RECEPTION RULES
# =============================================================================

def e1_receive(
    tx: Vehicle,
    rx: Vehicle,
    cotransmitters_same_tb: int,
    rx_transmits_this_subframe: bool,
) -> bool:
    return cotransmitters_same_tb == 0 and not rx_transmits_this_subframe


def range_receive(
    tx: Vehicle,
    rx: Vehicle,
    interferers_same_tb: Sequence[Vehicle],
    rx_transmits: bool,
    cfg: ChannelConfig,
) -> bool:
    if rx_transmits or tx.distance_to(rx) > cfg.range:
        return False
    return all(i.distance_to(rx) > cfg.range for i in interferers_same_tb)


def sinr_receive(
    tx: Vehicle,
    rx: Vehicle,
    interferers_same_tb: Sequence[Vehicle],
    rx_transmits: bool,
    cfg: ChannelConfig,
    shadows: ShadowField | None,
) -> bool:
    if rx_transmits:
        return False
    signal = dbm_to_mw(received_power(tx, rx, cfg, shadows))
    interference = sum(dbm_to_mw(received_power(i, rx, cfg, shadows)) for i in interferers_same_tb)
    noise = dbm_to_mw(effective_noise_power(cfg))
    sinr_db = mw_to_dbm(signal / (noise + interference))
    return sinr_db >= cfg.sinr_threshold


def receive(
    tx: Vehicle,
    rx: Vehicle,
    interferers_same_tb: Sequence[Vehicle],
    rx_transmits: bool,
    cfg: ChannelConfig,
    shadows: ShadowField | None = None,
) -> bool:
    """Outcome of one transmitter-receiver link under the configured channel model."""
    if cfg.model == ChannelModel.E1_IDEAL:
        return e1_receive(tx, rx, len(interferers_same_tb), rx_transmits)
    if cfg.model == ChannelModel.E2_RANGE:
        return range_receive(tx, rx, interferers_same_tb, rx_transmits, cfg)
    return sinr_receive(tx, rx, interferers_same_tb, rx_transmits, cfg, shadows)
