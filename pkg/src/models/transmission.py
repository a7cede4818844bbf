from dataclasses import dataclass, field

from src.models.vehicle import Vehicle


@dataclass
class TxRecord:
    tx_id: int
    tb: int
    abs_subframe: int
    time_ms: float
    outcomes: dict[int, bool] = field(default_factory=dict)
    prr: float = 0.0


@dataclass
class Snapshot:
    """Frozen set of vehicles with positions and assigned TBs."""
    vehicles: list[Vehicle]

    def transmitters_at(self, subframe: int, subframes: int) -> list[Vehicle]:
        return sorted(
            (v for v in self.vehicles if v.tb is not None and v.tb % subframes == subframe),
            key=lambda v: v.id,
        )
