"""PRR statistics and the CSV files the runs emit."""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from src.core.exceptions import NoTransmissionsError
from src.models.transmission import TxRecord
from src.schemas.report import EpochReport, EvaluationSummary, PrrStats

logger = logging.getLogger(__name__)

LEARNING_CURVE_COLUMNS = [
    "epoch",
    "mean_reward",
    "min_reward",
    "max_reward",
    "lr_actor",
    "lr_critic",
]
TRANSMISSION_COLUMNS = ["time_ms", "tx_id", "tb", "prr"]
STATS_COLUMNS = ["mean", "median", "p1", "p25", "p75", "p99", "count"]


def prr_stats(samples: Sequence[float]) -> PrrStats:
    values = np.asarray(samples, dtype=np.float64)
    if values.size == 0:
        raise NoTransmissionsError("no PRR samples")
    p1, p25, median, p75, p99 = np.percentile(values, [1, 25, 50, 75, 99])
    return PrrStats(
        mean=float(values.mean()),
        median=float(median),
        p1=float(p1),
        p25=float(p25),
        p75=float(p75),
        p99=float(p99),
        count=int(values.size),
    )


def transmissions_frame(records: Sequence[TxRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        [(r.time_ms, r.tx_id, r.tb, r.prr) for r in records], columns=TRANSMISSION_COLUMNS
    )


def learning_curve_frame(reports: Sequence[EpochReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [[getattr(r, c) for c in LEARNING_CURVE_COLUMNS] for r in reports],
        columns=LEARNING_CURVE_COLUMNS,
    )


def summary_frame(summaries: Sequence[EvaluationSummary]) -> pd.DataFrame:
    rows = []
    for s in summaries:
        row = {"scheduler": s.scheduler, "preset": s.preset}
        row.update(s.stats.model_dump())
        row.update(
            actions=s.actions,
            transient_actions=s.transient_actions,
            mean_unused_resources=s.mean_unused_resources,
            mode4_collision_rate=s.mode4_collision_rate,
            mode4_last_selector_collision_rate=s.mode4_last_selector_collision_rate,
        )
        rows.append(row)
    return pd.DataFrame(rows)


def compare_frame(summaries: Sequence[EvaluationSummary]) -> pd.DataFrame:
    """One row per scheduler, in the order given."""
    return pd.DataFrame(
        [{"scheduler": s.scheduler, **s.stats.model_dump()} for s in summaries],
        columns=["scheduler", *STATS_COLUMNS],
    )


def write_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path
