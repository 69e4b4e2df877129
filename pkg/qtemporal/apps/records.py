"""
Plot-ready result rows and their CSV form.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import pandas as pd

from qtemporal.core.tolerances import SIGNIFICANT_DIGITS

CSV_COLUMNS = (
    "application",
    "regime",
    "level",
    "parameter",
    "value",
    "gap",
    "status",
    "span_id",
    "seed",
    "config_hash",
)


@dataclass(frozen=True)
class BoundResult:
    application: str
    regime: str
    level: int
    value: float
    gap: float
    status: str
    # swept quantity: K_CHSH for steering curves, P_2->1 for self-testing
    parameter: float | None = None
    span_id: str | None = None
    seed: int | None = None
    config_hash: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal" and math.isfinite(self.value)

    def with_config_hash(self, config_hash: str) -> BoundResult:
        return replace(self, config_hash=config_hash)


def results_frame(results: Iterable[BoundResult]) -> pd.DataFrame:
    rows = [asdict(result) for result in results]
    return pd.DataFrame(rows, columns=list(CSV_COLUMNS))


def write_results_csv(results: Iterable[BoundResult], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = results_frame(results)
    frame.to_csv(path, index=False, float_format=f"%.{SIGNIFICANT_DIGITS}g", lineterminator="\n")
    return path
