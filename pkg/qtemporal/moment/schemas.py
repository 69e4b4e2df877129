"""
On-disk document for correlation tables (JSON, see docs/formats.md).
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from qtemporal.core.errors import InvalidCorrelationTableError
from qtemporal.moment.scenario import CorrelationTable, Scenario

TABLE_FORMAT_VERSION = 1


class CorrelationTableDocument(BaseModel):
    format_version: int = TABLE_FORMAT_VERSION
    nA: int = Field(ge=1)
    nX: int = Field(ge=1)
    nB: int = Field(ge=2)
    nY: int = Field(ge=1)
    prepare_and_measure: bool = False
    # (a, b, x, y, p); omitted entries are 0.
    entries: list[tuple[int, int, int, int, float]] = Field(default_factory=list)

    def to_table(self) -> CorrelationTable:
        if self.format_version != TABLE_FORMAT_VERSION:
            raise InvalidCorrelationTableError(
                f"Unsupported table format_version {self.format_version}"
            )
        scenario = Scenario(
            nA=self.nA,
            nX=self.nX,
            nB=self.nB,
            nY=self.nY,
            prepare_and_measure=self.prepare_and_measure,
        )
        return CorrelationTable.from_entries(scenario, self.entries)

    @classmethod
    def from_table(cls, table: CorrelationTable) -> CorrelationTableDocument:
        scenario = table.scenario
        return cls(
            nA=scenario.nA,
            nX=scenario.nX,
            nB=scenario.nB,
            nY=scenario.nY,
            prepare_and_measure=scenario.prepare_and_measure,
            entries=table.entries(),
        )


def load_table(path: Path) -> CorrelationTable:
    try:
        document = CorrelationTableDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidCorrelationTableError(f"{path}: cannot read table ({exc})") from exc
    except ValidationError as exc:
        raise InvalidCorrelationTableError(f"{path}: {exc.errors()[0]['msg']}") from exc
    table = document.to_table()
    table.validate()
    return table


def dump_table(table: CorrelationTable, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    record = CorrelationTableDocument.from_table(table).model_dump()
    # json writes repr-precision floats, so values survive the round trip exactly
    path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
