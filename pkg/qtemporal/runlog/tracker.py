"""
Unified run tracking entrypoints.
"""

from __future__ import annotations

from typing import Any

from qtemporal.runlog.schemas import RunAction, RunEvent
from qtemporal.runlog.sink import write_run_event


def track_event(
    *,
    action: RunAction,
    application: str | None = None,
    payload: dict[str, Any] | None = None,
    run_id: str | None = None,
    span_id: str | None = None,
    seed: int | None = None,
    status: str | None = None,
    notes: str | None = None,
) -> None:
    """
    Write a run event to the active sink.
    """
    event = RunEvent(
        action=action,
        application=application,
        payload=payload or {},
        run_id=run_id,
        span_id=span_id,
        seed=seed,
        status=status,
        notes=notes,
    )
    write_run_event(event.to_record())


def track_solve(
    *,
    application: str,
    status: str,
    value: float,
    gap: float,
    iterations: int,
    span_id: str | None = None,
    parameter: float | None = None,
) -> None:
    payload: dict[str, Any] = {"value": value, "gap": gap, "iterations": iterations}
    if parameter is not None:
        payload["parameter"] = parameter
    track_event(action="solve_finished", application=application, payload=payload, span_id=span_id, status=status)
