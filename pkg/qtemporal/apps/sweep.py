from __future__ import annotations

import concurrent.futures
import logging
from collections.abc import Callable, Sequence

from qtemporal.apps.records import BoundResult
from qtemporal.core.config import get_settings
from qtemporal.core.errors import QTemporalError
from qtemporal.runlog.tracker import track_event

logger = logging.getLogger(__name__)


def run_grid(
    application: str,
    regime: str,
    level: int,
    parameters: Sequence[float],
    task: Callable[[float], BoundResult],
    workers: int | None = None,
) -> list[BoundResult]:
    """
    Solve one independent problem per grid point on a thread pool.

    Results come back in grid order. A point that fails is recorded with its
    status and a NaN value; the remaining points still run.
    """
    max_workers = workers if workers is not None else get_settings().workers

    def point(parameter: float) -> BoundResult:
        try:
            return task(parameter)
        except QTemporalError as exc:
            status = getattr(exc, "status", None) or "error"
            logger.warning("%s point %.9g failed: %s", application, parameter, exc)
            track_event(
                action="curve_point_failed",
                application=application,
                status=status,
                payload={"parameter": parameter, "regime": regime, "level": level},
                notes=str(exc),
            )
            return BoundResult(
                application=application,
                regime=regime,
                level=level,
                parameter=parameter,
                value=float("nan"),
                gap=float("nan"),
                status=status,
            )

    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(point, float(p)) for p in parameters]
        return [future.result() for future in futures]
