"""
Executes one RunConfig: solves, writes the CSV and the run manifest.
"""

from __future__ import annotations

import json
import logging
import sys
import time
import uuid
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from qtemporal import __version__
from qtemporal.apps.chsh import CHSH_CLASSICAL, chsh_bound
from qtemporal.apps.qrac import QRAC_CLASSICAL, qrac_bound, qrac_quantum_value, qrac_success
from qtemporal.apps.records import BoundResult, write_results_csv
from qtemporal.apps.selftest import classical_fidelity, reference_fidelity, selftest_curve, selftest_fidelity
from qtemporal.apps.steering import chsh_grid, tsr_bound, tsr_curve
from qtemporal.cli.config import RunConfig
from qtemporal.core.config import get_settings
from qtemporal.core.tolerances import REALIZATION_TOL, SIGNIFICANT_DIGITS
from qtemporal.moment.constraints import bind_data, normalization
from qtemporal.moment.model import build_model
from qtemporal.moment.scenario import CHSH_SCENARIO, Scenario, chsh_value
from qtemporal.moment.schemas import load_table
from qtemporal.realizations.model import Realization, born_probabilities, numeric_moments
from qtemporal.realizations.reference import chsh_realization, qrac_realization, qrac_scenario
from qtemporal.realizations.span import SpanRecipe, make_recipe
from qtemporal.realizations.store import span_store
from qtemporal.runlog.tracker import track_event

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_OPTIMAL = 1

_CLASSICAL_CONSTANTS = {
    "chsh": CHSH_CLASSICAL,
    "tsr": 0.0,
    "tsr-curve": 0.0,
    "qrac": QRAC_CLASSICAL,
}


def _span_scenario(config: RunConfig) -> Scenario:
    if config.application in ("qrac", "selftest"):
        return qrac_scenario(config.n if config.application == "qrac" else 2)
    if config.application == "sample-span":
        return CHSH_SCENARIO if config.scenario == "chsh" else qrac_scenario(int(config.scenario[-1]))
    return CHSH_SCENARIO


def span_recipe(config: RunConfig) -> SpanRecipe | None:
    """Recipe of the span a run uses, if any."""
    if config.application in ("classical-fidelity", "verify-oracle", "tsr"):
        # tsr spans follow the scenario of the input table; resolved after loading
        return None
    regime = config.constraint_regime()
    if not regime.uses_span:
        return None
    return make_recipe(regime.dim, regime.rank, _span_scenario(config), config.level, regime.seed)


def _chsh(config: RunConfig) -> list[BoundResult]:
    return [chsh_bound(config.constraint_regime(), config.level, config.tol)]


def _tsr(config: RunConfig) -> list[BoundResult]:
    table = load_table(config.input)
    return [tsr_bound(table, config.constraint_regime(), config.level, config.tol)]


def _tsr_curve(config: RunConfig) -> list[BoundResult]:
    regime = config.constraint_regime()
    grid = config.grid if config.grid is not None else list(chsh_grid(regime, config.points))
    return tsr_curve(regime, config.level, grid, config.tol, workers=config.workers)


def _qrac(config: RunConfig) -> list[BoundResult]:
    return [qrac_bound(config.n, config.constraint_regime(), config.level, config.tol)]


def _selftest(config: RunConfig) -> list[BoundResult]:
    regime = config.constraint_regime()
    if config.observed is not None or config.input is not None:
        observed = config.observed if config.observed is not None else load_table(config.input)
        return [selftest_fidelity(observed, config.level, regime.dim, regime.rank, regime.seed, config.tol)]
    if config.grid is not None:
        grid = config.grid
    else:
        grid = list(np.linspace(QRAC_CLASSICAL, qrac_quantum_value(2), config.points))
    return selftest_curve(grid, config.level, regime.dim, regime.rank, regime.seed, config.tol, workers=config.workers)


def _classical_fidelity(config: RunConfig) -> list[BoundResult]:
    value = classical_fidelity()
    return [
        BoundResult(
            application="classical-fidelity",
            regime="diagonal-states",
            level=0,
            value=value,
            gap=0.0,
            status="optimal",
        )
    ]


def _sample_span(config: RunConfig) -> list[BoundResult]:
    recipe = span_recipe(config)
    span = span_store.get_or_build(recipe)
    return [
        BoundResult(
            application="sample-span",
            regime=config.constraint_regime().label,
            level=config.level,
            parameter=float(span.ambient_dim),
            value=float(span.rank),
            gap=0.0,
            status="optimal",
            span_id=span.span_id,
            seed=recipe.seed,
        )
    ]


def _oracle_check(
    name: str, realization: Realization, value: float, target: float
) -> tuple[BoundResult, dict[str, Any]]:
    """Born-rule value plus PSD and binding checks of the numeric moment blocks."""
    model = build_model(realization.scenario, 1)
    moments = numeric_moments(realization, model.basis)
    min_eig = min(float(np.linalg.eigvalsh(matrix).min()) for matrix in moments.values())
    vector = model.vector_from(moments)
    table = born_probabilities(realization)
    residual = max(
        abs(equality.residual(vector)) for equality in [*normalization(model), *bind_data(model, table)]
    )
    passed = abs(value - target) <= REALIZATION_TOL and min_eig >= -REALIZATION_TOL and residual <= REALIZATION_TOL
    result = BoundResult(
        application="verify-oracle",
        regime=name,
        level=1,
        parameter=target,
        value=value,
        gap=abs(value - target),
        status="optimal" if passed else "mismatch",
    )
    row = {
        "realization": name,
        "value": value,
        "target": target,
        "min_eigenvalue": min_eig,
        "binding_residual": residual,
        "passed": passed,
    }
    return result, row


def _verify_oracle(config: RunConfig) -> list[BoundResult]:
    checks = []
    chsh = chsh_realization()
    checks.append(_oracle_check("chsh-qubit", chsh, chsh_value(born_probabilities(chsh)), 2.0 * np.sqrt(2.0)))
    for n in (2, 3):
        realization = qrac_realization(n)
        checks.append(
            _oracle_check(
                f"qrac-{n}to1",
                realization,
                qrac_success(born_probabilities(realization)),
                qrac_quantum_value(n),
            )
        )
    fidelity = reference_fidelity()
    passed = abs(fidelity - 1.0) <= REALIZATION_TOL
    result = BoundResult(
        application="verify-oracle",
        regime="selftest-reference",
        level=2,
        parameter=1.0,
        value=fidelity,
        gap=abs(fidelity - 1.0),
        status="optimal" if passed else "mismatch",
    )
    checks.append((result, {"realization": "selftest-reference", "value": fidelity, "target": 1.0, "passed": passed}))
    frame = pd.DataFrame([row for _, row in checks])
    print(frame.to_string(index=False, float_format=lambda v: f"{v:.{SIGNIFICANT_DIGITS}g}"))
    return [result for result, _ in checks]


_HANDLERS = {
    "chsh": _chsh,
    "tsr": _tsr,
    "tsr-curve": _tsr_curve,
    "qrac": _qrac,
    "selftest": _selftest,
    "classical-fidelity": _classical_fidelity,
    "sample-span": _sample_span,
    "verify-oracle": _verify_oracle,
}


def _classical_constant(config: RunConfig) -> float | None:
    if config.application in ("selftest", "classical-fidelity"):
        return classical_fidelity()
    return _CLASSICAL_CONSTANTS.get(config.application)


def _span_metadata(results: list[BoundResult], config: RunConfig) -> list[dict[str, Any]]:
    metadata = []
    recipe = span_recipe(config)
    if recipe is not None:
        span = span_store.get(recipe)
        if span is not None:
            metadata.append(span.metadata.model_dump(mode="json"))
    known = {entry["span_id"] for entry in metadata}
    for span_id in sorted({r.span_id for r in results if r.span_id is not None} - known):
        metadata.append({"span_id": span_id})
    return metadata


def run(config: RunConfig) -> int:
    """
    Execute `config` and write `<application>-<hash>.csv` plus a manifest.

    Returns:
        0 when every row finished optimal, 1 otherwise. Module errors
        propagate to the caller.
    """
    run_id = uuid.uuid4().hex[:12]
    config_hash = config.config_hash()
    output_dir = config.output_dir or get_settings().output_dir
    started = time.perf_counter()

    results = [result.with_config_hash(config_hash) for result in _HANDLERS[config.application](config)]
    wall_time = time.perf_counter() - started

    stem = f"{config.application}-{config_hash}"
    csv_path = write_results_csv(results, Path(output_dir) / f"{stem}.csv")
    failed = [result for result in results if not result.ok]
    exit_status = EXIT_OK if not failed else EXIT_NOT_OPTIMAL

    manifest = {
        "qtemporal_version": __version__,
        "run_id": run_id,
        "config": config.model_dump(mode="json"),
        "config_hash": config_hash,
        "csv": csv_path.name,
        "rows": len(results),
        "statuses": sorted({result.status for result in results}),
        "max_gap": max((result.gap for result in results if np.isfinite(result.gap)), default=None),
        "spans": _span_metadata(results, config),
        "classical_constant": _classical_constant(config),
        "wall_time_seconds": round(wall_time, 3),
        "exit_status": exit_status,
    }
    manifest_path = csv_path.with_name(f"{stem}-manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    track_event(
        action="run_finished",
        application=config.application,
        run_id=run_id,
        status="ok" if exit_status == EXIT_OK else "not-optimal",
        payload={"csv": str(csv_path), "rows": len(results), "wall_time_seconds": wall_time},
    )
    for result in failed:
        print(
            f"qtemporal: {result.application} parameter={result.parameter} finished with status {result.status}",
            file=sys.stderr,
        )
    logger.info("wrote %s (%d rows) in %.2fs", csv_path, len(results), wall_time)
    return exit_status
