"""
qtemporal acceptance sweep.

Purpose:
- Run the reference scenarios through the library and print value, target and pass/fail.
- Exit nonzero when any scenario misses its target.

Usage:
- Everything: `python scripts/validate_acceptance.py`
- Skip the level-5 steering curve and the self-testing crossing: `python scripts/validate_acceptance.py --quick`
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np
import pandas as pd

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from qtemporal.apps import (
    CHSH_QUANTUM,
    ConstraintRegime,
    chsh_bound,
    classical_fidelity,
    qrac_bound,
    qrac_quantum_value,
    selftest_curve,
    selftest_fidelity,
    straight_line,
    tsr_at_chsh,
    tsr_curve,
)
from qtemporal.apps.steering import chsh_grid
from qtemporal.core.errors import QTemporalError
from qtemporal.core.tolerances import CURVE_POINTS
from qtemporal.realizations.reference import COS_PI_8

ROWS: list[dict] = []


def _check(name: str, value: float, target: float, tol: float, started: float) -> None:
    passed = bool(np.isfinite(value)) and abs(value - target) <= tol
    ROWS.append(
        {
            "scenario": name,
            "value": value,
            "target": target,
            "tol": tol,
            "seconds": round(time.perf_counter() - started, 2),
            "passed": passed,
        }
    )
    print(f"{'PASS' if passed else 'FAIL'} {name} | value={value:.9g} target={target:.9g}")


def scenario_1_chsh() -> None:
    print("\n--- Scenario 1: Temporal CHSH ---")
    cases = [
        ("chsh di", ConstraintRegime("di"), 4.0, 1e-6),
        ("chsh nsit", ConstraintRegime("nsit"), CHSH_QUANTUM, 1e-4),
        ("chsh dim(d=2)", ConstraintRegime("dim", dim=2), 4.0, 1e-3),
        ("chsh dim-rank(d=2,k=1)", ConstraintRegime("dim-rank", dim=2, rank=1), CHSH_QUANTUM, 1e-3),
    ]
    for name, regime, target, tol in cases:
        started = time.perf_counter()
        _check(name, chsh_bound(regime, 1).value, target, tol, started)


def scenario_2_qrac() -> None:
    print("\n--- Scenario 2: Random access codes ---")
    regime = ConstraintRegime("dim-rank", dim=2, rank=1)
    for n in (2, 3):
        started = time.perf_counter()
        _check(f"qrac {n}->1", qrac_bound(n, regime, 1).value, qrac_quantum_value(n), 1e-4, started)


def scenario_3_steering(workers: int | None) -> None:
    print("\n--- Scenario 3: Steering robustness ---")
    nsit = ConstraintRegime("nsit")
    started = time.perf_counter()
    _check("tsr nsit at 2*sqrt(2)", tsr_at_chsh(CHSH_QUANTUM, nsit, 1).value, straight_line(CHSH_QUANTUM), 1e-3, started)

    for regime in (nsit, ConstraintRegime("dim-rank", dim=2, rank=1)):
        started = time.perf_counter()
        results = tsr_curve(regime, 1, chsh_grid(regime), workers=workers)
        worst = max(abs(r.value - straight_line(r.parameter)) for r in results)
        _check(f"tsr curve {regime.label} max deviation", worst, 0.0, 1e-3, started)


def scenario_4_steering_level5(workers: int | None) -> None:
    print("\n--- Scenario 4: Device-independent steering curve, level 5 ---")
    regime = ConstraintRegime("di")
    grid = np.linspace(2.0, CHSH_QUANTUM, CURVE_POINTS)
    started = time.perf_counter()
    results = tsr_curve(regime, 5, grid, workers=workers)
    worst = max(abs(r.value - straight_line(r.parameter)) for r in results)
    _check("tsr curve di level 5 max deviation", worst, 0.0, 5e-3, started)


def scenario_5_selftest(workers: int | None, crossing: bool) -> None:
    print("\n--- Scenario 5: Self-testing ---")
    started = time.perf_counter()
    _check("classical fidelity", classical_fidelity(), COS_PI_8**2, 1e-8, started)

    started = time.perf_counter()
    _check("selftest at quantum maximum", selftest_fidelity(qrac_quantum_value(2)).value, 1.0, 1e-3, started)

    if not crossing:
        return
    started = time.perf_counter()
    grid = np.linspace(0.815, 0.835, 21)
    values = np.array([r.value for r in selftest_curve(grid, workers=workers)])
    above = np.flatnonzero(values > COS_PI_8**2)
    if len(above) == 0 or above[0] == 0:
        _check("selftest crossing", float("nan"), 0.823, 2e-3, started)
        return
    i = above[0]
    # linear interpolation between the bracketing grid points
    t = (COS_PI_8**2 - values[i - 1]) / (values[i] - values[i - 1])
    _check("selftest crossing", float(grid[i - 1] + t * (grid[i] - grid[i - 1])), 0.823, 2e-3, started)


def _parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Run the qtemporal acceptance scenarios.")
    parser.add_argument("--quick", action="store_true", help="Skip the long-running scenarios.")
    parser.add_argument("--workers", type=int, default=None, help="Worker threads for curves.")
    return parser.parse_args()


if __name__ == "__main__":
    args = _parse_args()
    print("Starting qtemporal acceptance sweep...")
    try:
        scenario_1_chsh()
        scenario_2_qrac()
        scenario_3_steering(args.workers)
        if not args.quick:
            scenario_4_steering_level5(args.workers)
        scenario_5_selftest(args.workers, crossing=not args.quick)
    except QTemporalError as exc:
        print(f"Acceptance sweep failed: {exc}")
        sys.exit(2)

    frame = pd.DataFrame(ROWS)
    print()
    print(frame.to_string(index=False))
    failed = int((~frame["passed"]).sum())
    print(f"\n{len(frame) - failed}/{len(frame)} scenarios passed.")
    sys.exit(1 if failed else 0)
