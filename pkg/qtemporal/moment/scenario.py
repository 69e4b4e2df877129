"""
Temporal scenarios and observed correlation tables.

Index convention throughout: P[a, b, x, y] = P(a, b | x, y), where (x, a) is
the setting/outcome at the first time and (y, b) at the second time.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from qtemporal.core.errors import InvalidCorrelationTableError, InvalidScenarioError
from qtemporal.core.tolerances import TABLE_TOL


@dataclass(frozen=True)
class Scenario:
    nA: int
    nX: int
    nB: int
    nY: int
    # Preparations instead of measurements at the first time: a is an input
    # with uniform prior and P(a|x) = 1/nA.
    prepare_and_measure: bool = False

    def __post_init__(self) -> None:
        if min(self.nA, self.nX, self.nY) < 1:
            raise InvalidScenarioError(f"Scenario sizes must be >= 1, got {self.shape}")
        if self.nB < 2:
            raise InvalidScenarioError(f"Second-time measurements need nB >= 2, got {self.nB}")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.nA, self.nB, self.nX, self.nY)

    @property
    def block_labels(self) -> tuple[tuple[int, int], ...]:
        return tuple((a, x) for x in range(self.nX) for a in range(self.nA))

    def describe(self) -> str:
        kind = "pm" if self.prepare_and_measure else "temporal"
        return f"{kind}({self.nA},{self.nX},{self.nB},{self.nY})"


CHSH_SCENARIO = Scenario(nA=2, nX=2, nB=2, nY=2)


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    scenario: Scenario
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != self.scenario.shape:
            raise InvalidCorrelationTableError(
                f"Table shape {values.shape} does not match scenario {self.scenario.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def p(self, a: int, b: int, x: int, y: int) -> float:
        return float(self.values[a, b, x, y])

    def marginal(self, a: int, x: int, y: int = 0) -> float:
        """P(a|x), read off through second-time setting y."""
        return float(self.values[a, :, x, y].sum())

    def validate(self, tol: float = TABLE_TOL) -> None:
        values = self.values
        if not np.all(np.isfinite(values)):
            raise InvalidCorrelationTableError("Table contains non-finite entries")
        if values.min() < -tol or values.max() > 1.0 + tol:
            raise InvalidCorrelationTableError("Probabilities must lie in [0, 1]")

        totals = values.sum(axis=(0, 1))
        worst = float(np.max(np.abs(totals - 1.0)))
        if worst > tol:
            raise InvalidCorrelationTableError(
                f"Normalization violated: max |sum_ab P(a,b|x,y) - 1| = {worst:.3e}"
            )

        # Arrow of time: sum_b P(a,b|x,y) must not depend on y.
        marginals = values.sum(axis=1)
        drift = float(np.max(np.abs(marginals - marginals[:, :, :1])))
        if drift > tol:
            raise InvalidCorrelationTableError(
                f"Arrow of time violated: marginal P(a|x) varies with y by {drift:.3e}"
            )

        if self.scenario.prepare_and_measure:
            uniform = float(np.max(np.abs(marginals - 1.0 / self.scenario.nA)))
            if uniform > tol:
                raise InvalidCorrelationTableError(
                    f"Prepare-and-measure inputs must be uniform, deviation {uniform:.3e}"
                )

    @classmethod
    def from_entries(
        cls,
        scenario: Scenario,
        entries: Iterable[tuple[int, int, int, int, float]],
    ) -> CorrelationTable:
        values = np.zeros(scenario.shape)
        seen: set[tuple[int, int, int, int]] = set()
        for a, b, x, y, p in entries:
            key = (int(a), int(b), int(x), int(y))
            if key in seen:
                raise InvalidCorrelationTableError(f"Duplicate entry for (a,b,x,y) = {key}")
            if not all(0 <= k < n for k, n in zip(key, scenario.shape)):
                raise InvalidCorrelationTableError(f"Entry index {key} outside {scenario.shape}")
            seen.add(key)
            values[key] = float(p)
        return cls(scenario=scenario, values=values)

    def entries(self) -> list[tuple[int, int, int, int, float]]:
        nA, nB, nX, nY = self.scenario.shape
        return [
            (a, b, x, y, float(self.values[a, b, x, y]))
            for x in range(nX)
            for y in range(nY)
            for a in range(nA)
            for b in range(nB)
        ]

    @classmethod
    def uniform(cls, scenario: Scenario) -> CorrelationTable:
        return cls(scenario, np.full(scenario.shape, 1.0 / (scenario.nA * scenario.nB)))

    def mix(self, other: CorrelationTable, weight: float) -> CorrelationTable:
        """(1 - weight) * self + weight * other."""
        if other.scenario != self.scenario:
            raise InvalidCorrelationTableError("Cannot mix tables of different scenarios")
        return CorrelationTable(self.scenario, (1.0 - weight) * self.values + weight * other.values)


def deterministic_table(
    scenario: Scenario,
    first: Sequence[int],
    second: Sequence[int],
) -> CorrelationTable:
    """
    Table of a macrorealistic strategy: a = first[x], b = second[y].

    The later outcome ignores the earlier setting, so every such table (and
    every mixture of them) admits a hidden-state model.
    """
    if len(first) != scenario.nX or len(second) != scenario.nY:
        raise InvalidScenarioError(
            f"Strategy needs {scenario.nX} first-time and {scenario.nY} second-time outcomes"
        )
    if any(not 0 <= a < scenario.nA for a in first) or any(not 0 <= b < scenario.nB for b in second):
        raise InvalidScenarioError("Strategy outcome out of range")

    values = np.zeros(scenario.shape)
    for x, a in enumerate(first):
        for y, b in enumerate(second):
            values[a, b, x, y] = 1.0
    return CorrelationTable(scenario, values)


def chsh_coefficients(scenario: Scenario = CHSH_SCENARIO) -> dict[tuple[int, int, int, int], float]:
    """
    K = <A0B0> + <A0B1> + <A1B0> - <A1B1>, <AxBy> = P(a=b|x,y) - P(a!=b|x,y).
    """
    if scenario.shape != (2, 2, 2, 2):
        raise InvalidScenarioError(f"CHSH needs a (2,2,2,2) scenario, got {scenario.shape}")
    coefficients: dict[tuple[int, int, int, int], float] = {}
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    sign = -1.0 if (x, y) == (1, 1) else 1.0
                    coefficients[(a, b, x, y)] = sign * (1.0 if a == b else -1.0)
    return coefficients


def chsh_value(table: CorrelationTable) -> float:
    coefficients = chsh_coefficients(table.scenario)
    return float(sum(c * table.p(*key) for key, c in coefficients.items()))
