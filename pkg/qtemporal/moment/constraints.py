from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from qtemporal.algebra.words import OperatorWord
from qtemporal.core.errors import InvalidCorrelationTableError, InvalidScenarioError
from qtemporal.moment.model import MomentModel
from qtemporal.moment.scenario import CorrelationTable


@dataclass(frozen=True)
class LinearEquality:
    """sum_k coefficients[k] * x[k] == rhs"""

    coefficients: Mapping[int, float]
    rhs: float = 0.0
    name: str = ""

    def residual(self, x: np.ndarray) -> float:
        return float(sum(c * x[k] for k, c in self.coefficients.items()) - self.rhs)


@dataclass(frozen=True)
class AffineObjective:
    coefficients: Mapping[int, float] = field(default_factory=dict)
    constant: float = 0.0

    def evaluate(self, x: np.ndarray) -> float:
        return float(self.constant + sum(c * x[k] for k, c in self.coefficients.items()))

    def dense(self, n_vars: int) -> np.ndarray:
        vector = np.zeros(n_vars)
        for k, c in self.coefficients.items():
            vector[k] += c
        return vector

    def scaled(self, factor: float) -> AffineObjective:
        return AffineObjective(
            {k: factor * c for k, c in self.coefficients.items()}, factor * self.constant
        )

    def __add__(self, other: AffineObjective) -> AffineObjective:
        merged = dict(self.coefficients)
        for k, c in other.coefficients.items():
            merged[k] = merged.get(k, 0.0) + c
        return AffineObjective(merged, self.constant + other.constant)


def stack_equalities(
    equalities: Iterable[LinearEquality], n_vars: int
) -> tuple[np.ndarray, np.ndarray]:
    rows = list(equalities)
    matrix = np.zeros((len(rows), n_vars))
    rhs = np.zeros(len(rows))
    for r, eq in enumerate(rows):
        for k, c in eq.coefficients.items():
            matrix[r, k] += c
        rhs[r] = eq.rhs
    return matrix, rhs


def normalization(model: MomentModel) -> list[LinearEquality]:
    """sum_a P(a|x) = 1 for every x; P(a|x) = 1/nA for preparations."""
    scenario = model.scenario
    equalities: list[LinearEquality] = []
    for x in range(scenario.nX):
        if scenario.prepare_and_measure:
            for a in range(scenario.nA):
                equalities.append(
                    LinearEquality(model.marginal_expr(a, x), 1.0 / scenario.nA, f"prior[{a}|{x}]")
                )
            continue
        form: dict[int, float] = {}
        for a in range(scenario.nA):
            form.update(model.marginal_expr(a, x))
        equalities.append(LinearEquality(form, 1.0, f"norm[{x}]"))
    return equalities


def bind_data(model: MomentModel, data: CorrelationTable) -> list[LinearEquality]:
    """
    One equality per bound entry: P(a|x) on the identity word and
    P(a,b|x,y) on each generator word.
    """
    if data.scenario.shape != model.scenario.shape:
        raise InvalidCorrelationTableError(
            f"Table shape {data.scenario.shape} does not match model {model.scenario.shape}"
        )
    data.validate()

    scenario = model.scenario
    equalities: list[LinearEquality] = []
    for a, x in scenario.block_labels:
        equalities.append(
            LinearEquality(model.marginal_expr(a, x), data.marginal(a, x), f"P({a}|{x})")
        )
        for y in range(scenario.nY):
            for b in range(scenario.nB - 1):
                equalities.append(
                    LinearEquality(
                        model.probability_expr(a, b, x, y),
                        data.p(a, b, x, y),
                        f"P({a},{b}|{x},{y})",
                    )
                )
    return equalities


def nsit_constraints(model: MomentModel) -> list[LinearEquality]:
    """sum_a chi_{a|x} == sum_a chi_{a|x'} for every pair x < x', per variable."""
    scenario = model.scenario
    equalities: list[LinearEquality] = []
    reference = model.block(0, 0)
    for x in range(scenario.nX):
        for x_other in range(x + 1, scenario.nX):
            for rep, var in reference.variables.items():
                for part in range(len(var.ids)):
                    form: dict[int, float] = {}
                    for a in range(scenario.nA):
                        form[model.block(a, x).variables[rep].ids[part]] = 1.0
                        form[model.block(a, x_other).variables[rep].ids[part]] = -1.0
                    suffix = "re" if part == 0 else "im"
                    equalities.append(
                        LinearEquality(form, 0.0, f"nsit[{x},{x_other}]<{rep}>.{suffix}")
                    )
    return equalities


def functional(
    model: MomentModel,
    coefficients: Mapping[tuple[int, int, int, int], float],
    constant: float = 0.0,
) -> AffineObjective:
    """sum over (a,b,x,y) of coefficient * P(a,b|x,y)."""
    form: dict[int, float] = {}
    for (a, b, x, y), weight in coefficients.items():
        if weight == 0.0:
            continue
        try:
            expr = model.probability_expr(a, b, x, y)
        except (InvalidScenarioError, IndexError) as exc:
            raise InvalidScenarioError(
                f"Functional references P({a},{b}|{x},{y}) outside the bound entries"
            ) from exc
        for vid, c in expr.items():
            form[vid] = form.get(vid, 0.0) + weight * c
    return AffineObjective({k: c for k, c in form.items() if c != 0.0}, constant)


def word_functional(
    model: MomentModel,
    weights: Mapping[tuple[tuple[int, int], OperatorWord], complex],
    constant: float = 0.0,
) -> AffineObjective:
    """Re sum of weight * chi_{a|x}(word) over arbitrary moment entries."""
    form: dict[int, float] = {}
    for ((a, x), word), weight in weights.items():
        for vid, c in model.block(a, x).word_expr(word).items():
            form[vid] = form.get(vid, 0.0) + float(np.real(complex(weight) * c))
    return AffineObjective({k: c for k, c in form.items() if c != 0.0}, constant)
