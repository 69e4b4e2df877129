"""
Constraint regimes characterizing the quantum set.

- di        : PSD moment blocks only
- dim       : plus membership in the span of d-dimensional realizations
- dim-rank  : plus the span of d-dimensional realizations with rank-k POVMs
- nsit      : plus sum_a chi_{a|x} independent of x
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from qtemporal.core.errors import ConfigError
from qtemporal.moment.constraints import LinearEquality, nsit_constraints
from qtemporal.moment.model import MomentModel
from qtemporal.realizations.span import SpanBasis, make_recipe, span_constraints
from qtemporal.realizations.store import SpanStore, span_store

RegimeTag = Literal["di", "dim", "dim-rank", "nsit"]
REGIME_TAGS: tuple[RegimeTag, ...] = ("di", "dim", "dim-rank", "nsit")


@dataclass(frozen=True)
class ConstraintRegime:
    tag: RegimeTag
    dim: int | None = None
    rank: int | None = None
    # seed of the sampled span (dim, dim-rank)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tag not in REGIME_TAGS:
            raise ConfigError(f"Unknown regime {self.tag!r}; expected one of {', '.join(REGIME_TAGS)}")
        if self.tag in ("dim", "dim-rank") and (self.dim is None or self.dim < 1):
            raise ConfigError(f"Regime {self.tag} requires a dimension d >= 1")
        if self.tag == "dim-rank":
            if self.rank is None:
                raise ConfigError("Regime dim-rank requires a rank k")
            if not 1 <= self.rank <= self.dim:
                raise ConfigError(f"Rank k={self.rank} must satisfy 1 <= k <= d={self.dim}")
        elif self.rank is not None:
            raise ConfigError(f"Regime {self.tag} takes no rank")
        if self.tag in ("di", "nsit") and self.dim is not None:
            raise ConfigError(f"Regime {self.tag} takes no dimension")

    @property
    def uses_span(self) -> bool:
        return self.tag in ("dim", "dim-rank")

    @property
    def label(self) -> str:
        if self.tag == "dim":
            return f"dim(d={self.dim})"
        if self.tag == "dim-rank":
            return f"dim-rank(d={self.dim},k={self.rank})"
        return self.tag

    def constraints(
        self,
        model: MomentModel,
        store: SpanStore | None = None,
    ) -> tuple[list[LinearEquality], SpanBasis | None]:
        """Regime equalities on the moment blocks of `model`, plus the span used."""
        if self.tag == "di":
            return [], None
        if self.tag == "nsit":
            return nsit_constraints(model), None

        recipe = make_recipe(self.dim, self.rank, model.scenario, model.level, self.seed)
        span = (store or span_store).get_or_build(recipe)
        return span_constraints(span, model), span
