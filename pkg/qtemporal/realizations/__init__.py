from qtemporal.realizations.model import Realization, born_probabilities, moment_vector, numeric_moments
from qtemporal.realizations.sampling import sample_realization
from qtemporal.realizations.span import (
    SpanBasis,
    SpanMetadata,
    SpanRecipe,
    build_span,
    make_recipe,
    span_constraints,
)

__all__ = [
    "Realization",
    "SpanBasis",
    "SpanMetadata",
    "SpanRecipe",
    "born_probabilities",
    "build_span",
    "make_recipe",
    "moment_vector",
    "numeric_moments",
    "sample_realization",
    "span_constraints",
]
