from qtemporal.algebra.basis import MonomialBasis, build_basis, generators_for
from qtemporal.algebra.words import (
    IDENTITY,
    ZERO,
    Generator,
    OperatorWord,
    adjoint,
    multiply,
    reduce_letters,
    word_class,
)

__all__ = [
    "IDENTITY",
    "ZERO",
    "Generator",
    "MonomialBasis",
    "OperatorWord",
    "adjoint",
    "build_basis",
    "generators_for",
    "multiply",
    "reduce_letters",
    "word_class",
]
