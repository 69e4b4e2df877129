from qtemporal.moment.constraints import (
    AffineObjective,
    LinearEquality,
    bind_data,
    functional,
    normalization,
    nsit_constraints,
    stack_equalities,
    word_functional,
)
from qtemporal.moment.model import (
    Binding,
    EntryRef,
    MomentBlock,
    MomentModel,
    build_model,
    symbolic_block,
)
from qtemporal.moment.scenario import (
    CHSH_SCENARIO,
    CorrelationTable,
    Scenario,
    chsh_coefficients,
    chsh_value,
    deterministic_table,
)

__all__ = [
    "AffineObjective",
    "Binding",
    "CHSH_SCENARIO",
    "CorrelationTable",
    "EntryRef",
    "LinearEquality",
    "MomentBlock",
    "MomentModel",
    "Scenario",
    "bind_data",
    "build_model",
    "chsh_coefficients",
    "chsh_value",
    "deterministic_table",
    "functional",
    "normalization",
    "nsit_constraints",
    "stack_equalities",
    "symbolic_block",
    "word_functional",
]
