from qtemporal.apps.chsh import CHSH_ALGEBRAIC, CHSH_CLASSICAL, CHSH_QUANTUM, chsh_bound
from qtemporal.apps.qrac import QRAC_CLASSICAL, qrac_bound, qrac_coefficients, qrac_quantum_value, qrac_success
from qtemporal.apps.records import BoundResult, write_results_csv
from qtemporal.apps.regimes import ConstraintRegime
from qtemporal.apps.selftest import (
    FidelityFunctional,
    classical_fidelity,
    reference_fidelity,
    selftest_curve,
    selftest_fidelity,
)
from qtemporal.apps.steering import DeterministicStrategySet, straight_line, tsr_at_chsh, tsr_bound, tsr_curve

__all__ = [
    "BoundResult",
    "CHSH_ALGEBRAIC",
    "CHSH_CLASSICAL",
    "CHSH_QUANTUM",
    "ConstraintRegime",
    "DeterministicStrategySet",
    "FidelityFunctional",
    "QRAC_CLASSICAL",
    "chsh_bound",
    "classical_fidelity",
    "qrac_bound",
    "qrac_coefficients",
    "qrac_quantum_value",
    "qrac_success",
    "reference_fidelity",
    "selftest_curve",
    "selftest_fidelity",
    "straight_line",
    "tsr_at_chsh",
    "tsr_bound",
    "tsr_curve",
    "write_results_csv",
]
