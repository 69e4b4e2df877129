"""
qtemporal - Numerical tolerance definitions

Static tolerances shared by the moment builder, the solvers and the
span sampler.

IMPORTANT RULES:
- Tolerances are constants, not tuned at runtime
- Callers may pass a tighter/looser solver tolerance within
  [SOLVER_TOL_MIN, SOLVER_TOL_MAX]; nothing else is configurable
"""

# =========================
# Input validation
# =========================

# Absolute tolerance for correlation-table normalization and arrow of time
TABLE_TOL: float = 1e-9

# Maximum asymmetry accepted by the Hermitian embedding
HERMITIAN_TOL: float = 1e-12

# Realization checks (trace, completeness, PSD)
REALIZATION_TOL: float = 1e-10

# Eigenvalues above this count toward the rank of a POVM element
RANK_TOL: float = 1e-8


# =========================
# Semidefinite solver
# =========================

SOLVER_TOL_DEFAULT: float = 1e-8
SOLVER_TOL_MIN: float = 1e-10
SOLVER_TOL_MAX: float = 1e-4
SOLVER_MAX_ITERATIONS: int = 200


# =========================
# Span sampling
# =========================

SPAN_RANK_TOL: float = 1e-8
SPAN_BATCH_SIZE: int = 50
SPAN_MAX_BATCHES: int = 40
SPAN_STABLE_BATCHES: int = 3


# =========================
# Output
# =========================

CURVE_POINTS: int = 41
SIGNIFICANT_DIGITS: int = 9


def validate_tolerances() -> None:
    """
    Ensures the tolerance table is sane.
    Called once by the CLI before any run.
    """
    if not 0.0 < SOLVER_TOL_MIN <= SOLVER_TOL_DEFAULT <= SOLVER_TOL_MAX < 1.0:
        raise ValueError(
            "Invalid solver tolerances: "
            "Ensure 0 < MIN <= DEFAULT <= MAX < 1"
        )
    if SOLVER_MAX_ITERATIONS < 1 or SPAN_STABLE_BATCHES < 1:
        raise ValueError("Iteration caps must be positive")
    if not 0.0 < HERMITIAN_TOL <= TABLE_TOL:
        raise ValueError("Hermiticity tolerance must not exceed the table tolerance")
