from __future__ import annotations

import numpy as np

from qtemporal.core.tolerances import HERMITIAN_TOL


def embed_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """
    Real symmetric embedding [[Re H, -Im H], [Im H, Re H]].

    The embedding is PSD iff H is, and its spectrum is that of H with every
    eigenvalue doubled in multiplicity.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {matrix.shape}")
    asymmetry = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
    if asymmetry > tol:
        raise ValueError(f"Matrix is not Hermitian (asymmetry {asymmetry:.3e})")
    return embed_stack(matrix[None, :, :])[0]


def embed_stack(matrices: np.ndarray) -> np.ndarray:
    """Embedding applied to a (k, n, n) stack, without Hermiticity checks."""
    real = np.real(matrices)
    imag = np.imag(matrices)
    top = np.concatenate([real, -imag], axis=2)
    bottom = np.concatenate([imag, real], axis=2)
    return np.concatenate([top, bottom], axis=1)
