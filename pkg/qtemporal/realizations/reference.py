"""
Bundled explicit realizations used as oracles.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from qtemporal.core.errors import InvalidScenarioError
from qtemporal.moment.scenario import CHSH_SCENARIO, Scenario
from qtemporal.realizations.linalg import preparation_kraus, projector
from qtemporal.realizations.model import Realization

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

COS_PI_8 = float(np.cos(np.pi / 8))
SIN_PI_8 = float(np.sin(np.pi / 8))


def _dichotomic(observable: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (0.5 * (IDENTITY_2 + observable), 0.5 * (IDENTITY_2 - observable))


def _luders(projectors: tuple[np.ndarray, ...]) -> tuple[tuple[np.ndarray, ...], ...]:
    return tuple((p,) for p in projectors)


def chsh_realization(maximally_mixed: bool = False) -> Realization:
    """
    Qubit strategy reaching K = 2*sqrt(2).

    x = 0 measures Z, x = 1 measures X, each forwarding the post-measurement
    eigenstate; the later measurements are (Z + X)/sqrt(2) and (Z - X)/sqrt(2).
    With a maximally mixed input the summed instruments coincide, so the
    strategy also satisfies no-signalling in time.
    """
    state = IDENTITY_2 / 2 if maximally_mixed else projector([1, 0])
    b0 = (PAULI_Z + PAULI_X) / np.sqrt(2)
    b1 = (PAULI_Z - PAULI_X) / np.sqrt(2)
    return Realization(
        scenario=CHSH_SCENARIO,
        state=state,
        instruments=(_luders(_dichotomic(PAULI_Z)), _luders(_dichotomic(PAULI_X))),
        povms=(_dichotomic(b0), _dichotomic(b1)),
        rank=1,
    )


def qrac_scenario(n: int) -> Scenario:
    """a' = x0, x' = sum_{i>=1} x_i 2^(i-1); one measurement per queried bit."""
    if n not in (2, 3):
        raise InvalidScenarioError(f"Only 2->1 and 3->1 random access codes are supported, got n={n}")
    return Scenario(nA=2, nX=2 ** (n - 1), nB=2, nY=n, prepare_and_measure=True)


def qrac_block(bits: tuple[int, ...]) -> tuple[int, int]:
    """(a', x') block label of the input string (x0, x1, ...)."""
    return bits[0], sum(bit << (i - 1) for i, bit in enumerate(bits) if i >= 1)


def qrac_reference_states(n: int) -> dict[tuple[int, ...], np.ndarray]:
    """Optimal qubit encodings keyed by the bit string (x0, ..., x_{n-1})."""
    states: dict[tuple[int, ...], np.ndarray] = {}
    if n == 2:
        c, s = COS_PI_8, SIN_PI_8
        vectors = {
            (0, 0): [c, s],
            (1, 0): [s, c],
            (0, 1): [-c, s],
            (1, 1): [s, -c],
        }
        for bits, vector in vectors.items():
            states[bits] = projector(vector)
        return states
    if n == 3:
        for bits in product((0, 1), repeat=3):
            x0, x1, x2 = bits
            bloch = np.array([(-1) ** x1, (-1) ** x2, (-1) ** x0]) / np.sqrt(3)
            states[bits] = 0.5 * (IDENTITY_2 + bloch[0] * PAULI_X + bloch[1] * PAULI_Y + bloch[2] * PAULI_Z)
        return states
    raise InvalidScenarioError(f"No reference encoding for n={n}")


def qrac_reference_measurements(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Bit y is read out by Z, X, Y for y = 0, 1, 2; outcome b guesses x_y."""
    observables = (PAULI_Z, PAULI_X, PAULI_Y)[:n]
    return tuple(_dichotomic(observable) for observable in observables)


def preparation_realization(
    scenario: Scenario,
    states: dict[tuple[int, int], np.ndarray],
    povms: tuple[tuple[np.ndarray, ...], ...],
    rank: int | None = None,
) -> Realization:
    """Prepare-and-measure realization from states keyed by block (a, x)."""
    dim = povms[0][0].shape[0]
    instruments = tuple(
        tuple(preparation_kraus(states[(a, x)], scenario.nA) for a in range(scenario.nA))
        for x in range(scenario.nX)
    )
    return Realization(
        scenario=scenario,
        state=np.eye(dim, dtype=complex) / dim,
        instruments=instruments,
        povms=povms,
        rank=rank,
    )


def qrac_realization(n: int) -> Realization:
    scenario = qrac_scenario(n)
    states = {qrac_block(bits): state for bits, state in qrac_reference_states(n).items()}
    return preparation_realization(scenario, states, qrac_reference_measurements(n), rank=1)

