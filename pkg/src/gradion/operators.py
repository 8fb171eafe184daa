"""Dense operators on the three-qubit space.

Basis: |b1 b2 b3> at index 4*b1 + 2*b2 + b3 (ion 1 owns the most
significant bit). Single-qubit matrices are written in the ordered basis
(|0>, |1>) with sigma_z |1> = +|1>; sigma_y is fixed by
U(theta, pi/2) = exp(i theta/2 sigma_y) for the pulse operator of
`pulses.single_qubit_rotation`, i.e. sigma_y = -i(sigma_+ - sigma_-).
"""

from __future__ import annotations

import numpy as np

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
HADAMARD_2 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


def embed(op: np.ndarray, ion: int) -> np.ndarray:
    """Promote a single-qubit operator to the 8x8 space acting on ``ion`` (1-3)."""
    if ion not in (1, 2, 3):
        raise ValueError(f"ion index must be 1, 2, or 3, got {ion}")
    factors = [IDENTITY_2, IDENTITY_2, IDENTITY_2]
    factors[ion - 1] = np.asarray(op, dtype=complex)
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def pauli_z(ion: int) -> np.ndarray:
    return embed(SIGMA_Z, ion)


def spin_hamiltonian_matrix(w, J: float, J13: float) -> np.ndarray:
    """Spin Hamiltonian as an explicit (diagonal) 8x8 matrix.

    H = sum_i w_i sigma_z_i / 2 - J sz1 sz2 / 2 - J sz2 sz3 / 2 - J13 sz1 sz3 / 2.
    Used as a cross-check against the closed-form spectrum.
    """
    z1, z2, z3 = pauli_z(1), pauli_z(2), pauli_z(3)
    return (0.5 * (w[0] * z1 + w[1] * z2 + w[2] * z3)
            - 0.5 * J * (z1 @ z2 + z2 @ z3)
            - 0.5 * J13 * (z1 @ z3))


def cnot_matrix(control: int, target: int) -> np.ndarray:
    """Canonical CNOT permutation: flips the target bit when the control bit is 1."""
    if control == target or control not in (1, 2, 3) or target not in (1, 2, 3):
        raise ValueError("control and target must be distinct ions in 1..3")
    U = np.zeros((8, 8), dtype=complex)
    for b in range(8):
        bits = [(b >> 2) & 1, (b >> 1) & 1, b & 1]
        bits[target - 1] ^= bits[control - 1]
        U[(bits[0] << 2) | (bits[1] << 1) | bits[2], b] = 1.0
    return U


def hadamard_matrix(ion: int) -> np.ndarray:
    """Hadamard on one ion: |0> -> (|0>+|1>)/sqrt2, |1> -> (|0>-|1>)/sqrt2."""
    return embed(HADAMARD_2, ion)


def projector_12(b1: int, b2: int) -> np.ndarray:
    """Projector |b1 b2><b1 b2| on ions 1, 2 (identity on ion 3)."""
    P = np.zeros((8, 8), dtype=complex)
    for b3 in (0, 1):
        idx = (b1 << 2) | (b2 << 1) | b3
        P[idx, idx] = 1.0
    return P


def reduced_density(state: np.ndarray, keep: tuple[int, ...]) -> np.ndarray:
    """Partial trace of a pure state or 8x8 density matrix onto ``keep`` ions."""
    state = np.asarray(state, dtype=complex)
    rho = np.outer(state, state.conj()) if state.ndim == 1 else state
    tensor = rho.reshape(2, 2, 2, 2, 2, 2)
    keep0 = sorted(i - 1 for i in keep)
    drop = [i for i in range(3) if i not in keep0]
    for axis in reversed(drop):
        tensor = np.trace(tensor, axis1=axis, axis2=axis + tensor.ndim // 2)
    dim = 2 ** len(keep0)
    return tensor.reshape(dim, dim)


def max_unitarity_defect(U: np.ndarray) -> float:
    """Entrywise deviation of U^dagger U from the identity."""
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def deviation_up_to_phase(U: np.ndarray, V: np.ndarray) -> float:
    """Max entrywise |U - e^{i phi} V| after aligning the global phase."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    flat = np.argmax(np.abs(V))
    idx = np.unravel_index(flat, V.shape)
    if abs(U[idx]) == 0.0:
        return float(np.max(np.abs(U - V)))
    phase = (V[idx] / U[idx])
    phase /= abs(phase)
    return float(np.max(np.abs(phase * U - V)))
