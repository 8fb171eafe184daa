"""Qubit frequencies, gradient-induced Ising couplings, and spin spectra.

A static magnetic gradient along the chain makes each qubit's transition
frequency position dependent. In the strong-field (Paschen-Back) regime the
slope is the same for every ion,

    dw/dz = 2 mu_B B' / hbar,

and the gradient couples the spins through the shared vibrational modes:

    J_ij   = sum_l  hbar / (2 m nu_l^2) D_il D_jl (dw/dz)^2
    eps_il = D_il sqrt(hbar / (2 m nu_l)) (dw/dz) / nu_l

eps_il plays the role of an extra Lamb-Dicke parameter; the model is valid
while max |eps_il| stays well below 1 (0.05 is used as the design ceiling).

Pauli convention used everywhere: sigma_z |1> = +|1>, sigma_z |0> = -|0>.
This is forced by the eight-level spectrum listed in `spin_spectrum` and it
silently flips downstream correction operators if changed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants, DEFAULT_CONSTANTS
from .trap import EquilibriumSolution, NormalModes

#: basis index of |b1 b2 b3> is 4*b1 + 2*b2 + b3
BASIS_SIZE = 8

#: basis indices sorted by excitation number, then by position of the
#: excited ion: 000, 100, 010, 001, 110, 101, 011, 111
EXCITATION_ORDER = (0, 4, 2, 1, 6, 5, 3, 7)


@dataclass(frozen=True)
class FieldConfig:
    """Static magnetic field: uniform offset b0 (T) and gradient (T/m).

    ``eta`` is the bare microwave Lamb-Dicke parameter (about 1e-6 for a
    13 GHz drive); it only matters through eta' = sqrt(eta^2 + eps^2).
    The Paschen-Back form of the qubit frequencies assumes b0 is large; the
    assumption is not enforced numerically.
    """

    gradient: float  # T/m
    b0: float = 1.0  # T
    eta: float = 1e-6

    def __post_init__(self) -> None:
        if self.gradient < 0.0:
            raise ValueError("field gradient must be non-negative")
        if self.eta < 0.0:
            raise ValueError("eta must be non-negative")


@dataclass(frozen=True)
class CouplingSet:
    """Spin Hamiltonian parameters of the chain (all rad/s except eps, eta)."""

    w: np.ndarray  # qubit frequencies w_i(z0_i), shape (3,)
    dwdz: float  # common frequency gradient, rad/(s m)
    J: float  # nearest-neighbor coupling J12 = J23
    J13: float  # outer-pair coupling
    eps: np.ndarray  # signed effective Lamb-Dicke parameters, shape (3, 3)
    eps_max: float  # max |eps|
    eta: float
    eta_prime: np.ndarray  # sqrt(eta^2 + eps^2), shape (3, 3)


@dataclass(frozen=True)
class SpinSpectrum:
    """Eigenenergies of the spin part of the chain Hamiltonian.

    ``energies[b]`` belongs to |b1 b2 b3> with b = 4*b1 + 2*b2 + b3;
    ``by_excitation`` re-lists them in EXCITATION_ORDER.
    """

    energies: np.ndarray  # rad/s, shape (8,)

    @property
    def by_excitation(self) -> np.ndarray:
        return self.energies[list(EXCITATION_ORDER)]


@dataclass(frozen=True)
class CarrierSpectrum:
    """Conditional carrier transition frequencies.

    ``transitions[i, k]`` is the spin-flip frequency of ion i+1 given the
    other two ions in state k (k = 2*b + b', bits ordered by ion index:
    ion 1 -> (b2, b3), ion 2 -> (b1, b3), ion 3 -> (b1, b2)).
    ``spreads[i]`` is the maximal difference for ion i+1: 2(J + J13) for the
    outer ions and 4J for the center ion.
    """

    transitions: np.ndarray  # rad/s, shape (3, 4)
    spreads: np.ndarray  # rad/s, shape (3,)


def qubit_frequencies(field: FieldConfig, eq: EquilibriumSolution,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS,
                      ) -> tuple[np.ndarray, float]:
    """Position-dependent qubit frequencies and their common gradient.

    w_i = w_hf + (2 mu_B / hbar) (b0 + B' z0_i);  dw/dz = 2 mu_B B' / hbar.
    """
    dwdz = 2.0 * constants.mu_b * field.gradient / constants.hbar
    w = constants.hyperfine + (2.0 * constants.mu_b / constants.hbar) * (
        field.b0 + field.gradient * eq.positions)
    return w, float(dwdz)


def neighbor_resonance_shift(field: FieldConfig, h: float,
                             constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Qubit frequency difference g mu_B B' h / hbar between neighboring ions."""
    if h <= 0.0:
        raise ValueError("inter-ion distance must be positive")
    return constants.g_factor * constants.mu_b * field.gradient * h / constants.hbar


def effective_lamb_dicke(modes: NormalModes, field: FieldConfig,
                         constants: PhysicalConstants = DEFAULT_CONSTANTS,
                         ) -> tuple[np.ndarray, float, np.ndarray]:
    """Gradient-induced Lamb-Dicke matrix eps_il, its max modulus, and eta'.

    eps is stored signed (the mode-matrix entry carries its sign); the
    validity ceiling applies to |eps|.
    """
    dwdz = 2.0 * constants.mu_b * field.gradient / constants.hbar
    ground_width = np.sqrt(constants.hbar / (2.0 * constants.mass * modes.nu))
    eps = modes.D * (ground_width * dwdz / modes.nu)[np.newaxis, :]
    eta_prime = np.sqrt(field.eta**2 + eps**2)
    return eps, float(np.max(np.abs(eps))), eta_prime


def compute_couplings(modes: NormalModes, field: FieldConfig, eq: EquilibriumSolution,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS) -> CouplingSet:
    """Assemble the full coupling set for a solved chain.

    The mode sum for J_ij equals (hbar/2) (dw/dz)^2 [K^-1]_ij with K the
    Hessian, so J is invariant under any per-column sign flip of D.
    """
    w, dwdz = qubit_frequencies(field, eq, constants)
    inv_mnu2 = 1.0 / (constants.mass * modes.nu**2)
    jmat = constants.hbar * 0.5 * dwdz**2 * (modes.D * inv_mnu2) @ modes.D.T
    j12, j23, j13 = jmat[0, 1], jmat[1, 2], jmat[0, 2]
    scale = max(abs(j12), abs(j23), 1e-300)
    if abs(j12 - j23) > 1e-8 * scale:
        raise ValueError(
            "nearest-neighbor couplings differ; layout must keep W1 == W3")
    eps, eps_max, eta_prime = effective_lamb_dicke(modes, field, constants)
    return CouplingSet(w=w, dwdz=dwdz, J=float(j12), J13=float(j13),
                       eps=eps, eps_max=eps_max, eta=field.eta, eta_prime=eta_prime)


def _signs(index: int) -> np.ndarray:
    """sigma_z eigenvalues (s1, s2, s3) of basis state |b1 b2 b3>."""
    bits = np.array([(index >> 2) & 1, (index >> 1) & 1, index & 1])
    return 2.0 * bits - 1.0


def spin_energy(couplings: CouplingSet, index: int) -> float:
    """Closed-form energy of one basis state of the spin Hamiltonian.

    E = sum_i w_i s_i / 2 - J s1 s2 / 2 - J s2 s3 / 2 - J13 s1 s3 / 2.
    """
    s = _signs(index)
    return float(
        0.5 * np.dot(couplings.w, s)
        - 0.5 * couplings.J * (s[0] * s[1] + s[1] * s[2])
        - 0.5 * couplings.J13 * s[0] * s[2]
    )


def spin_spectrum(couplings: CouplingSet) -> SpinSpectrum:
    """All eight spin eigenenergies, indexed by 4*b1 + 2*b2 + b3."""
    return SpinSpectrum(np.array([spin_energy(couplings, b) for b in range(BASIS_SIZE)]))


def carrier_spectrum(couplings: CouplingSet) -> CarrierSpectrum:
    """Conditional carrier frequencies: spectrum differences flipping one bit."""
    spectrum = spin_spectrum(couplings).energies
    transitions = np.empty((3, 4))
    for ion in range(3):
        bit = 2 - ion  # ion 1 owns the most significant bit
        others = [b for b in range(3) if b != ion]
        for k in range(4):
            partial = [(k >> 1) & 1, k & 1]
            bits = [0, 0, 0]
            bits[others[0]], bits[others[1]] = partial
            low = (bits[0] << 2) | (bits[1] << 1) | bits[2]
            transitions[ion, k] = spectrum[low | (1 << bit)] - spectrum[low]
    spreads = transitions.max(axis=1) - transitions.min(axis=1)
    return CarrierSpectrum(transitions, spreads)


def heating_time_scaled(reference_time: float, reference_size: float,
                        size: float) -> float:
    """Rescale a motional heating time by the fourth power of trap size.

    Heating rates grow as R^-4 when a trap is shrunk, so the heating time
    scales as (size / reference_size)^4.
    """
    if reference_time <= 0.0 or reference_size <= 0.0 or size <= 0.0:
        raise ValueError("times and sizes must be positive")
    return reference_time * (size / reference_size) ** 4
