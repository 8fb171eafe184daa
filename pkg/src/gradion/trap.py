"""Trapping potential, equilibrium positions, and vibrational normal modes.

Three ions on the z axis, each in its own harmonic well, repelling each
other through the Coulomb interaction:

    V(z) = sum_i  m W_i^2 (z_i - zc_i)^2 / 2  +  sum_{i<j} e^2 / (4 pi eps0 |z_i - z_j|)

Two layouts are supported: a micro-trap array (three wells spaced by d,
outer wells sharing one frequency) and a single linear trap (all three
wells coincide). The magnetic gradient exerts no net force here; the
equilibrium is set by the trap and Coulomb terms alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants, DEFAULT_CONSTANTS

# Stopping threshold: 1e-18 N absolute, tightened to 1e-9 of the force scale
# at the starting point -- 1e-18 N alone can be a few percent of the Coulomb
# force for micron-scale chains, which would accept visibly wrong equilibria.
GRADIENT_TOLERANCE = 1e-18  # N
RELATIVE_GRADIENT_TOLERANCE = 1e-9
MAX_NEWTON_ITERATIONS = 200


class ConvergenceError(RuntimeError):
    """Equilibrium solver failed to reach the gradient tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (last residual {residual:.3e} N after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class UnstableModesError(RuntimeError):
    """Hessian has a non-positive eigenvalue: configuration is not a stable minimum."""


@dataclass(frozen=True)
class TrapLayout:
    """Geometry and trap frequencies of the three-ion chain.

    mode
        "multi" for one micro-trap per ion, "linear" for a single shared well.
    centers
        Trap centers zc_i in m. Linear mode: all equal. Multi mode: strictly
        increasing, evenly spaced by ``d``.
    frequencies
        Angular trap frequencies W_i in rad/s. The outer traps are required
        to share one frequency so that the two nearest-neighbor couplings
        come out equal.
    d
        Neighboring trap distance in m (multi mode only).
    """

    mode: str
    centers: np.ndarray
    frequencies: np.ndarray
    d: float | None
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self) -> None:
        centers = np.asarray(self.centers, dtype=float)
        freqs = np.asarray(self.frequencies, dtype=float)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "frequencies", freqs)
        if centers.shape != (3,) or freqs.shape != (3,):
            raise ValueError("layout needs exactly three trap centers and frequencies")
        if np.any(freqs <= 0.0):
            raise ValueError("trap frequencies must be strictly positive")
        if not np.isclose(freqs[0], freqs[2], rtol=1e-12):
            raise ValueError("outer trap frequencies W1 and W3 must be equal")
        if self.mode == "multi":
            if self.d is None or self.d <= 0.0:
                raise ValueError("multi-trap layout requires a positive trap spacing d")
            spacing = np.diff(centers)
            if np.any(spacing <= 0.0) or not np.allclose(spacing, self.d, rtol=1e-12):
                raise ValueError("multi-trap centers must increase in even steps of d")
        elif self.mode == "linear":
            if not np.allclose(centers, centers[0]):
                raise ValueError("linear layout requires coincident trap centers")
            if not np.allclose(freqs, freqs[0], rtol=1e-12):
                raise ValueError("linear layout requires one common trap frequency")
        else:
            raise ValueError(f"unknown layout mode {self.mode!r}")

    @classmethod
    def multi_trap(cls, d: float, w1: float, w2: float,
                   constants: PhysicalConstants = DEFAULT_CONSTANTS) -> "TrapLayout":
        """Micro-trap array: wells at -d, 0, +d with outer frequency w1 and center w2."""
        centers = np.array([-d, 0.0, d])
        return cls("multi", centers, np.array([w1, w2, w1]), d, constants)

    @classmethod
    def linear(cls, w: float,
               constants: PhysicalConstants = DEFAULT_CONSTANTS) -> "TrapLayout":
        """Single linear trap of angular frequency w holding all three ions."""
        return cls("linear", np.zeros(3), np.full(3, w), None, constants)


@dataclass(frozen=True)
class EquilibriumSolution:
    """Converged classical rest positions of the chain.

    ``delta`` is the displacement of the outer ions from their own trap
    center (equal on both sides by symmetry) and ``h`` the distance between
    neighboring ions; in multi-trap mode h = d + delta.
    """

    positions: np.ndarray  # m, strictly increasing
    delta: float  # m
    h: float  # m
    residual: float  # N, infinity-norm of the gradient at the solution
    iterations: int


@dataclass(frozen=True)
class NormalModes:
    """Vibrational frequencies nu (ascending, rad/s) and orthogonal mode matrix D.

    Columns of D are mode vectors; the Hessian factorizes as
    D diag(m nu^2) D^T. Each column's sign is fixed so its largest-magnitude
    entry is positive (couplings are bilinear in D, so this is cosmetic but
    keeps results reproducible).
    """

    nu: np.ndarray
    D: np.ndarray


# -- potential core (works for any number of ions; public API wraps 3) -----

def _potential(positions, centers, freqs, constants) -> float:
    m = constants.mass
    harmonic = 0.5 * m * np.sum(freqs**2 * (positions - centers) ** 2)
    coulomb = 0.0
    n = len(positions)
    for i in range(n):
        for j in range(i + 1, n):
            coulomb += constants.coulomb / abs(positions[i] - positions[j])
    return harmonic + coulomb


def _gradient(positions, centers, freqs, constants) -> np.ndarray:
    m = constants.mass
    grad = m * freqs**2 * (positions - centers)
    n = len(positions)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            r = positions[i] - positions[j]
            grad[i] -= constants.coulomb / (r * abs(r))
    return grad


def _hessian(positions, centers, freqs, constants) -> np.ndarray:
    m = constants.mass
    n = len(positions)
    hess = np.diag(m * freqs**2)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            curv = 2.0 * constants.coulomb / abs(positions[i] - positions[j]) ** 3
            hess[i, i] += curv
            hess[i, j] -= curv
    return hess


def _newton_minimize(guess, centers, freqs, constants):
    """Damped Newton descent on the chain potential.

    Steps are halved until the energy decreases and the ion ordering is
    preserved (the potential extended by |distances| would otherwise let a
    full Newton step relabel ions). The energy comparison carries a few-ulp
    slack so rounding noise near the minimum cannot stall the line search.
    """
    z = np.asarray(guess, dtype=float).copy()
    energy = _potential(z, centers, freqs, constants)
    grad = _gradient(z, centers, freqs, constants)
    tolerance = min(GRADIENT_TOLERANCE,
                    max(RELATIVE_GRADIENT_TOLERANCE * float(np.max(np.abs(grad))),
                        1e-30))
    iteration = 0
    for iteration in range(1, MAX_NEWTON_ITERATIONS + 1):
        residual = float(np.max(np.abs(grad)))
        if residual < tolerance:
            return z, residual, iteration - 1
        step = np.linalg.solve(_hessian(z, centers, freqs, constants), grad)
        slack = 8.0 * np.finfo(float).eps * abs(energy)
        scale = 1.0
        for _ in range(60):
            trial = z - scale * step
            if np.all(np.diff(trial) > 0.0):
                trial_energy = _potential(trial, centers, freqs, constants)
                if trial_energy <= energy + slack:
                    break
            scale *= 0.5
        else:
            break
        z, energy = trial, trial_energy
        grad = _gradient(z, centers, freqs, constants)
    residual = float(np.max(np.abs(grad)))
    if residual < tolerance:
        return z, residual, iteration
    raise ConvergenceError("equilibrium solver did not converge", residual, iteration)


# -- public operations ------------------------------------------------------

def total_potential(layout: TrapLayout, positions: np.ndarray) -> float:
    """Chain potential energy (J) at the given strictly increasing positions."""
    positions = np.asarray(positions, dtype=float)
    if positions.shape != (3,):
        raise ValueError("expected three ion positions")
    if not np.all(np.diff(positions) > 0.0):
        raise ValueError("ion positions must be strictly increasing (no overlap)")
    return _potential(positions, layout.centers, layout.frequencies, layout.constants)


def potential_gradient(layout: TrapLayout, positions: np.ndarray) -> np.ndarray:
    """Analytic gradient of ``total_potential`` (N)."""
    positions = np.asarray(positions, dtype=float)
    if not np.all(np.diff(positions) > 0.0):
        raise ValueError("ion positions must be strictly increasing (no overlap)")
    return _gradient(positions, layout.centers, layout.frequencies, layout.constants)


def potential_hessian(layout: TrapLayout, positions: np.ndarray) -> np.ndarray:
    """Analytic Hessian of ``total_potential`` (N/m)."""
    positions = np.asarray(positions, dtype=float)
    return _hessian(positions, layout.centers, layout.frequencies, layout.constants)


def length_scale(layout: TrapLayout) -> float:
    """Coulomb length (e^2 / (4 pi eps0 m W^2))^(1/3) of the outer trap."""
    c = layout.constants
    return (c.coulomb / (c.mass * layout.frequencies[0] ** 2)) ** (1.0 / 3.0)


def solve_equilibrium(layout: TrapLayout) -> EquilibriumSolution:
    """Find the classical rest positions by damped Newton iteration.

    Initial guess: the trap centers in multi-trap mode, +-one Coulomb length
    around the center in linear mode.
    """
    if layout.mode == "multi":
        guess = layout.centers.copy()
    else:
        ell = length_scale(layout)
        guess = np.array([-ell, 0.0, ell])
    z, residual, iterations = _newton_minimize(
        guess, layout.centers, layout.frequencies, layout.constants)
    delta = float(z[2] - layout.centers[2])
    h = float(z[1] - z[0])
    return EquilibriumSolution(z, delta, h, residual, iterations)


def linear_spacing(w: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Closed-form ion spacing of the symmetric three-ion chain in one well.

    The outer ions sit at +-(5/4)^(1/3) (e^2/(4 pi eps0 m W^2))^(1/3).
    """
    return (1.25 * constants.coulomb / (constants.mass * w**2)) ** (1.0 / 3.0)


def linear_frequency_for_spacing(h: float,
                                 constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Trap frequency at which the three-ion chain spacing equals h."""
    if h <= 0.0:
        raise ValueError("spacing must be positive")
    return float(np.sqrt(1.25 * constants.coulomb / (constants.mass * h**3)))


def normal_modes(layout: TrapLayout, eq: EquilibriumSolution) -> NormalModes:
    """Diagonalize the Hessian at equilibrium into vibrational modes.

    nu_l = sqrt(lambda_l / m) with lambda_l the Hessian eigenvalues.
    """
    hess = _hessian(eq.positions, layout.centers, layout.frequencies, layout.constants)
    evals, vecs = np.linalg.eigh(hess)
    if np.any(evals <= 0.0):
        raise UnstableModesError(
            f"non-positive Hessian eigenvalue {evals.min():.3e}; configuration unstable")
    nu = np.sqrt(evals / layout.constants.mass)
    for col in range(3):
        mags = np.abs(vecs[:, col])
        # near-ties resolve to the lowest index, so the sign stays stable
        # against last-ulp reordering of symmetric mode vectors
        lead = int(np.flatnonzero(mags >= mags.max() * (1.0 - 1e-9))[0])
        if vecs[lead, col] < 0.0:
            vecs[:, col] = -vecs[:, col]
    return NormalModes(nu, vecs)
