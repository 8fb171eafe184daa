"""Microwave pulse alphabet, refocusing scaffolds, and gate schedules.

Everything is expressed with one primitive, the resonant carrier rotation
of a single addressed ion in the interaction picture,

    U(theta, phi) = exp[ i theta/2 (e^{-i phi} sigma_+ + e^{i phi} sigma_-) ],

plus free evolution under the always-on spin Hamiltonian. A schedule is an
ordered list of segments: pulse slots (one or more simultaneous rotations
on distinct ions, booked at the fixed implementation time t_m) and free
intervals. Segment unitaries are ideal: rotations act instantaneously and
spin-spin phases accrue only during free intervals; `integrate.integrate_exact`
quantifies what that idealization discards.

Sign conventions (sigma_z |1> = +|1>) make two identities hold exactly:

* the four-interval refocusing scaffold leaves only the chosen sigma_z sigma_z
  term, and exp(-i pi/4 szsz) is first reached at t = 7 pi / (2 J) -- the
  coupling enters the Hamiltonian as -J/2 szsz, so the accumulated phase is
  +J t / 2 and must wrap past 2 pi to reach -pi/4;
* U(pi/2, pi/2) U(pi/2, 0) U(7 pi/2, pi/2) = exp(+i pi/4 sigma_z) with no
  global phase; flipping the sign of both pi/2 phase offsets inverts it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .constants import TWO_PI
from .couplings import CouplingSet, spin_spectrum
from .operators import embed

LAB = "lab"
INTERACTION = "interaction"
FRAMES = (LAB, INTERACTION)

T_M_DEFAULT = 2.5e-6  # s, booked wall-clock time of any single rotation
RABI_DEFAULT = TWO_PI * 1.0e6  # rad/s


class CommensurationError(RuntimeError):
    """No pulse length near the nominal one wraps all qubit phases well enough."""

    def __init__(self, best_residual: float, tolerance: float):
        super().__init__(
            f"best commensuration residual {best_residual:.3e} rad exceeds "
            f"tolerance {tolerance:.3e} rad")
        self.best_residual = best_residual
        self.tolerance = tolerance


@dataclass(frozen=True)
class SpinState:
    """Normalized amplitudes of |b1 b2 b3> (index 4*b1 + 2*b2 + b3) plus frame tag."""

    amplitudes: np.ndarray
    frame: str = INTERACTION

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (8,):
            raise ValueError("spin state needs eight amplitudes")
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
            raise ValueError("spin state is not normalized")

    @classmethod
    def product(cls, q1, q2, q3, frame: str = INTERACTION) -> "SpinState":
        """Build |q1> x |q2> x |q3> from three 2-component qubit states."""
        amps = np.kron(np.kron(np.asarray(q1, complex), np.asarray(q2, complex)),
                       np.asarray(q3, complex))
        amps = amps / np.linalg.norm(amps)
        return cls(amps, frame)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Pulse:
    """One carrier rotation: ion, angle, phase, Rabi frequency, realized length.

    ``duration`` is theta / rabi; in the lab frame it is nudged onto a common
    multiple of the qubit periods and the integers N_i with the leftover
    phases are recorded (w_i * duration = 2 pi N_i + residual_i).
    """

    ion: int
    theta: float
    phi: float
    rabi: float
    duration: float
    cycles: tuple[int, int, int] | None = None
    residuals: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class PulseSlot:
    """Simultaneous rotations on distinct ions, booked at one wall-clock slot."""

    pulses: tuple[Pulse, ...]
    duration: float
    label: str = ""

    def __post_init__(self) -> None:
        ions = [p.ion for p in self.pulses]
        if len(set(ions)) != len(ions):
            raise ValueError("simultaneous pulses must target distinct ions")
        if self.duration < 0.0:
            raise ValueError("slot duration must be non-negative")


@dataclass(frozen=True)
class FreeEvolution:
    """Evolution under the bare spin Hamiltonian for ``duration`` seconds."""

    duration: float
    label: str = ""

    def __post_init__(self) -> None:
        if self.duration < 0.0:
            raise ValueError("free evolution duration must be non-negative")


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered segments (applied first to last) with a frame tag."""

    items: tuple
    frame: str = INTERACTION

    @property
    def total_duration(self) -> float:
        return float(sum(item.duration for item in self.items))

    def pulses(self):
        for item in self.items:
            if isinstance(item, PulseSlot):
                yield from item.pulses

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        if other.frame != self.frame:
            raise ValueError("cannot concatenate schedules in different frames")
        return PulseSchedule(self.items + other.items, self.frame)


# -- elementary unitaries ---------------------------------------------------

def rotation_2x2(theta: float, phi: float) -> np.ndarray:
    """cos(t/2) I + i sin(t/2) [[0, e^{i phi}], [e^{-i phi}, 0]]."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, 1j * s * np.exp(1j * phi)],
                     [1j * s * np.exp(-1j * phi), c]])


def single_qubit_rotation(ion: int, theta: float, phi: float) -> np.ndarray:
    """8x8 unitary of one addressed rotation, identity on the other ions."""
    return embed(rotation_2x2(theta, phi), ion)


def spin_energies(couplings: CouplingSet, frame: str) -> np.ndarray:
    """Diagonal of the spin Hamiltonian; the interaction frame drops the w_i terms."""
    if frame == INTERACTION:
        couplings = replace(couplings, w=np.zeros(3))
    elif frame != LAB:
        raise ValueError(f"unknown frame {frame!r}")
    return spin_spectrum(couplings).energies


def free_evolution(couplings: CouplingSet, t: float, frame: str = INTERACTION) -> np.ndarray:
    """Diagonal unitary exp(-i H0 t) of the spin Hamiltonian."""
    if t < 0.0:
        raise ValueError("evolution time must be non-negative")
    return np.diag(np.exp(-1j * spin_energies(couplings, frame) * t))


# -- pulse commensuration ---------------------------------------------------

@dataclass(frozen=True)
class CommensurationResult:
    """Pulse length T with w_i T = 2 pi N_i + residual_i for every ion."""

    duration: float
    rabi: float
    cycles: tuple[int, int, int]
    residuals: tuple[float, ...]
    max_residual: float


def commensurate_pulse(w, theta: float, rabi_nominal: float,
                       tolerance: float = 1e-3, window: float = 0.2,
                       ) -> CommensurationResult:
    """Tune a pulse length so every qubit's free phase wraps to ~2 pi N.

    Scans the exact wrap times of the middle frequency, T = 2 pi N / w_mid,
    within ``window`` of the nominal length theta / rabi_nominal, and keeps
    the one minimizing the worst wrapped phase over all ions. The Rabi
    frequency is then re-derived as theta / T.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w <= 0.0):
        raise ValueError("qubit frequencies must be positive")
    if theta <= 0.0 or rabi_nominal <= 0.0:
        raise ValueError("theta and nominal Rabi frequency must be positive")
    t_nominal = theta / rabi_nominal
    anchor = w[len(w) // 2]
    n_lo = max(1, int(np.floor(anchor * t_nominal * (1.0 - window) / TWO_PI)))
    n_hi = int(np.ceil(anchor * t_nominal * (1.0 + window) / TWO_PI))
    if n_hi - n_lo > 2_000_000:
        raise ValueError(
            f"commensuration scan of {n_hi - n_lo} candidates; narrow the "
            f"window or shorten the nominal pulse")
    best = None  # (max residual, T, residual vector)
    for n in range(n_lo, n_hi + 1):
        T = TWO_PI * n / anchor
        residuals = w * T - TWO_PI * np.round(w * T / TWO_PI)
        worst = float(np.max(np.abs(residuals)))
        if best is None or worst < best[0]:
            best = (worst, T, residuals)
    if best is None or best[0] > tolerance:
        raise CommensurationError(best[0] if best else np.inf, tolerance)
    worst, T, residuals = best
    cycles = np.asarray(np.round(w * T / TWO_PI), dtype=int)
    cycles3 = tuple(int(c) for c in np.resize(cycles, 3))
    return CommensurationResult(T, theta / T, cycles3, tuple(residuals), worst)


# -- schedule builders ------------------------------------------------------

def _make_pulse(ion, theta, phi, rabi, frame, couplings, tolerance,
                commensurate) -> Pulse:
    if commensurate:
        if frame != LAB:
            raise ValueError("pulse-length commensuration applies to lab-frame "
                             "schedules only")
        if couplings is None:
            raise ValueError("commensuration needs the coupling set's qubit "
                             "frequencies")
        fit = commensurate_pulse(couplings.w, theta, rabi, tolerance=tolerance)
        return Pulse(ion, theta, phi, fit.rabi, fit.duration,
                     cycles=fit.cycles, residuals=tuple(fit.residuals[:3]))
    return Pulse(ion, theta, phi, rabi, theta / rabi)


def _slot(pulses, t_m, label) -> PulseSlot:
    return PulseSlot(tuple(pulses), t_m, label)


def composite_z_rotation(ion: int, sense: int = +1, *,
                         t_m: float = T_M_DEFAULT, rabi: float = RABI_DEFAULT,
                         frame: str = INTERACTION, couplings: CouplingSet | None = None,
                         tolerance: float = 1e-3, commensurate: bool = False,
                         ) -> PulseSchedule:
    """Three-pulse composite equal to exp(+i pi/4 sigma_z) (sense=+1) or its inverse.

    Applied order: U(7 pi/2, s pi/2), U(pi/2, 0), U(pi/2, s pi/2) with
    s = sense. The product has no leftover global phase.
    """
    if sense not in (+1, -1):
        raise ValueError("sense must be +1 or -1")
    tag = f"z{'+' if sense > 0 else '-'}45 ion{ion}"
    mk = lambda th, ph: _make_pulse(ion, th, ph, rabi, frame, couplings, tolerance,
                                    commensurate)
    items = (
        _slot([mk(3.5 * np.pi, sense * np.pi / 2)], t_m, tag),
        _slot([mk(0.5 * np.pi, 0.0)], t_m, tag),
        _slot([mk(0.5 * np.pi, sense * np.pi / 2)], t_m, tag),
    )
    return PulseSchedule(items, frame)


def refocused_zz(couplings: CouplingSet, frame: str = INTERACTION,
                 pair: tuple[int, int] = (2, 3), *,
                 t_m: float = T_M_DEFAULT, rabi: float = RABI_DEFAULT,
                 tolerance: float = 1e-3, commensurate: bool = False) -> PulseSchedule:
    """Schedule for exp(-i pi/4 sigma_z_i sigma_z_j) on an adjacent pair.

    Four free quarters of t = 7 pi / (2 J), interleaved with pi pulses: the
    spectator ion is flipped after quarters 1 and 3, the pair ions together
    after quarters 2 and 4. Every sigma_z and every other sigma_z sigma_z
    term then averages to zero over the four quarters -- including the w_i
    terms, so the identity holds in the lab frame too -- while the pair
    coupling survives with full weight t.
    """
    i, j = pair
    if {i, j} not in ({1, 2}, {2, 3}):
        raise ValueError("refocused pair must be adjacent ions (1,2) or (2,3)")
    if couplings.J <= 0.0:
        raise ValueError("refocusing requires a positive nearest-neighbor coupling")
    spectator = ({1, 2, 3} - {i, j}).pop()
    t = 7.0 * np.pi / (2.0 * couplings.J)
    mk = lambda ion: _make_pulse(ion, np.pi, 0.0, rabi, frame, couplings, tolerance,
                                 commensurate)
    quarter = FreeEvolution(t / 4.0, "zz quarter")
    items = (
        quarter,
        _slot([mk(spectator)], t_m, f"pi ion{spectator}"),
        quarter,
        _slot([mk(i), mk(j)], t_m, f"pi ion{i}+ion{j}"),
        quarter,
        _slot([mk(spectator)], t_m, f"pi ion{spectator}"),
        quarter,
        _slot([mk(i), mk(j)], t_m, f"pi ion{i}+ion{j}"),
    )
    return PulseSchedule(items, frame)


def build_cnot(control: int, target: int, couplings: CouplingSet,
               t_m: float = T_M_DEFAULT, frame: str = INTERACTION, *,
               rabi: float = RABI_DEFAULT, tolerance: float = 1e-3,
               commensurate: bool = False) -> PulseSchedule:
    """Six-factor CNOT schedule on an adjacent (control, target) pair.

    Composition, in application order:

        e^{+i pi/4 sy_t} . e^{-i pi/4 sz_c sz_t} . e^{-i pi/4 sz_t}
                         . e^{+i pi/4 sz_c} . e^{-i pi/4 sy_t}

    With sigma_z |1> = +|1>, the target quarter-turn must be the -pi/4 sense:
    the +pi/4 sense makes the product a zero-controlled NOT (flips the
    target when the control is |0>) instead of the canonical gate.
    """
    if {control, target} not in ({1, 2}, {2, 3}):
        raise ValueError("CNOT needs an adjacent pair coupled by J")
    if couplings.J <= 0.0:
        raise ValueError("CNOT requires a positive nearest-neighbor coupling")
    mk = lambda th, ph: _make_pulse(target, th, ph, rabi, frame, couplings, tolerance,
                                    commensurate)
    opening = PulseSchedule(
        (_slot([mk(0.5 * np.pi, 0.5 * np.pi)], t_m, f"y+90 ion{target}"),), frame)
    closing = PulseSchedule(
        (_slot([mk(3.5 * np.pi, 0.5 * np.pi)], t_m, f"y-90 ion{target}"),), frame)
    zz = refocused_zz(couplings, frame, (min(control, target), max(control, target)),
                      t_m=t_m, rabi=rabi, tolerance=tolerance, commensurate=commensurate)
    z_target = composite_z_rotation(target, -1, t_m=t_m, rabi=rabi, frame=frame,
                                    couplings=couplings, tolerance=tolerance,
                                    commensurate=commensurate)
    z_control = composite_z_rotation(control, +1, t_m=t_m, rabi=rabi, frame=frame,
                                     couplings=couplings, tolerance=tolerance,
                                     commensurate=commensurate)
    return opening + zz + z_target + z_control + closing


def hadamard_schedule(ion: int, *, t_m: float = T_M_DEFAULT, rabi: float = RABI_DEFAULT,
                      frame: str = INTERACTION, couplings: CouplingSet | None = None,
                      tolerance: float = 1e-3, commensurate: bool = False,
                      ) -> PulseSchedule:
    """Hadamard from the pulse alphabet: two +45 z composites, then U(pi/2, pi/2).

    Equals the |0> -> (|0>+|1>)/sqrt2, |1> -> (|0>-|1>)/sqrt2 map up to a
    global phase of -i.
    """
    half = composite_z_rotation(ion, +1, t_m=t_m, rabi=rabi, frame=frame,
                                couplings=couplings, tolerance=tolerance,
                                commensurate=commensurate)
    mk = lambda th, ph: _make_pulse(ion, th, ph, rabi, frame, couplings, tolerance,
                                    commensurate)
    y = PulseSchedule((_slot([mk(0.5 * np.pi, 0.5 * np.pi)], t_m, f"y+90 ion{ion}"),), frame)
    return half + half + y


# -- applying schedules -----------------------------------------------------

def slot_unitary(slot: PulseSlot) -> np.ndarray:
    U = np.eye(8, dtype=complex)
    for pulse in slot.pulses:
        U = single_qubit_rotation(pulse.ion, pulse.theta, pulse.phi) @ U
    return U


def segment_unitary(item, couplings: CouplingSet, frame: str) -> np.ndarray:
    if isinstance(item, FreeEvolution):
        return free_evolution(couplings, item.duration, frame)
    return slot_unitary(item)


def schedule_unitary(schedule: PulseSchedule, couplings: CouplingSet) -> np.ndarray:
    """Composed 8x8 unitary of the whole schedule (ideal segment model)."""
    U = np.eye(8, dtype=complex)
    for item in schedule.items:
        U = segment_unitary(item, couplings, schedule.frame) @ U
    return U


def apply_schedule(state: SpinState, schedule: PulseSchedule,
                   couplings: CouplingSet) -> SpinState:
    """Left-multiply the state by each segment's ideal unitary in order."""
    if state.frame != schedule.frame:
        raise ValueError(
            f"frame mismatch: state is {state.frame!r}, schedule is {schedule.frame!r}")
    amps = state.amplitudes
    for item in schedule.items:
        amps = segment_unitary(item, couplings, schedule.frame) @ amps
    return SpinState(amps, state.frame)


# -- wire format -------------------------------------------------------------

def serialize_schedule(schedule: PulseSchedule) -> str:
    """Line format: ``PULSE ion theta phi rabi T`` or ``FREE T``.

    Durations carry 15 significant digits. Simultaneous pulses of one slot
    appear on consecutive lines; the flat file keeps per-pulse lengths, not
    slot bookkeeping.
    """
    lines = [f"# frame={schedule.frame}"]
    for item in schedule.items:
        if isinstance(item, FreeEvolution):
            lines.append(f"FREE {item.duration:.15g}")
        else:
            for p in item.pulses:
                lines.append(
                    f"PULSE {p.ion} {p.theta:.15g} {p.phi:.15g} {p.rabi:.15g} "
                    f"{p.duration:.15g}")
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> PulseSchedule:
    """Inverse of `serialize_schedule`; parsed pulses become single-pulse slots."""
    frame = INTERACTION
    items: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("#") else ""
        if raw.lstrip().startswith("# frame="):
            frame = raw.split("=", 1)[1].strip()
            continue
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0] == "FREE" and len(fields) == 2:
                items.append(FreeEvolution(float(fields[1])))
            elif fields[0] == "PULSE" and len(fields) == 6:
                ion = int(fields[1])
                theta, phi, rabi, dur = map(float, fields[2:])
                items.append(PulseSlot((Pulse(ion, theta, phi, rabi, dur),), dur))
            else:
                raise ValueError("unrecognized segment")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"schedule line {lineno}: {exc}") from exc
    return PulseSchedule(tuple(items), frame)
