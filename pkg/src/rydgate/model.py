"""System definition: basis, drive pulses, Hamiltonian, collapse operators.

The Hilbert space is a two-level resonator mode (photon number 0 or 1)
times a four-level atom, flattened photon-major: flat index
``4 * photon + atom``. The atom levels are the two clock states and two
Rydberg states; the resonator couples the Rydberg pair while an external
drive couples the upper clock state to the first Rydberg state.

All frequencies are angular. In dimensionless mode g = 1 sets the unit;
physical inputs in hertz enter as 2*pi*f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from rydgate.numerics import Coefficient, DrivenHamiltonian

DIM = 8


class AtomLevel(IntEnum):
    """Atomic levels: clock pair, then the two Rydberg states."""

    ZERO = 0
    ONE = 1
    R1 = 2
    R2 = 3


_ATOM_LABELS = {
    AtomLevel.ZERO: "0a",
    AtomLevel.ONE: "1a",
    AtomLevel.R1: "r1",
    AtomLevel.R2: "r2",
}


@dataclass(frozen=True)
class BasisIndex:
    """One basis state: photon number (0 or 1) and atomic level."""

    photon: int
    atom: AtomLevel

    def __post_init__(self):
        if self.photon not in (0, 1):
            raise ValueError("photon number must be 0 or 1")
        object.__setattr__(self, "atom", AtomLevel(self.atom))

    @property
    def flat(self):
        return 4 * self.photon + int(self.atom)

    @classmethod
    def from_flat(cls, index):
        if not 0 <= index < DIM:
            raise ValueError(f"flat index out of range: {index}")
        return cls(photon=index // 4, atom=AtomLevel(index % 4))

    @property
    def label(self):
        return f"{self.photon}m{_ATOM_LABELS[AtomLevel(self.atom)]}"


STATE_LABELS = tuple(BasisIndex.from_flat(i).label for i in range(DIM))


def basis_state(index):
    """Unit vector for a BasisIndex or flat index."""
    flat = index.flat if isinstance(index, BasisIndex) else int(index)
    if not 0 <= flat < DIM:
        raise ValueError(f"flat index out of range: {flat}")
    vec = np.zeros(DIM, dtype=complex)
    vec[flat] = 1.0
    return vec


@dataclass(frozen=True)
class RectangularPulse:
    """Constant drive amplitude omega; the drive stays on for all t >= 0,
    so stretching the evaluation window models a timing error rather than
    a reshaped pulse."""

    omega: float

    def __post_init__(self):
        if self.omega < 0.0:
            raise ValueError("drive amplitude must be nonnegative")

    def envelope(self, t):
        return self.omega if np.isscalar(t) else np.full_like(np.asarray(t, float), self.omega)

    @property
    def peak(self):
        return self.omega

    def coefficient(self):
        return Coefficient(kind="const", amp=self.omega)


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian drive omega_m * exp(-((t - 2 tau)/tau)^2), centered at
    half its nominal 4 tau window."""

    omega_m: float
    tau: float

    def __post_init__(self):
        if self.omega_m < 0.0:
            raise ValueError("drive amplitude must be nonnegative")
        if not self.tau > 0.0:
            raise ValueError("pulse width must be positive")

    @classmethod
    def matched(cls, omega_m):
        """Width chosen so the pulse area over the nominal window is
        2*pi*erf(2), the soft-control analogue of a full drive cycle."""
        return cls(omega_m=omega_m, tau=gsc_tau(omega_m))

    def envelope(self, t):
        u = (np.asarray(t, dtype=float) - 2.0 * self.tau) / self.tau
        out = self.omega_m * np.exp(-u * u)
        return float(out) if np.isscalar(t) else out

    @property
    def peak(self):
        return self.omega_m

    def coefficient(self):
        return Coefficient(
            kind="gaussian", amp=self.omega_m, center=2.0 * self.tau, width=self.tau
        )


PulseShape = RectangularPulse | GaussianPulse


def gsc_tau(omega_m):
    """Width 2*sqrt(pi)/omega_m giving the matched Gaussian pulse area."""
    if not omega_m > 0.0:
        raise ValueError("peak amplitude must be positive")
    return 2.0 * math.sqrt(math.pi) / omega_m


def gate_time(pulse):
    """Nominal gate duration: one full cycle 2*pi/omega for a rectangular
    drive, the 4 tau window for a Gaussian one."""
    if isinstance(pulse, RectangularPulse):
        if not pulse.omega > 0.0:
            raise ValueError("gate time undefined for zero drive amplitude")
        return 2.0 * math.pi / pulse.omega
    if isinstance(pulse, GaussianPulse):
        return 4.0 * pulse.tau
    raise TypeError(f"not a pulse shape: {pulse!r}")


def magic_ratio(k):
    """k-th coupling-to-drive ratio sqrt(4k^2 - 1)/2 at which the
    resonator-coupled channel completes exactly k cycles in one drive
    cycle, making the ideal gate exact."""
    if not (isinstance(k, int) and k >= 1):
        raise ValueError("k must be a positive integer")
    return math.sqrt(4.0 * k * k - 1.0) / 2.0


@dataclass(frozen=True)
class SystemParams:
    """Static system parameters.

    g : resonator coupling between the Rydberg pair (angular units)
    delta2 : Stark detuning of the second Rydberg level
    polar_ratio : polarizability ratio fixing delta1 = delta2 / polar_ratio
    gamma1, gamma2 : Rydberg decay rates into the upper clock state
    kappa : resonator photon loss rate
    """

    g: float
    delta2: float = 0.0
    polar_ratio: float = 22.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not self.g > 0.0:
            raise ValueError("coupling g must be positive")
        if not self.polar_ratio > 0.0:
            raise ValueError("polarizability ratio must be positive")
        for name in ("gamma1", "gamma2", "kappa"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"decay rate {name} must be nonnegative")

    @property
    def delta1(self):
        return self.delta2 / self.polar_ratio


def _atom_op(row, col):
    m = np.zeros((4, 4), dtype=complex)
    m[row, col] = 1.0
    return m


def _mode_lowering():
    a = np.zeros((2, 2), dtype=complex)
    a[0, 1] = 1.0
    return a


def _static_part(params):
    a = _mode_lowering()
    coupling = params.g * (
        np.kron(a, _atom_op(AtomLevel.R2, AtomLevel.R1))
        + np.kron(a.conj().T, _atom_op(AtomLevel.R1, AtomLevel.R2))
    )
    detuning = np.kron(
        np.eye(2, dtype=complex),
        params.delta1 * _atom_op(AtomLevel.R1, AtomLevel.R1)
        + params.delta2 * _atom_op(AtomLevel.R2, AtomLevel.R2),
    )
    return coupling + detuning


def _drive_part():
    flip = _atom_op(AtomLevel.ONE, AtomLevel.R1)
    return 0.5 * np.kron(np.eye(2, dtype=complex), flip + flip.conj().T)


def split_hamiltonian(params, pulse):
    """The Hamiltonian as static part plus envelope(t) times drive part."""
    return DrivenHamiltonian(
        static=_static_part(params), drive=_drive_part(), coeff=pulse.coefficient()
    )


def hamiltonian(params, pulse, t):
    """Full 8x8 Hamiltonian matrix at time t."""
    return _static_part(params) + pulse.envelope(t) * _drive_part()


def collapse_operators(params):
    """Jump operators with rates folded in as square roots; zero-rate
    channels are omitted. Order: Rydberg-1 decay, Rydberg-2 decay,
    photon loss."""
    ops = []
    eye2 = np.eye(2, dtype=complex)
    if params.gamma1 > 0.0:
        ops.append(
            math.sqrt(params.gamma1)
            * np.kron(eye2, _atom_op(AtomLevel.ONE, AtomLevel.R1))
        )
    if params.gamma2 > 0.0:
        ops.append(
            math.sqrt(params.gamma2)
            * np.kron(eye2, _atom_op(AtomLevel.ONE, AtomLevel.R2))
        )
    if params.kappa > 0.0:
        ops.append(
            math.sqrt(params.kappa) * np.kron(_mode_lowering(), np.eye(4, dtype=complex))
        )
    return ops
