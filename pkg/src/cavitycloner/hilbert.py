from __future__ import annotations

import enum
import itertools
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import BasisError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-9

Photons = tuple[int, int]


class AtomLevel(enum.IntEnum):
    """Working (primed) atomic basis: |g>, |e'1>, |e'2>, |f>."""

    GROUND = 0
    EXCITED_ONE = 1
    EXCITED_TWO = 2
    METASTABLE = 3

    @property
    def excitation(self) -> int:
        return 0 if self is AtomLevel.GROUND else 1

    @property
    def symbol(self) -> str:
        return ("g", "e1'", "e2'", "f")[self.value]


@dataclass(frozen=True, order=False)
class BasisState:
    atoms: tuple[AtomLevel, ...]
    photons: Photons

    @property
    def excitation(self) -> int:
        return sum(self.photons) + sum(level.excitation for level in self.atoms)

    def with_atom(self, position: int, level: AtomLevel, photons: Photons) -> BasisState:
        atoms = self.atoms[:position] + (level,) + self.atoms[position + 1 :]
        return BasisState(atoms, photons)

    def label(self) -> str:
        levels = ",".join(level.symbol for level in self.atoms)
        return f"|{levels}; {self.photons[0]},{self.photons[1]}>"

    def __repr__(self) -> str:
        return f"BasisState{self.label()}"


class HilbertBasis:
    """Ordered basis of one excitation-number sector.

    States are ordered with the atom levels as the major key (in
    ``AtomLevel`` order, first atom most significant) and the b1 photon
    number descending as the minor key.
    """

    def __init__(
        self,
        n_atoms: int,
        excitation: int,
        include_metastable: bool,
        states: Sequence[BasisState],
    ) -> None:
        self.n_atoms = n_atoms
        self.excitation = excitation
        self.include_metastable = include_metastable
        self.states = tuple(states)
        self.index = {state: i for i, state in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise BasisError("Duplicate states in basis")

    def __len__(self) -> int:
        return len(self.states)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, HilbertBasis):
            return self.states == other.states
        return False

    def __hash__(self) -> int:
        return hash(self.states)

    def __repr__(self) -> str:
        return (
            f"HilbertBasis(n_atoms={self.n_atoms}, excitation={self.excitation}, "
            f"include_metastable={self.include_metastable}, size={len(self)})"
        )

    def position(self, state: BasisState) -> int:
        try:
            return self.index[state]
        except KeyError:
            raise BasisError(f"{state.label()} is not part of {self!r}") from None

    def photon_sectors(self) -> list[Photons]:
        """Distinct (n1, n2) pairs, most photons first, then n1 descending."""
        sectors = {state.photons for state in self.states}
        return sorted(sectors, key=lambda p: (p[0] + p[1], p[0]), reverse=True)


def enumerate_basis(
    n_atoms: int, excitation: int, include_metastable: bool = False
) -> HilbertBasis:
    if n_atoms < 1:
        raise BasisError(f"Need at least one atom, got {n_atoms}")
    if excitation < 0:
        raise BasisError(f"Excitation number must be non-negative, got {excitation}")

    levels = [AtomLevel.GROUND, AtomLevel.EXCITED_ONE, AtomLevel.EXCITED_TWO]
    if include_metastable:
        levels.append(AtomLevel.METASTABLE)

    states = []
    for atoms in itertools.product(levels, repeat=n_atoms):
        remaining = excitation - sum(level.excitation for level in atoms)
        if remaining < 0:
            continue
        for n1 in range(remaining, -1, -1):
            states.append(BasisState(atoms, (n1, remaining - n1)))

    basis = HilbertBasis(n_atoms, excitation, include_metastable, states)
    logger.debug("Enumerated %r", basis)
    return basis


class StateVector:
    def __init__(self, basis: HilbertBasis, amplitudes: np.ndarray) -> None:
        amplitudes = np.array(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (len(basis),):
            raise BasisError(
                f"Mismatch between {amplitudes.shape[0]} amplitudes and basis of size {len(basis)}"
            )
        amplitudes.flags.writeable = False
        self.basis = basis
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tolerance: float = NORM_TOL) -> bool:
        return math.isclose(self.norm(), 1.0, abs_tol=tolerance)

    def amplitude(self, state: BasisState) -> complex:
        return complex(self.amplitudes[self.basis.position(state)])

    def expectation(self, matrix: np.ndarray) -> complex:
        return complex(np.vdot(self.amplitudes, matrix @ self.amplitudes))

    def approximately_equals(self, other: object, tolerance: float = 1e-10) -> bool:
        if isinstance(other, StateVector):
            return self.basis == other.basis and bool(
                np.max(np.abs(self.amplitudes - other.amplitudes), initial=0.0)
                < tolerance
            )
        return False

    def __repr__(self) -> str:
        return f"StateVector(size={len(self.basis)}, norm={self.norm():.12g})"


def product_state(
    basis: HilbertBasis,
    atom_amplitudes: Sequence[Mapping[AtomLevel, complex]],
    photon_amplitudes: Mapping[Photons, complex],
) -> StateVector:
    """Expand a product of per-atom superpositions and a photon ket into ``basis``."""
    if len(atom_amplitudes) != basis.n_atoms:
        raise BasisError(
            f"Got {len(atom_amplitudes)} atomic states for {basis.n_atoms} atoms"
        )

    amplitudes = np.zeros(len(basis), dtype=np.complex128)
    factors = [list(atom.items()) for atom in atom_amplitudes]
    for combination in itertools.product(*factors):
        levels = tuple(level for level, _ in combination)
        atomic = complex(np.prod([amplitude for _, amplitude in combination]))
        for photons, photon_amplitude in photon_amplitudes.items():
            state = BasisState(levels, photons)
            if state not in basis.index:
                raise BasisError(
                    f"{state.label()} has excitation {state.excitation}, "
                    f"basis has excitation {basis.excitation}"
                )
            amplitudes[basis.index[state]] += atomic * photon_amplitude
    return StateVector(basis, amplitudes)


def initial_state(basis: HilbertBasis, phases: Sequence[float]) -> StateVector:
    """Every atom in (|e'1> + e^{i theta}|e'2>)/sqrt(2), one photon in mode b1."""
    if len(phases) != basis.n_atoms:
        raise BasisError(f"Got {len(phases)} phases for {basis.n_atoms} atoms")
    if basis.excitation != basis.n_atoms + 1:
        raise BasisError(
            f"Initial state has excitation {basis.n_atoms + 1}, "
            f"basis has excitation {basis.excitation}"
        )
    half = 1 / math.sqrt(2)
    atoms = [
        {AtomLevel.EXCITED_ONE: half, AtomLevel.EXCITED_TWO: half * np.exp(1j * theta)}
        for theta in phases
    ]
    return product_state(basis, atoms, {(1, 0): 1.0})
