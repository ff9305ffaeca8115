from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BasisError, BiasError, QubitError
from .hilbert import AtomLevel, BasisState, HilbertBasis

logger = logging.getLogger(__name__)

QUBIT_TOL = 1e-12

Coupling = tuple[complex, complex]


@dataclass(frozen=True)
class QubitState:
    """Input photon alpha|1,0> + beta|0,1> in the a-modes."""

    alpha: complex = 1.0
    beta: complex = 0.0

    def __post_init__(self) -> None:
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not math.isclose(norm, 1.0, abs_tol=QUBIT_TOL):
            raise QubitError(
                f"Qubit ({self.alpha}, {self.beta}) is not normalized: |a|^2+|b|^2 = {norm}"
            )

    @classmethod
    def from_bloch(cls, chi: float, phi: float) -> QubitState:
        return cls(complex(math.cos(chi / 2)), math.sin(chi / 2) * cmath.exp(1j * phi))

    @classmethod
    def random(cls, rng: np.random.Generator) -> QubitState:
        vector = rng.normal(size=2) + 1j * rng.normal(size=2)
        vector /= np.linalg.norm(vector)
        return cls(complex(vector[0]), complex(vector[1]))


def orthogonal_mode(q: QubitState) -> Coupling:
    """a-mode coefficients of b2^dagger."""
    return (-q.beta.conjugate(), q.alpha.conjugate())


def primed_bias(q: QubitState, lab: Coupling) -> Coupling:
    g1, g2 = lab
    g1p = q.alpha.conjugate() * g1 + q.beta.conjugate() * g2
    g2p = -q.beta * g1 + q.alpha * g2
    return (complex(g1p), complex(g2p))


def universal_bias(q: QubitState, strength: float) -> Coupling:
    """Lab couplings whose primed image is (0, strength)."""
    if strength < 0:
        raise BiasError(f"Bias strength must be non-negative, got {strength}")
    return (-strength * q.beta.conjugate(), strength * q.alpha.conjugate())


@dataclass(frozen=True)
class BiasField:
    g1: complex
    g2: complex
    primed: Coupling = field(default=(0j, 0j))

    @classmethod
    def from_lab(cls, q: QubitState, g1: complex, g2: complex) -> BiasField:
        return cls(complex(g1), complex(g2), primed_bias(q, (g1, g2)))

    @classmethod
    def matched(cls, q: QubitState, strength: float) -> BiasField:
        g1, g2 = universal_bias(q, strength)
        return cls(g1, g2, primed_bias(q, (g1, g2)))

    @property
    def g1p(self) -> complex:
        return self.primed[0]

    @property
    def g2p(self) -> complex:
        return self.primed[1]


def primed_atomic_basis(q: QubitState) -> np.ndarray:
    """Rows are |e'1> and |e'2> expressed in the lab basis (|e1>, |e2>)."""
    return np.array(
        [[q.alpha, q.beta], [-q.beta.conjugate(), q.alpha.conjugate()]],
        dtype=np.complex128,
    )


def excited_projector(rows: np.ndarray) -> np.ndarray:
    """Sum of |v><v| over the row vectors."""
    return np.einsum("ki,kj->ij", rows, rows.conj())


class Hamiltonian:
    def __init__(self, basis: HilbertBasis, matrix: np.ndarray) -> None:
        if matrix.shape != (len(basis), len(basis)):
            raise BasisError(
                f"Mismatch between matrix shape {matrix.shape} and basis size {len(basis)}"
            )
        self.basis = basis
        self.matrix = matrix

    def element(self, bra: BasisState, ket: BasisState) -> complex:
        return complex(
            self.matrix[self.basis.position(bra), self.basis.position(ket)]
        )

    def max_hermitian_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.matrix))

    def __repr__(self) -> str:
        return f"Hamiltonian({self.basis!r}, nonzero={self.nonzero_count()})"


def build_hamiltonian(
    basis: HilbertBasis, bias_primed: Coupling = (0j, 0j)
) -> Hamiltonian:
    """Interaction Hamiltonian in units of g, written in the b-modes and primed levels."""
    g1p, g2p = bias_primed
    if not basis.include_metastable and (g1p != 0 or g2p != 0):
        raise BasisError(
            f"Bias ({g1p}, {g2p}) needs the metastable level, which {basis!r} excludes"
        )

    matrix = np.zeros((len(basis), len(basis)), dtype=np.complex128)
    # raising half only: |e'1><g| b1, |e'2><g| b2, G'_i |e'_i><f|
    for col, ket in enumerate(basis.states):
        n1, n2 = ket.photons
        for mu, level in enumerate(ket.atoms):
            if level is AtomLevel.GROUND:
                if n1 > 0:
                    bra = ket.with_atom(mu, AtomLevel.EXCITED_ONE, (n1 - 1, n2))
                    matrix[basis.index[bra], col] += math.sqrt(n1)
                if n2 > 0:
                    bra = ket.with_atom(mu, AtomLevel.EXCITED_TWO, (n1, n2 - 1))
                    matrix[basis.index[bra], col] += math.sqrt(n2)
            elif level is AtomLevel.METASTABLE:
                bra = ket.with_atom(mu, AtomLevel.EXCITED_ONE, ket.photons)
                matrix[basis.index[bra], col] += g1p
                bra = ket.with_atom(mu, AtomLevel.EXCITED_TWO, ket.photons)
                matrix[basis.index[bra], col] += g2p

    hamiltonian = Hamiltonian(basis, matrix + matrix.conj().T)
    logger.debug("Built %r with bias' = (%s, %s)", hamiltonian, g1p, g2p)
    return hamiltonian
