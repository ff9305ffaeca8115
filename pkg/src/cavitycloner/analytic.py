"""Closed-form single-atom solutions.

These are the reference values the numerical engine in ``dynamics`` is
checked against. Times are the dimensionless ``tau = g t``; every function
accepts a scalar or a numpy array of times.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateBiasError
from .hilbert import AtomLevel, BasisState, HilbertBasis, StateVector
from .model import QubitState

SQRT2 = math.sqrt(2)
DEGENERATE_BIAS = 1e-8

G, E1, E2, F = (
    AtomLevel.GROUND,
    AtomLevel.EXCITED_ONE,
    AtomLevel.EXCITED_TWO,
    AtomLevel.METASTABLE,
)

# single atom, no cycling field, lab levels and a-mode photons
UNBIASED_STATES = (
    BasisState((E1,), (1, 0)),
    BasisState((G,), (2, 0)),
    BasisState((E2,), (1, 0)),
    BasisState((E1,), (0, 1)),
    BasisState((G,), (1, 1)),
    BasisState((G,), (0, 2)),
    BasisState((E2,), (0, 1)),
)

# single atom with G'1 = 0, primed levels and b-mode photons
BIASED_STATES = (
    BasisState((E1,), (1, 0)),
    BasisState((E2,), (1, 0)),
    BasisState((F,), (1, 0)),
    BasisState((G,), (1, 1)),
    BasisState((G,), (2, 0)),
    BasisState((E1,), (0, 1)),
)

Photons = tuple[int, int]


@dataclass(frozen=True)
class ProbabilityTable:
    """p(k, l): k photons in the clone mode b1, l in the orthogonal mode b2."""

    entries: Mapping[Photons, float] = field(default_factory=dict)

    def get(self, k: int, l: int) -> float:
        return float(self.entries.get((k, l), 0.0))

    def total(self) -> float:
        return float(sum(self.entries[key] for key in sorted(self.entries)))

    def as_dict(self) -> dict[Photons, float]:
        return {key: float(self.entries[key]) for key in sorted(self.entries)}

    def approximately_equals(self, other: object, tolerance: float = 1e-9) -> bool:
        if isinstance(other, ProbabilityTable):
            keys = set(self.entries) | set(other.entries)
            return all(
                math.isclose(self.get(*key), other.get(*key), abs_tol=tolerance)
                for key in keys
            )
        return False

    @classmethod
    def average(
        cls, tables: Sequence[ProbabilityTable], weights: Iterable[float] | None = None
    ) -> ProbabilityTable:
        tables = list(tables)
        if weights is None:
            weights = [1 / len(tables)] * len(tables)
        weights = list(weights)
        keys = sorted({key for table in tables for key in table.entries})
        entries = {}
        for key in keys:
            total = 0.0
            for table, weight in zip(tables, weights):
                total += weight * table.get(*key)
            entries[key] = total
        return cls(entries)


@dataclass(frozen=True)
class RabiPair:
    omega1: float
    omega2: float
    big_a: complex
    big_b: complex


def to_state_vector(
    basis: HilbertBasis, states: Sequence[BasisState], amplitudes: Sequence[complex]
) -> StateVector:
    """Place closed-form amplitudes into a numerical basis (missing states get 0)."""
    vector = np.zeros(len(basis), dtype=np.complex128)
    for state, amplitude in zip(states, amplitudes):
        vector[basis.position(state)] = amplitude
    return StateVector(basis, vector)


def amplitudes_unbiased(q: QubitState, theta: float, tau) -> np.ndarray:
    """The seven amplitudes of ``UNBIASED_STATES`` (lab frame, a-mode photons)."""
    alpha, beta = q.alpha, q.beta
    phase = np.exp(1j * theta)
    cos = np.cos(SQRT2 * np.asarray(tau, dtype=float))
    sin = np.sin(SQRT2 * np.asarray(tau, dtype=float))
    plus = beta + alpha * phase
    return np.stack(
        [
            alpha / SQRT2 * cos + 0j,
            -1j * alpha / SQRT2 * sin,
            ((alpha * phase - beta) + plus * cos) / (2 * SQRT2),
            ((beta - alpha * phase) + plus * cos) / (2 * SQRT2),
            -0.5j * plus * sin,
            -1j * beta / SQRT2 * phase * sin,
            beta / SQRT2 * phase * cos + 0j,
        ]
    )


def theta_avg_probs_unbiased(tau: float) -> ProbabilityTable:
    cos = math.cos(SQRT2 * tau)
    sin2 = math.sin(SQRT2 * tau) ** 2
    return ProbabilityTable(
        {
            (2, 0): 0.5 * sin2,
            (1, 1): 0.25 * sin2,
            (0, 1): cos**2 / 8 - cos / 4 + 1 / 8,
            (1, 0): 5 * cos**2 / 8 + cos / 4 + 1 / 8,
        }
    )


def fidelity_unbiased(tau):
    return 0.75 + 0.25 * np.cos(SQRT2 * np.asarray(tau, dtype=float))


def mean_photons_unbiased(tau: float) -> tuple[float, float]:
    table = theta_avg_probs_unbiased(tau)
    p20, p11, p10, p01 = (table.get(*k) for k in ((2, 0), (1, 1), (1, 0), (0, 1)))
    return (2 * p20 + p11 + p10, 2 * p20 + 2 * p11 + p01 + p10)


def rabi_pair(g2p: float, theta: float = 0.0) -> RabiPair:
    if abs(g2p) <= DEGENERATE_BIAS:
        raise DegenerateBiasError(
            f"G'2 = {g2p} is below {DEGENERATE_BIAS}; use the unbiased solution"
        )
    root = math.sqrt(g2p**4 + 4)
    omega1 = math.sqrt(g2p**2 + 2 + root)
    # Omega1 * Omega2 = 2|G'2| avoids the cancellation in G'^2 + 2 - root
    omega2 = 2 * abs(g2p) / omega1
    phase = complex(math.cos(theta), math.sin(theta))
    big_a = 0.5j * phase * (omega2**2 - 2 * g2p**2 - 4) / (omega1 * root)
    big_b = -0.5j * phase * (omega1**2 - 2 * g2p**2 - 4) / (omega2 * root)
    return RabiPair(omega1, omega2, big_a, big_b)


def amplitudes_biased(g2p: float, theta: float, tau) -> np.ndarray:
    """The six amplitudes of ``BIASED_STATES`` for matched bias (G'1 = 0)."""
    pair = rabi_pair(g2p, theta)
    o1, o2, a, b = pair.omega1, pair.omega2, pair.big_a, pair.big_b
    tau = np.asarray(tau, dtype=float)
    w1 = o1 / SQRT2 * tau
    w2 = o2 / SQRT2 * tau
    g2 = g2p**2

    e1_10 = np.cos(SQRT2 * tau) / SQRT2 + 0j
    e2_10 = (1j / (2 * SQRT2 * g2)) * (
        o1 * (o1**2 - 4) * a * np.cos(w1) + o2 * (o2**2 - 4) * b * np.cos(w2)
    )
    f_10 = (1 / (2 * g2p)) * (
        (o1**2 - 4) * a * np.sin(w1) + (o2**2 - 4) * b * np.sin(w2)
    )
    g_11 = a * np.sin(w1) + b * np.sin(w2)
    g_20 = -1j / SQRT2 * np.sin(SQRT2 * tau)
    e1_01 = (-1j / (2 * SQRT2 * g2)) * (
        o1 * (o1**2 - 2 * g2 - 4) * a * np.cos(w1)
        + o2 * (o2**2 - 2 * g2 - 4) * b * np.cos(w2)
    )
    return np.stack([e1_10, e2_10, f_10, g_11, g_20, e1_01])


def _biased_probabilities(g2p: float, tau) -> dict[Photons, np.ndarray]:
    # every theta-dependent amplitude carries the same overall e^{i theta}
    e1_10, e2_10, f_10, g_11, g_20, e1_01 = np.abs(amplitudes_biased(g2p, 0.0, tau)) ** 2
    return {
        (2, 0): g_20,
        (1, 1): g_11,
        (1, 0): f_10 + e2_10 + e1_10,
        (0, 1): e1_01,
    }


def theta_avg_probs_biased(g2p: float, tau: float) -> ProbabilityTable:
    probabilities = _biased_probabilities(g2p, tau)
    return ProbabilityTable({key: float(value) for key, value in probabilities.items()})


def fidelity_biased(g2p: float, tau):
    probabilities = _biased_probabilities(g2p, tau)
    return 1 - (probabilities[(0, 1)] + 0.5 * probabilities[(1, 1)])


def reference_fidelity(g2p: float, tau):
    """Closed-form single-atom fidelity for matched bias G'2, any strength."""
    if abs(g2p) <= DEGENERATE_BIAS:
        return fidelity_unbiased(tau)
    return fidelity_biased(g2p, tau)
