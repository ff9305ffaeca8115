from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.polynomial.legendre import leggauss

from .analytic import ProbabilityTable
from .dynamics import IntegratorConfig, Method, Propagator, evolve_series
from .errors import ProbabilityError
from .hilbert import (
    AtomLevel,
    HilbertBasis,
    StateVector,
    enumerate_basis,
    initial_state,
    product_state,
)
from .model import Coupling, Hamiltonian, QubitState, build_hamiltonian, primed_bias

logger = logging.getLogger(__name__)

VACUUM_TOL = 1e-10
PHOTON_CAP = 4
DEFAULT_PHASE_GRID = 4
DEFAULT_BLOCH_GRID = (16, 16)

Photons = tuple[int, int]


@dataclass(frozen=True)
class PhotonStats:
    table: ProbabilityTable
    n_right: float
    n_all: float


@dataclass(frozen=True)
class BlochPoint:
    chi: float
    phi: float

    @property
    def qubit(self) -> QubitState:
        return QubitState.from_bloch(self.chi, self.phi)


def sector_projector(basis: HilbertBasis) -> tuple[list[Photons], np.ndarray]:
    """0/1 matrix summing |amplitude|^2 over atomic configurations per (n1, n2)."""
    keys = basis.photon_sectors()
    position = {key: i for i, key in enumerate(keys)}
    projector = np.zeros((len(keys), len(basis)))
    for column, state in enumerate(basis.states):
        projector[position[state.photons], column] = 1.0
    return keys, projector


def photon_probabilities(psi: StateVector) -> ProbabilityTable:
    keys, projector = sector_projector(psi.basis)
    values = projector @ (np.abs(psi.amplitudes) ** 2)
    return ProbabilityTable(dict(zip(keys, map(float, values))))


def _fidelity_weights(keys: Sequence[Photons]) -> np.ndarray:
    return np.array([k / (k + l) if k + l > 0 else 0.0 for k, l in keys])


def _check_vacuum(p00) -> None:
    if np.any(np.asarray(p00) > VACUUM_TOL):
        raise ProbabilityError(
            f"p(0,0) = {np.max(p00)} is non-zero; excitation accounting is broken"
        )


def fidelity(table: ProbabilityTable) -> float:
    _check_vacuum(table.get(0, 0))
    keys = sorted(table.entries)
    return float(_fidelity_weights(keys) @ np.array([table.get(*key) for key in keys]))


def fidelity_two_atom(table: ProbabilityTable) -> float:
    return 1 - (
        table.get(2, 1) / 3
        + 2 * table.get(1, 2) / 3
        + table.get(1, 1) / 2
        + table.get(0, 1)
        + table.get(0, 2)
    )


def mean_photons(table: ProbabilityTable) -> tuple[float, float]:
    n_right = sum(k * p for (k, l), p in sorted(table.entries.items()))
    n_all = sum((k + l) * p for (k, l), p in sorted(table.entries.items()))
    return (float(n_right), float(n_all))


def photon_stats(table: ProbabilityTable) -> PhotonStats:
    return PhotonStats(table, *mean_photons(table))


class TableSeries:
    """Probability tables along a tau grid, stored as a (len(taus), sectors) array."""

    def __init__(
        self, taus: np.ndarray, keys: Sequence[Photons], probabilities: np.ndarray
    ) -> None:
        self.taus = np.asarray(taus, dtype=float)
        self.keys = list(keys)
        self.probabilities = np.asarray(probabilities, dtype=float)
        if self.probabilities.shape != (len(self.taus), len(self.keys)):
            raise ProbabilityError(
                f"Mismatch between probabilities {self.probabilities.shape} "
                f"and {len(self.taus)} taus x {len(self.keys)} sectors"
            )

    def __len__(self) -> int:
        return len(self.taus)

    def entry(self, k: int, l: int) -> np.ndarray:
        if (k, l) not in self.keys:
            return np.zeros(len(self.taus))
        return self.probabilities[:, self.keys.index((k, l))]

    def table(self, i: int) -> ProbabilityTable:
        return ProbabilityTable(dict(zip(self.keys, map(float, self.probabilities[i]))))

    def tables(self) -> list[ProbabilityTable]:
        return [self.table(i) for i in range(len(self.taus))]

    def total(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    def fidelity(self) -> np.ndarray:
        _check_vacuum(self.entry(0, 0))
        return self.probabilities @ _fidelity_weights(self.keys)

    def mean_photons(self) -> tuple[np.ndarray, np.ndarray]:
        right = np.array([k for k, _ in self.keys], dtype=float)
        every = np.array([k + l for k, l in self.keys], dtype=float)
        return (self.probabilities @ right, self.probabilities @ every)

    @classmethod
    def average(
        cls, series: Sequence[TableSeries], weights: Sequence[float]
    ) -> TableSeries:
        first = series[0]
        total = np.zeros_like(first.probabilities)
        for item, weight in zip(series, weights):
            if item.keys != first.keys:
                raise ProbabilityError("Cannot average series over different sectors")
            total += weight * item.probabilities
        return cls(first.taus, first.keys, total)


def _weighted_mean(values: Sequence[Any], weights: Sequence[float]) -> Any:
    first = values[0]
    if isinstance(first, ProbabilityTable):
        return ProbabilityTable.average(values, weights)
    if isinstance(first, TableSeries):
        return TableSeries.average(values, weights)
    total = None
    for value, weight in zip(values, weights):
        term = weight * value
        total = term if total is None else total + term
    return total


def _evaluate(f: Callable, nodes: Sequence, executor: Executor | None) -> list:
    # executor.map keeps node order, so the reduction order stays fixed
    if executor is None:
        return [f(node) for node in nodes]
    return list(executor.map(f, nodes))


def phase_average(
    f: Callable[[tuple[float, ...]], Any],
    n_angles: int,
    grid_m: int = DEFAULT_PHASE_GRID,
    executor: Executor | None = None,
) -> Any:
    """Uniform product-grid average over theta_mu = 2 pi j / M for every angle."""
    if grid_m < 2:
        raise ValueError(f"Phase grid needs at least 2 points, got {grid_m}")
    angles = [2 * math.pi * j / grid_m for j in range(grid_m)]
    nodes = list(itertools.product(angles, repeat=n_angles))
    values = _evaluate(f, nodes, executor)
    return _weighted_mean(values, [1 / len(nodes)] * len(nodes))


def bloch_nodes(quad_chi: int, quad_phi: int) -> list[tuple[BlochPoint, float]]:
    """Gauss-Legendre in cos(chi) times a uniform phi grid; weights sum to 1."""
    if quad_chi < 4 or quad_phi < 4:
        raise ValueError(
            f"Bloch quadrature orders must be at least 4, got {quad_chi}x{quad_phi}"
        )
    cosines, weights = leggauss(quad_chi)
    nodes = []
    for cosine, weight in zip(cosines, weights):
        chi = math.acos(cosine)
        for j in range(quad_phi):
            nodes.append((BlochPoint(chi, 2 * math.pi * j / quad_phi), weight / (2 * quad_phi)))
    return nodes


def bloch_average(
    f: Callable[[QubitState], Any],
    quad_chi: int = DEFAULT_BLOCH_GRID[0],
    quad_phi: int = DEFAULT_BLOCH_GRID[1],
    executor: Executor | None = None,
) -> Any:
    """(1/4pi) integral of f over the input-qubit sphere."""
    nodes = bloch_nodes(quad_chi, quad_phi)
    values = _evaluate(f, [point.qubit for point, _ in nodes], executor)
    return _weighted_mean(values, [weight for _, weight in nodes])


def mode_transform(n_photons: int, q: QubitState) -> np.ndarray:
    """E[l, j]: amplitude of |n-j, j>_a in |n-l, l>_b."""
    alpha, beta = q.alpha, q.beta
    b1 = (alpha, beta)
    b2 = (-beta.conjugate(), alpha.conjugate())
    matrix = np.zeros((n_photons + 1, n_photons + 1), dtype=np.complex128)
    for l in range(n_photons + 1):
        k = n_photons - l
        norm = math.sqrt(math.factorial(k) * math.factorial(l))
        for r in range(k + 1):
            for s in range(l + 1):
                coefficient = (
                    math.comb(k, r) * b1[0] ** (k - r) * b1[1] ** r
                    * math.comb(l, s) * b2[0] ** (l - s) * b2[1] ** s
                )
                i, j = (k - r) + (l - s), r + s
                matrix[l, j] += coefficient * math.sqrt(math.factorial(i) * math.factorial(j)) / norm
    return matrix


def convert_fock_basis(
    amps: Mapping[Photons, complex], q: QubitState, photon_cap: int = PHOTON_CAP
) -> dict[Photons, complex]:
    """Two-mode Fock amplitudes in the a-modes re-expressed in the b-modes."""
    sectors: dict[int, np.ndarray] = {}
    for (n1, n2), amplitude in amps.items():
        n = n1 + n2
        if n > photon_cap:
            raise ProbabilityError(f"{n} photons exceed the cap of {photon_cap}")
        sectors.setdefault(n, np.zeros(n + 1, dtype=np.complex128))[n2] += amplitude

    converted = {}
    for n in sorted(sectors, reverse=True):
        b_amplitudes = mode_transform(n, q).conj() @ sectors[n]
        for l, amplitude in enumerate(b_amplitudes):
            converted[(n - l, l)] = complex(amplitude)
    return converted


def _b_mode_probabilities(
    basis: HilbertBasis, amplitudes: np.ndarray, q: QubitState
) -> np.ndarray:
    """a-mode amplitudes (..., len(basis)) to b-mode sector probabilities (..., sectors)."""
    keys = basis.photon_sectors()
    position = {key: i for i, key in enumerate(keys)}
    probabilities = np.zeros(amplitudes.shape[:-1] + (len(keys),))
    blocks: dict[tuple[AtomLevel, ...], list[int]] = {}
    for i, state in enumerate(basis.states):
        blocks.setdefault(state.atoms, []).append(i)
    for indices in blocks.values():
        # a block lists one atomic configuration with n1 descending
        n = len(indices) - 1
        b_amplitudes = amplitudes[..., indices] @ mode_transform(n, q).conj().T
        for l in range(n + 1):
            probabilities[..., position[(n - l, l)]] += np.abs(b_amplitudes[..., l]) ** 2
    return probabilities


def lab_initial_state(basis: HilbertBasis, q: QubitState, phases) -> StateVector:
    half = 1 / math.sqrt(2)
    atoms = [
        {AtomLevel.EXCITED_ONE: half, AtomLevel.EXCITED_TWO: half * np.exp(1j * theta)}
        for theta in phases
    ]
    return product_state(basis, atoms, {(1, 0): q.alpha, (0, 1): q.beta})


def lab_frame_series(
    q: QubitState,
    taus: Sequence[float],
    n_atoms: int = 1,
    grid_m: int = DEFAULT_PHASE_GRID,
) -> TableSeries:
    """Theta-averaged b-mode tables of the unbiased cloner simulated in the lab frame.

    Atoms start in (|e1> + e^{i theta}|e2>)/sqrt(2) and the photon in
    alpha|1,0> + beta|0,1>; the readout converts a-mode photons to b-modes.
    """
    taus = np.asarray(taus, dtype=float)
    basis = enumerate_basis(n_atoms, n_atoms + 1)
    propagator = Propagator.from_hamiltonian(build_hamiltonian(basis))

    def probabilities(phases: tuple[float, ...]) -> np.ndarray:
        psi0 = lab_initial_state(basis, q, phases)
        amplitudes = propagator.propagate_many(psi0.amplitudes[:, None], taus)[:, :, 0]
        return _b_mode_probabilities(basis, amplitudes, q)

    averaged = phase_average(probabilities, n_atoms, grid_m)
    return TableSeries(taus, basis.photon_sectors(), averaged)


def lab_frame_table(q: QubitState, theta: float, tau: float) -> ProbabilityTable:
    """Single-atom, single-phase version of ``lab_frame_series``."""
    basis = enumerate_basis(1, 2)
    psi0 = lab_initial_state(basis, q, (theta,))
    psi = Propagator.from_hamiltonian(build_hamiltonian(basis)).propagate(psi0, tau)
    probabilities = _b_mode_probabilities(basis, psi.amplitudes, q)
    return ProbabilityTable(dict(zip(basis.photon_sectors(), map(float, probabilities))))


def theta_averaged_series(
    hamiltonian: Hamiltonian,
    taus: Sequence[float],
    grid_m: int = DEFAULT_PHASE_GRID,
    method: Method | str = Method.SPECTRAL,
    cfg: IntegratorConfig | None = None,
    executor: Executor | None = None,
) -> TableSeries:
    basis = hamiltonian.basis
    taus = np.asarray(taus, dtype=float)
    keys, projector = sector_projector(basis)
    method = Method(method)
    propagator = (
        Propagator.from_hamiltonian(hamiltonian) if method is Method.SPECTRAL else None
    )

    def probabilities(phases: tuple[float, ...]) -> np.ndarray:
        psi0 = initial_state(basis, phases)
        if propagator is not None:
            amplitudes = propagator.propagate_many(psi0.amplitudes[:, None], taus)[:, :, 0]
        else:
            states = evolve_series(hamiltonian, psi0, taus, Method.RK5, cfg)
            amplitudes = np.array([state.amplitudes for state in states])
        return (np.abs(amplitudes) ** 2) @ projector.T

    averaged = phase_average(probabilities, basis.n_atoms, grid_m, executor)
    return TableSeries(taus, keys, averaged)


def simulate(
    n_atoms: int,
    bias_primed: Coupling,
    taus: Sequence[float],
    grid_m: int = DEFAULT_PHASE_GRID,
    method: Method | str = Method.SPECTRAL,
    cfg: IntegratorConfig | None = None,
    executor: Executor | None = None,
) -> TableSeries:
    """Theta-averaged tables for N atoms under the primed couplings (G'1, G'2)."""
    biased = any(coupling != 0 for coupling in bias_primed)
    basis = enumerate_basis(n_atoms, n_atoms + 1, include_metastable=biased)
    hamiltonian = build_hamiltonian(basis, bias_primed)
    return theta_averaged_series(hamiltonian, taus, grid_m, method, cfg, executor)


def fixed_bias_series(
    n_atoms: int,
    bias: Coupling,
    taus: Sequence[float],
    frame: str = "lab",
    grid_m: int = DEFAULT_PHASE_GRID,
    bloch_grid: tuple[int, int] = DEFAULT_BLOCH_GRID,
    method: Method | str = Method.SPECTRAL,
    cfg: IntegratorConfig | None = None,
    executor: Executor | None = None,
) -> TableSeries:
    """Tables averaged over every input qubit for one fixed cycling field.

    With ``frame="lab"`` the couplings (G1, G2) stay fixed and the primed
    values are recomputed per qubit; with ``frame="primed"`` the couplings
    are taken as (G'1, G'2) for every qubit.
    """
    if frame not in ("lab", "primed"):
        raise ValueError(f"Unknown bias frame {frame!r}")

    def one_qubit(q: QubitState) -> TableSeries:
        primed = primed_bias(q, bias) if frame == "lab" else bias
        return simulate(n_atoms, primed, taus, grid_m, method, cfg)

    logger.debug("Averaging over %dx%d qubits, bias %s (%s frame)", *bloch_grid, bias, frame)
    return bloch_average(one_qubit, *bloch_grid, executor=executor)


def theta_averaged_table(
    hamiltonian: Hamiltonian,
    tau: float,
    grid_m: int = DEFAULT_PHASE_GRID,
    method: Method | str = Method.SPECTRAL,
    cfg: IntegratorConfig | None = None,
) -> ProbabilityTable:
    return theta_averaged_series(hamiltonian, [tau], grid_m, method, cfg).table(0)


def bloch_average_fidelity(
    n_atoms: int, bias: Coupling, taus: Sequence[float], **options: Any
) -> tuple[TableSeries, np.ndarray]:
    """Averaged tables p(k,l) and the fidelity computed from them."""
    averaged = fixed_bias_series(n_atoms, bias, taus, **options)
    return averaged, averaged.fidelity()


def bloch_average_photons(
    n_atoms: int, bias: Coupling, taus: Sequence[float], **options: Any
) -> tuple[np.ndarray, np.ndarray]:
    return fixed_bias_series(n_atoms, bias, taus, **options).mean_photons()
