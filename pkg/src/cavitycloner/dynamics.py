from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import PropagationError
from .hilbert import NORM_TOL, HilbertBasis, StateVector
from .model import Hamiltonian

logger = logging.getLogger(__name__)

DRIFT_WARNING = NORM_TOL


class Method(str, enum.Enum):
    SPECTRAL = "spectral"
    RK5 = "rk5"


@dataclass(frozen=True)
class IntegratorConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    initial_step: float = 1e-3
    max_step: float = 0.1

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise PropagationError(
                f"Tolerances must be positive, got abs={self.abs_tol}, rel={self.rel_tol}"
            )
        if self.initial_step <= 0 or self.max_step <= 0:
            raise PropagationError("Step sizes must be positive")


class Propagator:
    """Eigendecomposition H = V diag(lambda) V^dagger of a Hamiltonian."""

    def __init__(
        self, basis: HilbertBasis, eigenvalues: np.ndarray, eigenvectors: np.ndarray
    ) -> None:
        self.basis = basis
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors

    @classmethod
    def from_hamiltonian(cls, hamiltonian: Hamiltonian) -> Propagator:
        try:
            eigenvalues, eigenvectors = np.linalg.eigh(hamiltonian.matrix)
        except np.linalg.LinAlgError as error:
            raise PropagationError(f"Eigendecomposition failed: {error}") from error
        logger.debug(
            "Diagonalized %d states, spectrum [%.6g, %.6g]",
            len(eigenvalues),
            eigenvalues[0],
            eigenvalues[-1],
        )
        return cls(hamiltonian.basis, eigenvalues, eigenvectors)

    def reconstruction_error(self, hamiltonian: Hamiltonian) -> float:
        v = self.eigenvectors
        rebuilt = v @ np.diag(self.eigenvalues) @ v.conj().T
        return float(np.max(np.abs(rebuilt - hamiltonian.matrix)))

    def orthonormality_error(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.conj().T @ v - np.eye(len(self.eigenvalues)))))

    def propagate(self, psi0: StateVector, tau: float) -> StateVector:
        _check_basis(self.basis, psi0)
        v = self.eigenvectors
        phases = np.exp(-1j * self.eigenvalues * tau)
        return StateVector(self.basis, v @ (phases * (v.conj().T @ psi0.amplitudes)))

    def propagate_many(self, initial: np.ndarray, taus: np.ndarray) -> np.ndarray:
        """Columns of ``initial`` evolved to every tau: shape (len(taus), n, k)."""
        v = self.eigenvectors
        coefficients = v.conj().T @ initial
        phases = np.exp(-1j * np.outer(np.asarray(taus, dtype=float), self.eigenvalues))
        return np.einsum("ij,tj,jk->tik", v, phases, coefficients)


def _check_basis(basis: HilbertBasis, psi: StateVector) -> None:
    if psi.basis != basis:
        raise PropagationError("State and Hamiltonian live on different bases")


def norm_drift(psi: StateVector) -> float:
    return abs(psi.norm() - 1.0)


def spectral_propagate(
    hamiltonian: Hamiltonian, psi0: StateVector, tau: float
) -> StateVector:
    return Propagator.from_hamiltonian(hamiltonian).propagate(psi0, tau)


def rk5_propagate(
    hamiltonian: Hamiltonian,
    psi0: StateVector,
    tau: float,
    cfg: IntegratorConfig | None = None,
    start: float = 0.0,
) -> StateVector:
    """Integrate dc/dtau = -i H c with the Dormand-Prince 5(4) pair.

    The result is not renormalized; its norm drift is a quality metric.
    ``start`` is the absolute time of ``psi0`` and only shifts the
    reported time, since H does not depend on tau.
    """
    _check_basis(hamiltonian.basis, psi0)
    if tau < 0:
        raise PropagationError(f"Cannot integrate backwards to tau = {tau}")
    if tau == 0:
        return psi0
    cfg = cfg or IntegratorConfig()
    matrix = hamiltonian.matrix

    def rhs(_t: float, c: np.ndarray) -> np.ndarray:
        return -1j * (matrix @ c)

    solution = solve_ivp(
        rhs,
        (float(start), float(start + tau)),
        np.array(psi0.amplitudes),
        method="RK45",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        first_step=min(cfg.initial_step, float(tau)),
        max_step=cfg.max_step,
    )
    if not solution.success:
        raise PropagationError(f"RK5 integration to tau = {tau} failed: {solution.message}")

    psi = StateVector(hamiltonian.basis, solution.y[:, -1])
    drift = norm_drift(psi)
    logger.debug(
        "RK5 to tau=%g: %d evaluations, norm drift %.3e", start + tau, solution.nfev, drift
    )
    if drift > DRIFT_WARNING:
        logger.warning(
            "RK5 norm drift %.3e at tau=%g exceeds %.0e", drift, start + tau, DRIFT_WARNING
        )
    return psi


def evolve_series(
    hamiltonian: Hamiltonian,
    psi0: StateVector,
    tau_grid: Sequence[float],
    method: Method | str = Method.SPECTRAL,
    cfg: IntegratorConfig | None = None,
) -> list[StateVector]:
    taus = np.asarray(tau_grid, dtype=float)
    if np.any(np.diff(taus) < 0):
        raise PropagationError("Tau grid must be sorted ascending")
    method = Method(method)

    if method is Method.SPECTRAL:
        propagator = Propagator.from_hamiltonian(hamiltonian)
        return [propagator.propagate(psi0, tau) for tau in taus]

    states = []
    psi, now = psi0, 0.0
    for tau in taus:
        psi = rk5_propagate(hamiltonian, psi, tau - now, cfg, start=now)
        now = tau
        states.append(psi)
    return states
