"""Invariant suite run by ``cavitycloner verify``.

Each check returns the measured worst-case value; it passes when that value
respects the bound registered with it.
"""

from __future__ import annotations

import functools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import analytic
from .dynamics import Method, Propagator, evolve_series, norm_drift
from .errors import ClonerError
from .hilbert import enumerate_basis, initial_state
from .model import (
    QubitState,
    build_hamiltonian,
    excited_projector,
    primed_atomic_basis,
    primed_bias,
    universal_bias,
)
from .observables import (
    fidelity_two_atom,
    fixed_bias_series,
    lab_frame_series,
    lab_initial_state,
    simulate,
)

logger = logging.getLogger(__name__)

SEED = 20240917


@dataclass(frozen=True)
class Check:
    name: str
    bound: float
    measure: Callable[[], float]
    # improvement checks report a margin that has to stay above the bound
    lower: bool = False


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: float
    passed: bool
    error: str | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error is not None:
            return f"{status}  {self.name}  error: {self.error}"
        return f"{status}  {self.name}  {self.value:.3e}"


CHECKS: list[Check] = []


def check(name: str, bound: float, lower: bool = False):
    def register(fn: Callable[[], float]) -> Callable[[], float]:
        CHECKS.append(Check(name, bound, fn, lower))
        return fn

    return register


def _taus(tau_max: float, points: int) -> np.ndarray:
    return np.linspace(0.0, tau_max, points)


def _random_qubits(count: int) -> list[QubitState]:
    rng = np.random.default_rng(SEED)
    return [QubitState.random(rng) for _ in range(count)]


@check("unbiased fidelity closed form, 5 random qubits", 1e-8)
def unbiased_fidelity() -> float:
    taus = _taus(12.0, 1000)
    expected = analytic.fidelity_unbiased(taus)
    return max(
        float(np.max(np.abs(lab_frame_series(q, taus).fidelity() - expected)))
        for q in _random_qubits(5)
    )


@check("unbiased fidelity universality spread", 1e-9)
def universality_unbiased() -> float:
    taus = _taus(12.0, 1000)
    curves = np.array([lab_frame_series(q, taus).fidelity() for q in _random_qubits(5)])
    return float(np.max(np.ptp(curves, axis=0)))


@check("matched bias universality spread, G'2 = 3", 1e-9)
def universality_matched() -> float:
    taus = _taus(12.0, 400)
    rng = np.random.default_rng(SEED)
    curves = []
    for _ in range(5):
        q = QubitState.random(rng)
        curves.append(simulate(1, primed_bias(q, universal_bias(q, 3.0)), taus).fidelity())
    return float(np.max(np.ptp(np.array(curves), axis=0)))


@check("unbiased theta-averaged table", 1e-8)
def unbiased_table() -> float:
    taus = _taus(12.0, 1000)
    series = simulate(1, (0j, 0j), taus)
    worst = 0.0
    for i, tau in enumerate(taus):
        expected = analytic.theta_avg_probs_unbiased(float(tau))
        table = series.table(i)
        for key in series.keys:
            worst = max(worst, abs(table.get(*key) - expected.get(*key)))
    return worst


@check("unbiased closed-form amplitudes", 1e-8)
def unbiased_amplitudes() -> float:
    taus = _taus(12.0, 241)
    basis = enumerate_basis(1, 2)
    propagator = Propagator.from_hamiltonian(build_hamiltonian(basis))
    worst = 0.0
    for q, theta in zip(_random_qubits(3), (0.0, 0.7, 2.9)):
        psi0 = lab_initial_state(basis, q, (theta,))
        numeric = propagator.propagate_many(psi0.amplitudes[:, None], taus)[:, :, 0]
        expected = np.zeros_like(numeric)
        columns = [basis.position(state) for state in analytic.UNBIASED_STATES]
        expected[:, columns] = analytic.amplitudes_unbiased(q, theta, taus).T
        worst = max(worst, float(np.max(np.abs(numeric - expected))))
    return worst


@check("biased closed-form amplitudes, G'2 = 3", 1e-8)
def biased_amplitudes() -> float:
    taus = _taus(12.0, 241)
    basis = enumerate_basis(1, 2, include_metastable=True)
    propagator = Propagator.from_hamiltonian(build_hamiltonian(basis, (0j, 3 + 0j)))
    worst = 0.0
    for theta in (0.0, 1.3):
        psi0 = initial_state(basis, (theta,))
        numeric = propagator.propagate_many(psi0.amplitudes[:, None], taus)[:, :, 0]
        expected = np.zeros_like(numeric)
        columns = [basis.position(state) for state in analytic.BIASED_STATES]
        expected[:, columns] = analytic.amplitudes_biased(3.0, theta, taus).T
        worst = max(worst, float(np.max(np.abs(numeric - expected))))
    return worst


@check("Rabi frequency identities", 1e-10)
def rabi_identities() -> float:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for g in rng.uniform(0.01, 20.0, size=100):
        pair = analytic.rabi_pair(float(g))
        product = abs(pair.omega1 * pair.omega2 - 2 * g)
        squares = abs(pair.omega1**2 + pair.omega2**2 - 2 * g**2 - 4)
        worst = max(worst, product, squares)
    return worst


@check("probability conservation", 1e-9)
def conservation() -> float:
    taus = _taus(20.0, 401)
    return max(
        float(np.max(np.abs(simulate(n, (0j, complex(g)), taus).total() - 1)))
        for n in (1, 2)
        for g in (0.0, 3.0, 8.0)
    )


@check("RK5 energy conservation", 1e-8)
def energy() -> float:
    taus = _taus(20.0, 101)
    basis = enumerate_basis(2, 3, include_metastable=True)
    hamiltonian = build_hamiltonian(basis, (0j, 3 + 0j))
    psi0 = initial_state(basis, (0.4, 1.1))
    start = psi0.expectation(hamiltonian.matrix)
    return max(
        abs(psi.expectation(hamiltonian.matrix) - start)
        for psi in evolve_series(hamiltonian, psi0, taus, Method.RK5)
    )


@check("zero probability p(0,2) one atom, p(0,3) two atoms", 1e-10)
def zero_probability() -> float:
    taus = _taus(20.0, 401)
    return max(
        float(np.max(simulate(n, (0j, complex(g)), taus).entry(0, n + 1)))
        for n in (1, 2)
        for g in (0.0, 3.0, 8.0)
    )


@check("two-atom fidelity formula", 1e-10)
def two_atom_formula() -> float:
    taus = _taus(20.0, 401)
    worst = 0.0
    for g in (0.0, 3.0, 8.0):
        series = simulate(2, (0j, complex(g)), taus)
        closed = np.array([fidelity_two_atom(table) for table in series.tables()])
        worst = max(worst, float(np.max(np.abs(series.fidelity() - closed))))
    return worst


@check("matched bias G'2 = 3 improves mean fidelity on [0, 5]", 0.0, lower=True)
def bias_improvement() -> float:
    taus = _taus(5.0, 501)
    return min(
        float(np.mean(simulate(n, (0j, 3 + 0j), taus).fidelity()))
        - float(np.mean(simulate(n, (0j, 0j), taus).fidelity()))
        for n in (1, 2)
    )


@check("RK5 vs spectral amplitudes", 1e-6)
def rk5_cross_check() -> float:
    return _rk5_metrics()[0]


@check("RK5 norm drift", 1e-9)
def rk5_drift() -> float:
    return _rk5_metrics()[1]


@functools.cache
def _rk5_metrics() -> tuple[float, float]:
    taus = _taus(20.0, 41)
    discrepancy, drift = 0.0, 0.0
    for n in (1, 2):
        for g in (0.0, 3.0, 8.0):
            basis = enumerate_basis(n, n + 1, include_metastable=g != 0)
            hamiltonian = build_hamiltonian(basis, (0j, complex(g)))
            psi0 = initial_state(basis, (0.4, 1.1)[:n])
            exact = evolve_series(hamiltonian, psi0, taus, Method.SPECTRAL)
            stepped = evolve_series(hamiltonian, psi0, taus, Method.RK5)
            for a, b in zip(exact, stepped):
                discrepancy = max(discrepancy, float(np.max(np.abs(a.amplitudes - b.amplitudes))))
                drift = max(drift, norm_drift(b))
    return discrepancy, drift


@check("spectral reconstruction and orthonormality", 1e-12)
def spectral_factorization() -> float:
    basis = enumerate_basis(2, 3, include_metastable=True)
    hamiltonian = build_hamiltonian(basis, (0j, 8 + 0j))
    propagator = Propagator.from_hamiltonian(hamiltonian)
    scale = max(1.0, float(np.max(np.abs(propagator.eigenvalues))))
    return max(
        propagator.reconstruction_error(hamiltonian) / scale,
        propagator.orthonormality_error(),
    )


@check("primed excited projector equals lab projector", 1e-12)
def excited_projector_identity() -> float:
    return max(
        float(np.max(np.abs(excited_projector(primed_atomic_basis(q)) - np.eye(2))))
        for q in _random_qubits(5)
    )


@check("fixed lab bias (0, 8) improves averaged fidelity on (0, 2]", -1e-12, lower=True)
def fixed_bias_improvement() -> float:
    taus = _taus(2.0, 41)[1:]
    biased = fixed_bias_series(1, (0j, 8 + 0j), taus).fidelity()
    return float(np.min(biased - analytic.fidelity_unbiased(taus)))


@check("Bloch quadrature 16x16 vs 32x32", 1e-8)
def quadrature_convergence() -> float:
    taus = _taus(3.0, 31)
    coarse = fixed_bias_series(1, (0j, 8 + 0j), taus, bloch_grid=(16, 16)).fidelity()
    fine = fixed_bias_series(1, (0j, 8 + 0j), taus, bloch_grid=(32, 32)).fidelity()
    return float(np.max(np.abs(coarse - fine)))


@check("unbiased averaged fidelity is sqrt(2) pi periodic", 1e-10)
def unbiased_periodicity() -> float:
    period = math.sqrt(2) * math.pi
    taus = _taus(6.0, 61)
    shifted = fixed_bias_series(1, (0j, 0j), taus + period, bloch_grid=(4, 4)).fidelity()
    plain = fixed_bias_series(1, (0j, 0j), taus, bloch_grid=(4, 4)).fidelity()
    return float(np.max(np.abs(shifted - plain)))


@check("fixed lab bias (0, 8) averaged fidelity has no period up to 20", 1e-6, lower=True)
def biased_aperiodicity() -> float:
    # tau* runs over (0, 20] on the same 0.025 grid as the window
    taus = _taus(40.0, 1601)
    fidelity = fixed_bias_series(1, (0j, 8 + 0j), taus).fidelity()
    window = 801
    return min(
        float(np.max(np.abs(fidelity[shift : shift + window] - fidelity[:window])))
        for shift in range(1, window)
    )


def run_check(item: Check) -> CheckResult:
    try:
        value = float(item.measure())
    except ClonerError as error:
        logger.debug("Check %r raised", item.name, exc_info=True)
        return CheckResult(item.name, math.nan, item.bound, False, str(error))
    passed = value > item.bound if item.lower else value <= item.bound
    logger.info("%s: %.3e (bound %.0e)", item.name, value, item.bound)
    return CheckResult(item.name, value, item.bound, passed)


def run_checks() -> list[CheckResult]:
    _rk5_metrics.cache_clear()
    return [run_check(item) for item in CHECKS]


def format_report(results: list[CheckResult]) -> str:
    lines = [result.line() for result in results]
    passed = sum(result.passed for result in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
