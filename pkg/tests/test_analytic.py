import math

import numpy as np
import pytest

import cavitycloner as cc
from cavitycloner import QubitState
from cavitycloner.analytic import (amplitudes_biased, amplitudes_unbiased,
                                   fidelity_biased, fidelity_unbiased,
                                   mean_photons_unbiased, rabi_pair,
                                   reference_fidelity, theta_avg_probs_biased,
                                   theta_avg_probs_unbiased)

SQRT2 = math.sqrt(2)
H = 1 / SQRT2
HALF_PERIOD = math.pi / SQRT2


def test_unbiased_amplitudes_at_zero():
    q = QubitState(0.6, 0.8j)
    theta = 0.9
    amplitudes = amplitudes_unbiased(q, theta, 0.0)
    phase = np.exp(1j * theta)
    expected = [0.6 * H, 0, 0.6 * phase * H, 0.8j * H, 0, 0, 0.8j * phase * H]
    assert np.allclose(amplitudes, expected, atol=1e-15)


def test_unbiased_amplitudes_at_half_period():
    amplitudes = amplitudes_unbiased(QubitState(1, 0), 0.0, HALF_PERIOD)
    assert np.isclose(amplitudes[0], -H)
    assert abs(amplitudes[1]) < 1e-15


def test_unbiased_amplitude_difference_is_constant():
    q = QubitState(H, H)
    taus = np.linspace(0, 10, 50)
    amplitudes = amplitudes_unbiased(q, 0.0, taus)
    assert np.allclose(amplitudes[2] - amplitudes[3], (q.alpha - q.beta) / SQRT2, atol=1e-15)


def test_unbiased_amplitudes_are_normalized():
    rng = np.random.default_rng(1)
    taus = np.linspace(0, 20, 201)
    for _ in range(5):
        amplitudes = amplitudes_unbiased(QubitState.random(rng), rng.uniform(0, 2 * math.pi), taus)
        assert np.allclose(np.sum(np.abs(amplitudes) ** 2, axis=0), 1.0, atol=1e-10)


def test_theta_averaged_unbiased_table():
    assert theta_avg_probs_unbiased(0.0).approximately_equals(cc.ProbabilityTable({(1, 0): 1.0}))
    table = theta_avg_probs_unbiased(HALF_PERIOD / 2)
    expected = cc.ProbabilityTable({(2, 0): 0.5, (1, 1): 0.25, (0, 1): 0.125, (1, 0): 0.125})
    assert table.approximately_equals(expected, 1e-12)
    for tau in np.linspace(0, 20, 41):
        assert math.isclose(theta_avg_probs_unbiased(tau).total(), 1.0, abs_tol=1e-14)


def test_unbiased_fidelity():
    assert fidelity_unbiased(0.0) == 1.0
    assert math.isclose(fidelity_unbiased(HALF_PERIOD / 2), 0.75)
    assert math.isclose(fidelity_unbiased(HALF_PERIOD), 0.5)
    taus = np.linspace(0, 10, 101)
    assert np.allclose(fidelity_unbiased(taus + SQRT2 * math.pi), fidelity_unbiased(taus))


def test_unbiased_mean_photons():
    assert mean_photons_unbiased(0.0) == (1.0, 1.0)
    n_right, n_all = mean_photons_unbiased(HALF_PERIOD)
    assert math.isclose(n_right, 0.5)
    assert math.isclose(n_all, 1.0)
    n_right, n_all = mean_photons_unbiased(HALF_PERIOD / 2)
    assert math.isclose(n_right, 1.375)
    assert math.isclose(n_all, 1.75)


def test_rabi_pair_values():
    pair = rabi_pair(3.0)
    assert math.isclose(pair.omega1, 4.49661, abs_tol=1e-5)
    assert math.isclose(pair.omega2, 1.33434, abs_tol=1e-5)
    assert pair.omega1 >= pair.omega2 >= 0
    assert abs(pair.big_a.real) < 1e-15
    assert abs(pair.big_b.real) < 1e-15


def test_rabi_identities():
    rng = np.random.default_rng(2)
    for g in rng.uniform(0.01, 20, size=100):
        pair = rabi_pair(g)
        assert math.isclose(pair.omega1 * pair.omega2, 2 * g, abs_tol=1e-10)
        assert math.isclose(pair.omega1**2 + pair.omega2**2, 2 * g**2 + 4, abs_tol=1e-10)


def test_degenerate_bias_is_rejected():
    with pytest.raises(cc.DegenerateBiasError):
        rabi_pair(0.0)
    with pytest.raises(cc.DegenerateBiasError):
        amplitudes_biased(1e-9, 0.0, 1.0)
    assert math.isclose(reference_fidelity(0.0, 1.0), fidelity_unbiased(1.0))


def test_biased_amplitudes_initial_conditions():
    for theta in (0.0, 0.7, math.pi):
        amplitudes = amplitudes_biased(3.0, theta, 0.0)
        # e1;10, e2;10, f;10, g;11, g;20, e1;01
        expected = [H, H * np.exp(1j * theta), 0, 0, 0, 0]
        assert np.allclose(amplitudes, expected, atol=1e-12)


def test_biased_amplitudes_at_half_period():
    amplitudes = amplitudes_biased(3.0, 0.0, HALF_PERIOD)
    assert np.isclose(amplitudes[0], -H)
    assert abs(amplitudes[4]) < 1e-15


def test_biased_amplitudes_are_normalized():
    taus = np.linspace(0, 20, 401)
    for g in (0.5, 3.0, 8.0):
        for theta in (0.0, 2.1):
            amplitudes = amplitudes_biased(g, theta, taus)
            assert np.allclose(np.sum(np.abs(amplitudes) ** 2, axis=0), 1.0, atol=1e-10)
            assert np.allclose(np.abs(amplitudes[0]) ** 2 + np.abs(amplitudes[4]) ** 2, 0.5)


def test_biased_table_and_fidelity():
    assert math.isclose(fidelity_biased(3.0, 0.0), 1.0)
    taus = np.linspace(0, 20, 201)
    fidelities = fidelity_biased(3.0, taus)
    for tau, value in zip(taus, fidelities):
        table = theta_avg_probs_biased(3.0, tau)
        assert math.isclose(table.total(), 1.0, abs_tol=1e-10)
        assert math.isclose(value, 1 - table.get(0, 1) - 0.5 * table.get(1, 1), abs_tol=1e-12)


def test_bias_raises_the_worst_fidelity():
    taus = np.linspace(0, 12, 1000)
    assert np.min(fidelity_biased(3.0, taus)) > np.min(fidelity_unbiased(taus))


def test_biased_fidelity_is_continuous_at_vanishing_bias():
    taus = np.linspace(0, 5, 101)
    assert np.max(np.abs(fidelity_biased(1e-4, taus) - fidelity_unbiased(taus))) < 1e-3


def test_biased_fidelity_has_no_short_period():
    taus = np.linspace(0, 20, 801)
    reference = fidelity_biased(3.0, taus)
    for shift in np.arange(0.05, 20.0, 0.01):
        shifted = fidelity_biased(3.0, taus + shift)
        assert np.max(np.abs(shifted - reference)) > 1e-6


def test_to_state_vector():
    basis = cc.enumerate_basis(1, 2)
    amplitudes = amplitudes_unbiased(QubitState(1, 0), 0.0, 0.3)
    psi = cc.to_state_vector(basis, cc.UNBIASED_STATES, amplitudes)
    assert psi.is_normalized()
    assert psi.amplitude(cc.UNBIASED_STATES[1]) == amplitudes[1]


def test_probability_table_average():
    first = cc.ProbabilityTable({(1, 0): 1.0})
    second = cc.ProbabilityTable({(0, 1): 1.0})
    mean = cc.ProbabilityTable.average([first, second])
    assert mean.as_dict() == {(0, 1): 0.5, (1, 0): 0.5}
    assert mean.get(2, 0) == 0.0
