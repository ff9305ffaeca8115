import numpy as np

from cavitycloner import QubitState, cli
from cavitycloner.config import preset
from cavitycloner.observables import lab_frame_series


def test_unbiased_universality_runtime(benchmark):
    rng = np.random.default_rng(5)
    qubits = [QubitState.random(rng) for _ in range(5)]
    taus = np.linspace(0, 12, 1000)
    curves = benchmark(lambda: [lab_frame_series(q, taus).fidelity() for q in qubits])
    assert np.max(np.ptp(np.array(curves), axis=0)) < 1e-9


def test_fig4_preset_runtime(benchmark):
    series = benchmark.pedantic(cli.cmd_fidelity, args=(preset("fig4"),), rounds=1)
    assert series.rows == 1000


def test_fig6a_preset_runtime(benchmark):
    series = benchmark.pedantic(cli.cmd_avg_fidelity, args=(preset("fig6a"),), rounds=1)
    assert series.rows == 601
