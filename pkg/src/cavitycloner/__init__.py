from .analytic import (BIASED_STATES, UNBIASED_STATES, ProbabilityTable,
                       RabiPair, amplitudes_biased, amplitudes_unbiased,
                       fidelity_biased, fidelity_unbiased,
                       mean_photons_unbiased, rabi_pair, reference_fidelity,
                       theta_avg_probs_biased, theta_avg_probs_unbiased,
                       to_state_vector)
from .config import PRESETS, BiasKind, BiasMode, RunConfig, preset
from .dynamics import (IntegratorConfig, Method, Propagator, evolve_series,
                       norm_drift, rk5_propagate, spectral_propagate)
from .errors import *
from .hilbert import (NORM_TOL, AtomLevel, BasisState, HilbertBasis,
                      StateVector, enumerate_basis, initial_state,
                      product_state)
from .model import (BiasField, Hamiltonian, QubitState, build_hamiltonian,
                    excited_projector, orthogonal_mode, primed_atomic_basis,
                    primed_bias, universal_bias)
from .observables import (BlochPoint, PhotonStats, TableSeries, bloch_average,
                          bloch_average_fidelity, bloch_average_photons,
                          bloch_nodes, convert_fock_basis, fidelity,
                          fidelity_two_atom, fixed_bias_series,
                          lab_frame_series, lab_frame_table, mean_photons,
                          mode_transform, phase_average, photon_probabilities,
                          photon_stats, simulate, theta_averaged_series,
                          theta_averaged_table)
from .series import Series
