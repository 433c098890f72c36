"""Zeno-like fixed points of a qubit measured by a stream of detector qubits.

The main entry points are re-exported here; see the submodules for the rest.
"""
from .errors import (ContractViolation, NotCompletelyPositive, NumericalFailure, UnsupportedDecomposition,
                     ZenoError, ZeroProbabilityOutcome)
from .fixedpoint import (ScanGrid, SearchConfig, brouwer_fixed_point, detector_sweep, freeze_design,
                         refine_zeno_point, scaling_probe, zeno_preserved_state, zeno_scan)
from .measurement import (channel_from_kraus, choi_matrix, kraus_from_channel, outcome_probabilities,
                          post_measurement_state, povm_from_kraus)
from .model import (ModelParams, QubitState, analytic_superop, cycle_channel, idealized_channel,
                    joint_hamiltonian)
from .qcore import eig_general, herm_expm, partial_trace_detector, tensor, unvec, vec
from .spectra import evolve_n, spectral_decompose, state_decompose, validate_cptp

__version__ = "0.1.0"
