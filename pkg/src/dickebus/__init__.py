"""Multipartite entanglement generation for qubits coupled to a shared
bosonic bus: resonant single-step W/Bell protocols with engineered
inhomogeneous couplings, selective Dicke-subspace control in the dispersive
regime, sequential and heralded Dicke preparation, entangled-transfer
sequences, and dissipative (master-equation) studies."""

__version__ = "0.1.0"

from .analytic import (ResonantAmplitudes, TransitionSpec, f_factor, mu,
                       resonant_amplitudes, stark_shift, tau_dicke,
                       transition_detuning, transition_element, transition_spec)
from .core import (DensityMatrix, DickeLabel, DickePair, DomainError,
                   DimensionMismatch, SpaceSpec, StateVector, basis_state,
                   boson_vacuum_component, concurrence, dicke_decompose,
                   dicke_pair_state, dicke_state, fidelity, measure_qubit,
                   partial_trace, phase_corrected_fidelity, project_qubit, tensor)
from .design import (SelectivityReport, SelectivityRow, bell_coupling_ratios,
                     plant_delta2, selectivity_report, solve_selective_params,
                     table1_parameter_sets, verify_w_condition, w_couplings)
from .dynamics import EvolutionResult, NumericalError, evolve_exact, evolve_lindblad, evolve_tdep
from .models import (CouplingProfile, DispersiveParams, EffectiveDicke,
                     LabDispersive, LindbladSpec, PhysicsValidationError,
                     ResonantTC, Sideband, effective_dicke, lab_dispersive,
                     lindblad_dissipators, number_operator, resonant_tc, sideband)
from .protocols import (DickePairState, MeasureAction, Protocol, ProtocolStep,
                        RegisterDickeState, RunRecord, SparseBasisState,
                        noon_protocol, probabilistic_dicke_step, reversed_protocol,
                        run_protocol, sequential_dicke_protocol, w_protocol)
