"""Dissipative stabilization of generalized W states in driven cavity arrays."""

from wstate_forge.dynamics import (
    DensityMatrix,
    PopulationState,
    SteadySolver,
    SteadyStateResult,
    build_liouvillian,
    fidelity,
    fidelity_ceiling,
    integrate_rate_equations,
    lindblad_steady_state,
    ness_closed_form,
    rate_equation_rhs,
    rate_steady_state,
    solve_ness,
)
from wstate_forge.effective import (
    EffectiveSpinModel,
    EigenSystem,
    StateLabel,
    build_effective_model,
    degenerate_pair_states,
    exact_diagonalization,
    perturbed_eigensystem,
    single_excitation_spectrum,
)
from wstate_forge.general_em import (
    EMModeSet,
    QubitLayout,
    generalized_w_state,
    lattice_em_modes,
    load_em_modes,
    qubit_exchange_couplings,
    self_energy,
    stark_vertex,
    tight_binding_reduction_error,
)
from wstate_forge.model import (
    Boundary,
    DriveProfile,
    ModeSet,
    SystemParams,
    build_mode_set,
    drive_to_mode_basis,
    mean_field_amplitudes,
)
from wstate_forge.rates import (
    RateTable,
    SpectralFunction,
    mode_overlap_tensor,
    optimal_drive_frequency,
    pump_rates,
    rate_table,
    transition_matrix_elements,
)
from wstate_forge.sweep import (
    AutoRange,
    ConfigError,
    DisorderSpec,
    SweepConfig,
    SweepResult,
    disorder_ensemble,
    load_sweep_config,
    run_sweep,
    scalability_report,
)

__all__ = [
    "AutoRange",
    "Boundary",
    "ConfigError",
    "DensityMatrix",
    "DisorderSpec",
    "DriveProfile",
    "EMModeSet",
    "EffectiveSpinModel",
    "EigenSystem",
    "ModeSet",
    "PopulationState",
    "QubitLayout",
    "RateTable",
    "SpectralFunction",
    "StateLabel",
    "SteadySolver",
    "SteadyStateResult",
    "SweepConfig",
    "SweepResult",
    "SystemParams",
    "build_effective_model",
    "build_liouvillian",
    "build_mode_set",
    "degenerate_pair_states",
    "disorder_ensemble",
    "drive_to_mode_basis",
    "exact_diagonalization",
    "fidelity",
    "fidelity_ceiling",
    "generalized_w_state",
    "integrate_rate_equations",
    "lattice_em_modes",
    "lindblad_steady_state",
    "load_em_modes",
    "load_sweep_config",
    "mean_field_amplitudes",
    "mode_overlap_tensor",
    "ness_closed_form",
    "optimal_drive_frequency",
    "perturbed_eigensystem",
    "pump_rates",
    "qubit_exchange_couplings",
    "rate_equation_rhs",
    "rate_steady_state",
    "rate_table",
    "run_sweep",
    "scalability_report",
    "self_energy",
    "single_excitation_spectrum",
    "solve_ness",
    "stark_vertex",
    "tight_binding_reduction_error",
    "transition_matrix_elements",
]

__version__ = "0.1.0"
