"""Toolkit for quantifying how strongly local measurements on one part of a
bipartite quantum state steer the other part.

The package computes measurement-response characteristic functions, the
measure-averaged strength functional G, a decomposition-optimized
entanglement gap E, exact state reconstruction from projective statistics,
and steering-surface separability diagnostics, together with a CLI that
emits figure-ready CSV/JSON artifacts.
"""

from .matrix_core import (
    ContractViolation,
    DensityMatrix,
    apply_local_unitary,
    kron,
    mix_local_unitaries,
    partial_trace,
    swap_split,
    trace_norm,
    von_neumann_entropy,
)
from .su_basis import GeneratorBasis, bloch_vector, from_bloch, generator_basis
from .measurement import (
    MeasurementParams,
    Projector,
    SubspaceFamily,
    basis_params,
    ket_from_params,
    measure_weight,
    omega_volume,
    projector_derivative,
    projector_from_params,
    sample_params,
    subspace_params,
)
from .tomography import (
    ConditionalOracle,
    ExpectationOracle,
    conditional_oracle_from_state,
    oracle_from_state,
    reconstruct_bipartite,
    reconstruct_state,
    states_equal_by_statistics,
)
from .characteristic import (
    CharSample,
    char_components,
    char_components_bloch,
    char_surface,
    conditional_state,
    pure_state_component,
)
from .strength import IntegratorConfig, StrengthResult, strength, strength_directed
from .entanglement import (
    Decomposition,
    EntanglementResult,
    EntropyGapResult,
    OptimizerConfig,
    decomposition_from_isometry,
    entanglement_E,
    entanglement_Es,
    productize,
)
from .steering import (
    SeparabilityVerdict,
    SteeringSurface,
    lambda_closed_form,
    main_normal_constancy,
    polytope_diagnostics,
    polytope_state,
    steering_surface,
)

__version__ = "0.1.0"

__all__ = [
    "ContractViolation",
    "DensityMatrix",
    "kron",
    "partial_trace",
    "trace_norm",
    "von_neumann_entropy",
    "apply_local_unitary",
    "mix_local_unitaries",
    "swap_split",
    "GeneratorBasis",
    "generator_basis",
    "bloch_vector",
    "from_bloch",
    "MeasurementParams",
    "Projector",
    "SubspaceFamily",
    "ket_from_params",
    "projector_from_params",
    "projector_derivative",
    "measure_weight",
    "omega_volume",
    "sample_params",
    "subspace_params",
    "basis_params",
    "ExpectationOracle",
    "ConditionalOracle",
    "oracle_from_state",
    "conditional_oracle_from_state",
    "reconstruct_state",
    "reconstruct_bipartite",
    "states_equal_by_statistics",
    "CharSample",
    "conditional_state",
    "char_components",
    "char_components_bloch",
    "char_surface",
    "pure_state_component",
    "IntegratorConfig",
    "StrengthResult",
    "strength",
    "strength_directed",
    "Decomposition",
    "OptimizerConfig",
    "EntanglementResult",
    "EntropyGapResult",
    "decomposition_from_isometry",
    "productize",
    "entanglement_E",
    "entanglement_Es",
    "SteeringSurface",
    "SeparabilityVerdict",
    "steering_surface",
    "main_normal_constancy",
    "lambda_closed_form",
    "polytope_state",
    "polytope_diagnostics",
]
