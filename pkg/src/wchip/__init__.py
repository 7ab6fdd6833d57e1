"""Sparse Fock-space simulator for color-routed photonic W-state circuits.

Models a two-color (Blue/Red) pair source feeding a network of directional
couplers and an add-drop filter, post-selects a heralded three-photon state
across three output channels, and reconstructs its density matrix from
two-channel interference measurements.
"""

from .circuit import (
    CANONICAL_CHANNELS,
    CircuitSpec,
    build_transform,
    canonical_w_circuit,
    circuit_from_json_dict,
    circuit_to_json_dict,
    load_circuit,
    propagate,
    save_circuit,
)
from .density import PairRho, ThreePhotonRho, trace_distance
from .elements import (
    AddDropFilter,
    DirectionalCoupler,
    SourceSpec,
    adddrop_transform,
    coupler_transform,
    source_state,
    two_pair_state,
)
from .errors import (
    ConfigError,
    DiagonalsNotUniform,
    GridTooLarge,
    ParamOutOfRange,
    ValidationError,
    WchipError,
    ZeroProbability,
)
from .fock import (
    Color,
    DetectionPattern,
    FockBasisState,
    ModeLabel,
    ModeTransform,
    PureState,
    apply_creation,
    apply_mode_transform,
    basis_from_pattern,
    color_amplitudes,
    color_pattern,
    inner_product,
    project,
    reduce_to_channels,
)
from .herald import (
    Branch,
    HeraldResult,
    coincidence_distribution,
    coincidence_distribution_rho,
    herald,
    rho_biseparable,
    rho_incoherent,
    w_fidelity,
    w_state,
)
from .optimize import OptimizationResult, SweepSpec, SweepTable, herald_objective, maximize, sweep
from .tomography import (
    DiscriminationReport,
    MeasurementRecord,
    TomographyResult,
    TomoSetting,
    condition_on_blue,
    discriminate,
    reconstruct_offdiagonal,
    reconstruct_rho234,
    run_tomography,
    sample_record,
    setting_probabilities,
)

__version__ = "0.1.0"

__all__ = [
    "AddDropFilter",
    "Branch",
    "CANONICAL_CHANNELS",
    "CircuitSpec",
    "Color",
    "ConfigError",
    "DetectionPattern",
    "DiagonalsNotUniform",
    "DirectionalCoupler",
    "DiscriminationReport",
    "FockBasisState",
    "GridTooLarge",
    "HeraldResult",
    "MeasurementRecord",
    "ModeLabel",
    "ModeTransform",
    "OptimizationResult",
    "PairRho",
    "ParamOutOfRange",
    "PureState",
    "SourceSpec",
    "SweepSpec",
    "SweepTable",
    "ThreePhotonRho",
    "TomographyResult",
    "TomoSetting",
    "ValidationError",
    "WchipError",
    "ZeroProbability",
    "adddrop_transform",
    "apply_creation",
    "apply_mode_transform",
    "basis_from_pattern",
    "build_transform",
    "canonical_w_circuit",
    "circuit_from_json_dict",
    "circuit_to_json_dict",
    "coincidence_distribution",
    "coincidence_distribution_rho",
    "color_amplitudes",
    "color_pattern",
    "condition_on_blue",
    "coupler_transform",
    "discriminate",
    "herald",
    "herald_objective",
    "inner_product",
    "load_circuit",
    "maximize",
    "project",
    "propagate",
    "reconstruct_offdiagonal",
    "reconstruct_rho234",
    "reduce_to_channels",
    "rho_biseparable",
    "rho_incoherent",
    "run_tomography",
    "sample_record",
    "save_circuit",
    "setting_probabilities",
    "source_state",
    "sweep",
    "trace_distance",
    "two_pair_state",
    "w_fidelity",
    "w_state",
]
