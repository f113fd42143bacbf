"""Resonance-zone bifurcation analysis: reduced zone models, averaging by
quadrature, equilibria and bifurcation curves, parameter-plane diagrams with
separatrix reconnection, orbit integration, and area-preserving cylinder maps.
"""
from .averaging import (
    AveragedCoefficients,
    FrequencyProfile,
    PerturbationSpec,
    ResonanceClass,
    ResonanceSpec,
    classify_resonance,
    compute_averaged_coefficients,
    degeneracy_order,
    find_resonance_levels,
    harmonic_reduction,
    verify_hamiltonian_identities,
)
from .diagram import (
    ParameterPlaneDiagram,
    RegionSignature,
    build_parameter_diagram,
    classify_transition,
    find_regions,
    reconnection_residual,
    region_signature,
    saddle_energy_levels,
    trace_reconnection_curve,
)
from .equilibria import (
    Equilibrium,
    closed_form_equilibria,
    detect_local_bifurcation,
    local_bifurcation_curves,
    refine_equilibrium,
)
from .flow import (
    OrbitTrace,
    PhasePortrait,
    integrate_orbit,
    sample_phase_portrait,
    trace_separatrices,
)
from .maps import (
    EulerMapParams,
    MapOrbit,
    StandardMapParams,
    approximating_hamiltonian,
    iterate_orbit,
    map_jacobian_det,
    map_step,
    map_step_inverse,
    rotation_number,
    trace_manifolds,
)
from .zone_model import (
    GeneralAveragedModel,
    PhaseState,
    ZoneParameters,
    eval_general_field,
    eval_hamiltonian,
    eval_reduced_hamiltonian,
    eval_vector_field,
)

__version__ = "0.1.0"

__all__ = [
    "AveragedCoefficients",
    "EulerMapParams",
    "Equilibrium",
    "FrequencyProfile",
    "GeneralAveragedModel",
    "MapOrbit",
    "OrbitTrace",
    "ParameterPlaneDiagram",
    "PerturbationSpec",
    "PhasePortrait",
    "PhaseState",
    "RegionSignature",
    "ResonanceClass",
    "ResonanceSpec",
    "StandardMapParams",
    "ZoneParameters",
    "approximating_hamiltonian",
    "build_parameter_diagram",
    "classify_resonance",
    "classify_transition",
    "closed_form_equilibria",
    "compute_averaged_coefficients",
    "degeneracy_order",
    "detect_local_bifurcation",
    "eval_general_field",
    "eval_hamiltonian",
    "eval_reduced_hamiltonian",
    "eval_vector_field",
    "find_regions",
    "find_resonance_levels",
    "harmonic_reduction",
    "integrate_orbit",
    "iterate_orbit",
    "local_bifurcation_curves",
    "map_jacobian_det",
    "map_step",
    "map_step_inverse",
    "reconnection_residual",
    "refine_equilibrium",
    "region_signature",
    "rotation_number",
    "saddle_energy_levels",
    "sample_phase_portrait",
    "trace_manifolds",
    "trace_reconnection_curve",
    "trace_separatrices",
    "verify_hamiltonian_identities",
]
