"""Wavefront shaping of spatially entangled photons through scattering media:
coincidence amplitudes, optimal phase masks, and disorder-ensemble statistics
at desk scale."""

from .configurations import (
    LAYOUTS,
    CoincidenceMap,
    MacroPixelMap,
    PhaseMask,
    ShapingConfiguration,
    coincidence_amplitude,
    coincidence_map,
    coincidence_probability,
    full_control,
    mirror_plane_field,
    slm_diagonal,
    total_coincidence,
)
from .experiments import (
    BASELINE_MODES,
    CONFIG_LABELS,
    ClusterScore,
    EnhancementRecord,
    EnsembleSummary,
    MirrorDiagnostic,
    SweepPoint,
    baseline_probability,
    default_baseline_mode,
    low_doc_slope,
    parse_config_label,
    phase_cluster_score,
    run_ensemble,
    run_mirror_diagnostic,
    run_realization,
    sweep_doc,
    sweep_n,
    target_modes,
    transmission_excess,
)
from .media import (
    MEDIUM_KINDS,
    MediumModel,
    TransmissionMatrix,
    generate,
    haar_unitary,
    load_matrix,
    save_matrix,
    total_transmission,
)
from .numerics import (
    DimensionError,
    PowerIterationError,
    RngStream,
    dft,
    largest_singular_value_sq,
    matmul,
    sample_standard_complex_gaussian,
)
from .shaping import (
    ALGORITHMS,
    LayoutError,
    OptimizationResult,
    OptimizerFailure,
    OptimizerSpec,
    QuadraticKernel,
    ValidationRecord,
    analytic_phases_1ps,
    analytic_phases_2pis,
    analytic_phases_thin_displaced,
    build_kernel,
    objective_and_gradient,
    optimize,
    validate_against_analytic,
)

__version__ = "0.1.0"
