"""Signal processing on 2-dimensional simplicial complexes via a Dirac-type
operator: boundary assembly, spectral decomposition, aligned/anti-aligned
IIR filtering, and reproducible denoising experiments."""

__version__ = "0.1.0"

from .complexes import (
    NgfConfig,
    SimplicialComplex,
    WeightingScheme,
    boundary_matrix,
    build_complex,
    dump_complex,
    load_complex,
    ngf_generate,
    simplex_labels,
    triangulated_grid,
    weighted_boundary,
)
from .errors import FormatError, NumericalError
from .experiments import (
    ErrorCurve,
    ExperimentConfig,
    NoiseSpec,
    default_gamma_grid,
    drifter_total_signal,
    load_edge_flow,
    relative_error,
    run_drifter_experiment,
    run_experiment,
    sample_noise,
    write_error_curve,
)
from .filters import FilterResult, FilterSpec, apply_filter, build_regularizer, frequency_response
from .operators import (
    DiracOperator,
    SimplicialSignal,
    apply_dirac,
    assemble_dirac,
    dirac_split,
    hodge_laplacians,
)
from .spectral import (
    SignalDecomposition,
    SpectralBasis,
    betti_numbers,
    compute_basis,
    decompose_signal,
    planted_eigenvector,
    write_spectrum_csv,
)

__all__ = [
    "__version__",
    "SimplicialComplex",
    "WeightingScheme",
    "NgfConfig",
    "build_complex",
    "boundary_matrix",
    "weighted_boundary",
    "ngf_generate",
    "triangulated_grid",
    "load_complex",
    "dump_complex",
    "simplex_labels",
    "DiracOperator",
    "SimplicialSignal",
    "assemble_dirac",
    "dirac_split",
    "hodge_laplacians",
    "apply_dirac",
    "SpectralBasis",
    "SignalDecomposition",
    "compute_basis",
    "decompose_signal",
    "betti_numbers",
    "planted_eigenvector",
    "write_spectrum_csv",
    "FilterSpec",
    "FilterResult",
    "build_regularizer",
    "apply_filter",
    "frequency_response",
    "NoiseSpec",
    "ExperimentConfig",
    "ErrorCurve",
    "sample_noise",
    "relative_error",
    "run_experiment",
    "drifter_total_signal",
    "run_drifter_experiment",
    "load_edge_flow",
    "write_error_curve",
    "default_gamma_grid",
    "FormatError",
    "NumericalError",
]
