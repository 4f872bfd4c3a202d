"""Tight frames of graph wavelet and vertex-frequency atoms adapted to a Laplacian spectrum."""
from .errors import ConstructionError, DataError, NumericalError, ParameterError, SpecframesError
from .frames import (
    FrameReport,
    analyze,
    analyze_chebyshev,
    atom_norm_stats,
    baseline_banks,
    cumulative_coherence,
    filter_signal,
    filter_signal_chebyshev,
    frame_bounds,
    frame_report,
    synthesize,
    translate_atom,
    vertex_frequency_demo,
)
from .graphs import (
    Graph,
    Laplacian,
    build_comet,
    build_erdos_renyi,
    build_path,
    build_random_regular,
    build_ring,
    build_sensor,
    laplacian,
    load_graph,
)
from .kernels import (
    CosineWindow,
    FilterBank,
    log_wavelet_bank,
    make_blackman,
    make_hann,
    spectrum_adapted_wavelet_bank,
    translate_identity_check,
    uniform_translates,
    warp_bank,
)
from .linalg import (
    SparseSym,
    dense_eigh,
    estimate_lambda_upper,
    inertia_below,
    ldl_factorize,
    spmv,
)
from .warping import (
    CdfEstimate,
    er_combinatorial_cdf,
    er_normalized_cdf,
    exact_cdf_points,
    interpolate,
    mckay_cdf,
    normalize_warp,
    sliced_cdf,
)

__version__ = "0.1.0"

__all__ = [
    "CdfEstimate",
    "ConstructionError",
    "CosineWindow",
    "DataError",
    "FilterBank",
    "FrameReport",
    "Graph",
    "Laplacian",
    "NumericalError",
    "ParameterError",
    "SparseSym",
    "SpecframesError",
    "analyze",
    "analyze_chebyshev",
    "atom_norm_stats",
    "baseline_banks",
    "build_comet",
    "build_erdos_renyi",
    "build_path",
    "build_random_regular",
    "build_ring",
    "build_sensor",
    "cumulative_coherence",
    "dense_eigh",
    "er_combinatorial_cdf",
    "er_normalized_cdf",
    "estimate_lambda_upper",
    "exact_cdf_points",
    "filter_signal",
    "filter_signal_chebyshev",
    "frame_bounds",
    "frame_report",
    "inertia_below",
    "interpolate",
    "laplacian",
    "ldl_factorize",
    "load_graph",
    "log_wavelet_bank",
    "make_blackman",
    "make_hann",
    "mckay_cdf",
    "normalize_warp",
    "sliced_cdf",
    "spectrum_adapted_wavelet_bank",
    "spmv",
    "synthesize",
    "translate_atom",
    "translate_identity_check",
    "uniform_translates",
    "vertex_frequency_demo",
    "warp_bank",
]
