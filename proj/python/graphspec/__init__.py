"""Adjacency spectra of random graphs with community structure and arbitrary
expected degrees.

The heavy lifting lives in the compiled extension ``graphspec._core``: model
construction, the self-consistent band solver, outlier and detectability
computations, graph sampling, and empirical eigensolvers.
"""

from ._core import (
    GraphspecError,
    ModelSpec,
    ParamAtom,
    SampledGraph,
    __version__,
    band_edge_two_value,
    build_model,
    build_simplex_model,
    build_two_community_model,
    cubic_h_physical,
    degree_stats,
    density_at,
    density_curve,
    detect_communities,
    detectability_threshold,
    eigenvalues,
    find_band_edges,
    interlacing_check,
    outlier_eigenvalues,
    quadratic_h,
    rank_structure,
    sample_graph,
    semicircle_density,
    simplex_directions,
    solve_h,
    spectral_histogram,
    stieltjes_g,
    threshold_constants,
    threshold_two_value,
    two_value_density,
)

__all__ = [
    "GraphspecError",
    "ModelSpec",
    "ParamAtom",
    "SampledGraph",
    "__version__",
    "band_edge_two_value",
    "build_model",
    "build_simplex_model",
    "build_two_community_model",
    "cubic_h_physical",
    "degree_stats",
    "density_at",
    "density_curve",
    "detect_communities",
    "detectability_threshold",
    "eigenvalues",
    "find_band_edges",
    "interlacing_check",
    "outlier_eigenvalues",
    "quadratic_h",
    "rank_structure",
    "sample_graph",
    "semicircle_density",
    "simplex_directions",
    "solve_h",
    "spectral_histogram",
    "stieltjes_g",
    "threshold_constants",
    "threshold_two_value",
    "two_value_density",
]
