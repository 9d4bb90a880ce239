"""
qwalk2d: two-dimensional coined quantum walks on the periodic lattice.

Direct unitary evolution and momentum-space spectral reconstruction of
4-chirality walks on the odd N x N torus, exact and empirical
time-averaged origin probabilities, infinite-lattice limits, and a
localization predictor built on eigenvalue degeneracy across momentum
blocks.
"""

from .coins import (
    CHIRALITIES,
    Coin,
    a1_coin,
    a2_coin,
    chirality_index,
    coin_from_json,
    custom_coin,
    grover_coin,
    symmetric_family,
    unitarity_residual,
)
from .evolve import evolve, step
from .spectral import (
    DegeneracyClass,
    MomentumBlock,
    OriginExpansion,
    SpectralDecomposition,
    SpectralError,
    a1_eigenvalues,
    build_block,
    degeneracy_class,
    evolve_spectral,
    grover_eigenvalues,
    grover_eigenvectors,
    origin_coefficients,
    origin_eigenvalue_amplitudes,
)
from .state import (
    InitialSpec,
    WalkState,
    coords,
    origin_superposition,
    pure_state,
    write_grid_csv,
    write_grid_json,
)
from .timeavg import (
    AlphaExtrema,
    ConsistencyError,
    IntegralConstants,
    LocalizationReport,
    TimeAverageReport,
    alpha_extrema,
    empirical_time_average,
    exact_time_average,
    grover_closed_form,
    integral_constants,
    limit_report,
    limit_time_average,
    localization_predictor,
    scan_alpha,
    write_report_json,
    write_scan_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CHIRALITIES",
    "AlphaExtrema",
    "Coin",
    "ConsistencyError",
    "DegeneracyClass",
    "IntegralConstants",
    "InitialSpec",
    "LocalizationReport",
    "MomentumBlock",
    "OriginExpansion",
    "SpectralDecomposition",
    "SpectralError",
    "TimeAverageReport",
    "WalkState",
    "a1_coin",
    "a1_eigenvalues",
    "a2_coin",
    "alpha_extrema",
    "build_block",
    "chirality_index",
    "coin_from_json",
    "coords",
    "custom_coin",
    "degeneracy_class",
    "empirical_time_average",
    "evolve",
    "evolve_spectral",
    "exact_time_average",
    "grover_closed_form",
    "grover_coin",
    "grover_eigenvalues",
    "grover_eigenvectors",
    "integral_constants",
    "limit_report",
    "limit_time_average",
    "localization_predictor",
    "origin_coefficients",
    "origin_eigenvalue_amplitudes",
    "origin_superposition",
    "pure_state",
    "scan_alpha",
    "step",
    "symmetric_family",
    "unitarity_residual",
    "write_grid_csv",
    "write_grid_json",
    "write_report_json",
    "write_scan_csv",
]
