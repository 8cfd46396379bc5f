"""Fourier-symbol analysis and spectral solvers for constant-coefficient evolution systems."""

from .classifier import (
    Classification,
    SamplingConfig,
    SpectralReport,
    classify,
    growth_bound_check,
    petrovskii_verdict,
    sample_spectral_bound,
)
from .fields import FieldState, GridSpec, KernelField, forward_fft, inverse_fft
from .gallery import gallery_operator
from .linalg import eigenvalues, matrix_exp, shilov_bound, spectral_abscissa, spectral_radius
from .operator import (
    CompanionFamily,
    PolyMatrixOperator,
    char_poly_in_lambda,
    companion_symbol,
    load_document,
    parse_operator,
    reduced_order,
    serialize,
    symbol_at,
    total_degree,
)
from .poly import Poly
from .solver import cone_estimate, kernel, propagate, semigroup_residual, support_radius

__version__ = "0.1.0"
