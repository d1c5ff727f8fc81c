"""Sharp/flat factorization of p-adic power series through logarithmic matrices.

The package provides exact capped-precision arithmetic in Q_p and its
ramified quadratic extension, truncated power series over pluggable
coefficient rings, finite-level logarithmic matrices with their structural
identities, and the one- and two-variable factorization of interpolating
series into bounded (sharp/flat) components.
"""

from .factor import (
    CharSpec,
    CharValueReport,
    GrowthReport,
    combine_pair,
    division_loss_digits,
    exact_combine_pair,
    factor_pair,
    growth_order,
    random_bounded,
    verify_pair,
)
from .logmatrix import (
    DetReport,
    MatrixSeries,
    StabilizationReport,
    VerificationError,
    companion_constant,
    companion_matrix,
    det_check,
    det_closed_form,
    diagonalizer,
    integral_head,
    logmatrix_level,
    logmatrix_to_degree,
    pollack_blocks,
    rank1_at_level,
    stabilization_check,
)
from .padic import (
    DEFAULT_PREC,
    FormParams,
    PadicApprox,
    PadicRing,
    PrecisionExhausted,
    QuadExtElem,
    QuadRing,
    ZeroAtPrecision,
    quad_conj,
    quad_inv,
    quad_mul,
    root_power,
    valuation,
)
from .series import (
    INT,
    CycloElem,
    CycloRing,
    IntRing,
    Series1,
    Series2,
    constant_series,
    cyclotomic_poly,
    derivative,
    divide_series,
    divide_x,
    divide_y,
    extend,
    extend2,
    lift_to_quad,
    log1p_over_x,
    mul2_trunc,
    mul_trunc,
    mul_x,
    mul_y,
    one_series,
    outer,
    partial_apply,
    reduce_mod_cyclo,
    series_from_ints,
    truncate,
    truncate2,
    zero_series,
    zero_series2,
)
from .twovar import (
    LQuadruple,
    derivative_relation,
    factor_full,
    factor_x,
    factor_y,
    kronecker,
    random_quadruple,
    recombine,
    recombine_exact,
    rowvec_times_kron,
    sharp_value_relation,
    vanish_check,
    verify_interpolation4,
)

__version__ = "0.1.0"
