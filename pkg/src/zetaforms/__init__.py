"""Exact rational linear forms in odd zeta values.

The package builds the partial-fraction expansion of a rising-factorial
kernel exactly, assembles integer linear combinations of 1 and the odd
zeta values with self-certifying residuals, and evaluates the resulting
linear-independence dimension bounds.
"""

from .bounds import (
    BoundReport,
    RateEstimate,
    asymptotic_check,
    empirical_rate,
    f_g,
    min_a_for_dim,
    nesterenko_lb,
    optimize_r,
    p_growth_bound,
    r_paper,
    s_bound,
    s_bound_exact,
)
from .errors import (
    CriterionInapplicableError,
    InconsistencyError,
    ParameterError,
    PrecisionUnreachableError,
    ScanCapError,
)
from .exact import TruncatedSeries, bernoulli, lcm_upto, pochhammer
from .partfrac import (
    FormParams,
    PartialFractionTable,
    check_symmetry,
    decompose,
    eval_coeff_poly,
    eval_free_poly,
    integer_scaled,
    kernel_value,
    reconstruction_ok,
)
from .reals import (
    IntegerLinearForm,
    build_linear_form,
    eval_series,
    mc_integral,
    polylog,
    verify_identity_at_z,
    zeta_odd,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CriterionInapplicableError",
    "FormParams",
    "InconsistencyError",
    "IntegerLinearForm",
    "ParameterError",
    "PartialFractionTable",
    "PrecisionUnreachableError",
    "RateEstimate",
    "ScanCapError",
    "TruncatedSeries",
    "asymptotic_check",
    "bernoulli",
    "build_linear_form",
    "check_symmetry",
    "decompose",
    "empirical_rate",
    "eval_coeff_poly",
    "eval_free_poly",
    "eval_series",
    "f_g",
    "integer_scaled",
    "kernel_value",
    "lcm_upto",
    "mc_integral",
    "min_a_for_dim",
    "nesterenko_lb",
    "optimize_r",
    "p_growth_bound",
    "pochhammer",
    "polylog",
    "r_paper",
    "reconstruction_ok",
    "s_bound",
    "s_bound_exact",
    "verify_identity_at_z",
    "zeta_odd",
]
