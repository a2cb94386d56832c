"""Exact, approximate and analytic computation of the spillage distribution."""

from .analysis import (
    AsymptoticMomentSet,
    HVector,
    MomentSet,
    asymptotic_moments,
    cgf_eval,
    exact_moments,
    h_deficit,
    h_values,
    mgf_expansion_check,
    pgf_eval,
    q_derivative_check,
    q_value,
)
from .approx import AlphaSolve, approx_log_pmf, solve_alpha
from .bench import AccuracyRecord, GridSpec, compare, lrmse, max_abs_diff, sweep, variance_accuracy_correlation
from .core import (
    LogMassVector,
    Method,
    SpillageParams,
    spillage_cdf,
    spillage_log_pmf,
    spillage_log_pmf_block,
    spillage_quantile,
    spillage_sample,
)
from .errors import NumericalDomainError, ParameterError
from .kernel import (
    exact_spillage_kernel_oracle,
    log1p_exp,
    log_binomial,
    log_sum_exp,
    noncentral_stirling_log_table,
)
from .occupancy import (
    OccupancyParams,
    binomial_log_pmf,
    mixture_binomial_residual,
    occupancy_log_pmf,
    occupancy_mixture_residual,
    spillage_via_ratio,
)
from .simulation import SimRun, conditional_spillage_empirical, simulate

__all__ = [name for name in dir() if not name.startswith("_")]
