"""Explicit error bounds for MCMC averages of L^p integrands on chains with an
invertible ``Id - K`` on the centred subspace, with exact and Monte Carlo checks."""

from .bounds import (
    BoundInputs,
    constant_Cp_theorem,
    corollary_pmean_bound,
    lemma_mse_bound,
    lower_bound_rate,
    prop_pmean_bound,
    theorem_abs_error_bound,
)
from .markov_core import (
    Distribution,
    Exponent,
    FiniteKernel,
    StateFunction,
    builtin_kernel,
    center,
    is_reversible,
    lp_norm,
    make_kernel,
    mean,
    radon_nikodym_norm,
    stationary_distribution,
)
from .simulate import (
    ChainSpec,
    ErrorEstimate,
    RunSpec,
    empirical_error,
    estimator,
    exact_error_bruteforce,
    sample_trajectory,
)
from .spectral import (
    SpectralReport,
    gap_absolute,
    inverse_norm_s,
    l20_matrix,
    operator_norm_l20,
    spectral_report,
    stationary_mse_exact,
    verify_operator_identity,
)

__version__ = "0.1.0"
