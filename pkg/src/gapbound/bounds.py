"""Closed-form error bounds for MCMC averages under an L^2_0 invertibility constant.

All inputs are plain floats: ``s`` bounds the norm of ``(Id - K)^{-1}`` on the
centred subspace, ``M`` is the L^q(pi) norm of the initial density, and
``f_norm`` the L^p(pi) norm of the integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BadExponent, BadParams
from .markov_core import conjugate


def _check_p(p: float, lo_open: bool, hi: float = 2.0, hi_open: bool = False) -> float:
    p = float(p)
    lo_ok = p > 1.0 if lo_open else p >= 1.0
    hi_ok = p < hi if hi_open else p <= hi
    if not (lo_ok and hi_ok):
        lo = "(1" if lo_open else "[1"
        rb = ")" if hi_open else "]"
        raise BadExponent(f"p={p} outside {lo}, {hi:g}{rb}")
    return p


@dataclass(frozen=True)
class BoundInputs:
    p: float
    s: float
    f_norm: float
    M: float
    n: int
    q: float = field(init=False)

    def __post_init__(self):
        _check_p(self.p, lo_open=False)
        if self.n < 1:
            raise BadParams("n must be >= 1")
        if self.M < 1.0 - 1e-12:
            raise BadParams(f"a density norm is at least 1, got M={self.M}")
        if self.f_norm < 0:
            raise BadParams("f_norm must be nonnegative")
        object.__setattr__(self, "q", conjugate(self.p))


def constant_Cp_theorem(p: float, s: float) -> float:
    """``2^(2/p - 1) * (8 s^2)^(1 - 1/p)`` for ``p`` in (1, 2]."""
    p = _check_p(p, lo_open=True)
    return 2.0 ** (2.0 / p - 1.0) * (8.0 * s * s) ** (1.0 - 1.0 / p)


def theorem_abs_error_bound(inputs: BoundInputs) -> float:
    """Bound on ``E_nu |S_n f - pi(f)|``; ``inputs.M`` must be the L^q norm with q conjugate to p."""
    c = constant_Cp_theorem(inputs.p, inputs.s)
    return c * inputs.M * inputs.f_norm / inputs.n ** (1.0 - 1.0 / inputs.p)


def lemma_mse_bound(s: float, h_norm_2: float, n: int) -> float:
    """``8 s^2 ||h||_2^2 / n`` bounding the stationary MSE of a centred ``h``."""
    return 8.0 * s * s * h_norm_2 * h_norm_2 / n


def prop_pmean_bound(p: float, s: float, f_norm_p: float, n: int) -> float:
    """Stationary p-mean error bound ``2^(2-p) (8 s^2 / n)^(p-1) ||f||_p^p``."""
    p = _check_p(p, lo_open=False)
    if p == 2.0:
        return lemma_mse_bound(s, f_norm_p, n)
    return 2.0 ** (2.0 - p) * (8.0 * s * s / n) ** (p - 1.0) * f_norm_p ** p


def corollary_Cp(p: float, s: float) -> float:
    p = _check_p(p, lo_open=False)
    return 2.0 ** (2.0 - p) * (8.0 * s * s) ** (p - 1.0)


def corollary_pmean_bound(p: float, s: float, M_inf: float, f_norm_p: float, n: int) -> float:
    """p-mean error bound from an ``M_inf``-warm start."""
    if M_inf < 1.0 - 1e-12:
        raise BadParams(f"M_inf must be >= 1, got {M_inf}")
    return M_inf * prop_pmean_bound(p, s, f_norm_p, n)


def lower_bound_rate(p: float, n: int) -> float:
    """Reference rate ``n^-(1 - 1/p)`` with the unknown constant set to one.

    Only a slope reference for rate fits; it is not a certified lower bound.
    """
    p = _check_p(p, lo_open=True, hi_open=True)
    return float(n) ** -(1.0 - 1.0 / p)


def theorem_rate(p: float) -> float:
    """Log-log slope ``-(1 - 1/p)`` of the theorem bound in ``n``."""
    if math.isinf(p):
        return -1.0
    return -(1.0 - 1.0 / p)
