"""Spectral quantities of a finite kernel on the centred subspace L^2_0(pi).

A function ``f`` is represented by the coordinates ``D f`` with
``D = diag(sqrt(pi))``, so the pi-weighted inner product becomes the Euclidean
one and ``K`` acts as ``A = D K D^{-1}``. Constants map to ``u = sqrt(pi)``;
the centred subspace is the orthogonal complement of ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotCentered
from .markov_core import (
    FiniteKernel,
    _values,
    _weights,
    check_stationary,
    is_reversible,
    mean,
)

SINGULAR_TOL = 1e-12
IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class SpectralReport:
    norm_l20: float
    gap_abs: float
    s: float
    reversible: bool
    m: int

    @property
    def assumption_holds(self) -> bool:
        return math.isfinite(self.s)

    def to_json(self) -> dict:
        return {
            "norm_l20": self.norm_l20,
            "gap_abs": self.gap_abs,
            "s": self.s if math.isfinite(self.s) else "inf",
            "reversible": self.reversible,
            "m": self.m,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SpectralReport":
        s = data["s"]
        return cls(
            norm_l20=float(data["norm_l20"]),
            gap_abs=float(data["gap_abs"]),
            s=math.inf if s == "inf" else float(s),
            reversible=bool(data["reversible"]),
            m=int(data["m"]),
        )


def centred_basis(pi) -> np.ndarray:
    """Orthonormal ``m x (m-1)`` basis of the complement of ``sqrt(pi)``.

    Columns 2..m of the Householder reflector that sends ``e_1`` to ``-sqrt(pi)``.
    """
    u = np.sqrt(_weights(pi))
    w = u.copy()
    w[0] += 1.0  # u_0 > 0, so no cancellation
    h = np.eye(u.shape[0]) - np.outer(w, w) * (2.0 / np.dot(w, w))
    return h[:, 1:]


def similarity(K: FiniteKernel, pi) -> np.ndarray:
    """``D K D^{-1}``: the kernel in pi-orthonormal coordinates."""
    d = np.sqrt(_weights(pi))
    return d[:, None] * K.matrix / d[None, :]


def l20_matrix(K: FiniteKernel, pi) -> np.ndarray:
    """Matrix of ``K`` restricted to L^2_0(pi) in an orthonormal basis.

    Raises
    ------
    NotStationary
        If ``pi K != pi``.
    """
    check_stationary(K, pi)
    v = centred_basis(pi)
    return v.T @ similarity(K, pi) @ v


def operator_norm_l20(K: FiniteKernel, pi) -> float:
    m0 = l20_matrix(K, pi)
    return float(min(1.0, np.linalg.norm(m0, 2)))


def full_operator_norm(K: FiniteKernel, pi) -> float:
    """Norm of ``K`` on all of L^2(pi); equals one for a stationary pi."""
    check_stationary(K, pi)
    return float(np.linalg.norm(similarity(K, pi), 2))


def gap_absolute(K: FiniteKernel, pi) -> float:
    """One minus the spectral radius of ``K`` on L^2_0(pi)."""
    m0 = l20_matrix(K, pi)
    radius = np.max(np.abs(np.linalg.eigvals(m0)))
    return float(min(1.0, max(0.0, 1.0 - radius)))


def inverse_norm_s(K: FiniteKernel, pi) -> float:
    """Norm of ``(Id - K)^{-1}`` on L^2_0(pi); ``inf`` if ``Id - K`` is singular there.

    Computed from the smallest singular value, which is the right quantity for
    non-normal (non-reversible) kernels.
    """
    m0 = l20_matrix(K, pi)
    sigma_min = np.linalg.svd(np.eye(m0.shape[0]) - m0, compute_uv=False)[-1]
    if sigma_min < SINGULAR_TOL:
        return math.inf
    return float(1.0 / sigma_min)


def spectral_report(K: FiniteKernel, pi) -> SpectralReport:
    return SpectralReport(
        norm_l20=operator_norm_l20(K, pi),
        gap_abs=gap_absolute(K, pi),
        s=inverse_norm_s(K, pi),
        reversible=is_reversible(K, pi),
        m=K.m,
    )


def matrix_powers(a: np.ndarray, n: int) -> np.ndarray:
    """Stack ``[a^0, a^1, ..., a^n]`` built by repeated multiplication."""
    out = np.empty((n + 1,) + a.shape)
    out[0] = np.eye(a.shape[0])
    for k in range(1, n + 1):
        out[k] = out[k - 1] @ a
    return out


def lag_multiplicities(n: int) -> np.ndarray:
    """How often each lag ``|j-k|`` occurs among pairs ``1 <= j, k <= n``."""
    lags = np.arange(n)
    c = 2.0 * (n - lags)
    c[0] = n
    return c


def verify_operator_identity(K: FiniteKernel, pi, n: int) -> float:
    """Max-abs residual of the variance operator identity on L^2_0(pi).

    Compares ``(I - M)^2 sum_{j,k=1}^n M^{|j-k|}`` with
    ``n (I - M^2) - 2 M (I - M^n)`` where ``M`` is :func:`l20_matrix`.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    m0 = l20_matrix(K, pi)
    eye = np.eye(m0.shape[0])
    powers = matrix_powers(m0, n)
    double_sum = np.tensordot(lag_multiplicities(n), powers[:n], axes=1)
    lhs = (eye - m0) @ (eye - m0) @ double_sum
    rhs = n * (eye - m0 @ m0) - 2.0 * m0 @ (eye - powers[n])
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def stationary_mse_exact(K: FiniteKernel, pi, h, n: int) -> float:
    """Exact ``E_pi |S_n h|^2`` for a centred ``h`` via lagged autocovariances."""
    w = _weights(pi)
    hv = _values(h)
    if abs(mean(hv, w)) > 1e-12:
        raise NotCentered(f"pi(h) = {mean(hv, w)!r} is not zero")
    check_stationary(K, pi)
    autocov = np.empty(n)
    v = hv.copy()
    for lag in range(n):
        autocov[lag] = np.dot(w * hv, v)
        v = K.matrix @ v
    return float(np.dot(lag_multiplicities(n), autocov) / n**2)
