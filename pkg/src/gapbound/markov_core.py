"""Finite-state Markov kernels, distributions, and pi-weighted function norms.

Everything here is immutable after construction: the numpy arrays held by
:class:`FiniteKernel`, :class:`Distribution` and :class:`StateFunction` are
flagged read-only, so instances can be shared freely.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadExponent,
    BadParams,
    NegativeEntry,
    NotStationary,
    Reducible,
    RowSumViolation,
)

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
REVERSIBLE_TOL = 1e-12


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise BadParams(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteKernel:
    """Row-stochastic transition matrix on ``m`` states.

    Use :func:`make_kernel` to build one; the constructor itself only stores
    the (already validated) matrix.
    """

    matrix: np.ndarray
    labels: Optional[tuple] = None

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def apply(self, f) -> np.ndarray:
        """Markov operator ``f -> Kf`` acting on a function of the state."""
        return self.matrix @ _values(f)

    def to_json(self) -> dict:
        out = {"matrix": self.matrix.tolist()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FiniteKernel":
        return make_kernel(data["matrix"], labels=data.get("labels"))


@dataclass(frozen=True, eq=False)
class Distribution:
    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights, 1)
        if np.any(w < 0):
            raise NegativeEntry("distribution weights must be nonnegative")
        if abs(w.sum() - 1.0) > ROW_SUM_TOL:
            raise RowSumViolation(f"distribution weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def point_mass(cls, m: int, state: int) -> "Distribution":
        w = np.zeros(m)
        w[state] = 1.0
        return cls(w)

    @classmethod
    def uniform(cls, m: int) -> "Distribution":
        return cls(np.full(m, 1.0 / m))

    def to_json(self) -> dict:
        return {"weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "Distribution":
        return cls(data["weights"])


@dataclass(frozen=True, eq=False)
class StateFunction:
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values, 1)
        if not np.all(np.isfinite(v)):
            raise BadParams("function values must be finite")
        object.__setattr__(self, "values", v)

    def __add__(self, c: float) -> "StateFunction":
        return StateFunction(self.values + c)

    def to_json(self) -> dict:
        return {"values": self.values.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "StateFunction":
        return cls(data["values"])


@dataclass(frozen=True)
class Exponent:
    """A pair of conjugate exponents with ``1/p + 1/q = 1``.

    ``q`` is ``math.inf`` exactly when ``p == 1``.
    """

    p: float
    q: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not 1.0 <= p <= 2.0:
            raise BadExponent(f"p must lie in [1, 2], got {p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", conjugate(p))


def conjugate(p: float) -> float:
    """Hölder conjugate of ``p``; ``inf`` for ``p == 1`` and ``1`` for ``p == inf``."""
    if p < 1:
        raise BadExponent(f"exponent must be >= 1, got {p}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _values(f) -> np.ndarray:
    if isinstance(f, StateFunction):
        return f.values
    return np.asarray(f, dtype=np.float64)


def _weights(pi) -> np.ndarray:
    if isinstance(pi, Distribution):
        return pi.weights
    return np.asarray(pi, dtype=np.float64)


def is_irreducible(matrix) -> bool:
    """Whether the digraph of strictly positive entries is strongly connected."""
    adj = np.asarray(matrix) > 0
    m = adj.shape[0]

    def reaches_all(a):
        seen = np.zeros(m, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in np.flatnonzero(a[i] & ~seen):
                seen[j] = True
                queue.append(j)
        return bool(seen.all())

    # strongly connected iff state 0 reaches everything and everything reaches 0
    return reaches_all(adj) and reaches_all(adj.T)


def make_kernel(matrix, labels: Optional[Sequence] = None,
                require_irreducible: bool = True) -> FiniteKernel:
    """Validate ``matrix`` and wrap it as a :class:`FiniteKernel`.

    Rows whose sums are within ``1e-12`` of one are renormalized once, so that
    ``K @ 1 == 1`` holds for the stored matrix.

    Raises
    ------
    NegativeEntry, RowSumViolation, Reducible, BadParams
    """
    k = np.array(matrix, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise BadParams(f"kernel must be a square matrix, got shape {k.shape}")
    if k.shape[0] < 2:
        raise BadParams("kernel needs at least two states")
    if not np.all(np.isfinite(k)):
        raise BadParams("kernel entries must be finite")
    if np.any(k < 0):
        raise NegativeEntry("transition probabilities cannot be negative")
    sums = k.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
    if bad.size:
        raise RowSumViolation(f"row {bad[0]} sums to {sums[bad[0]]!r}")
    k = k / sums[:, None]
    if require_irreducible and not is_irreducible(k):
        raise Reducible("positive-entry graph of the kernel is not strongly connected")
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != k.shape[0]:
            raise BadParams("one label per state required")
    k.setflags(write=False)
    return FiniteKernel(k, labels)


def stationary_distribution(K: FiniteKernel) -> Distribution:
    """Solve ``pi K = pi`` with ``sum(pi) = 1`` for an irreducible kernel."""
    if not is_irreducible(K.matrix):
        raise Reducible("stationary distribution is not unique for a reducible kernel")
    m = K.m
    a = np.vstack([K.matrix.T - np.eye(m), np.ones((1, m))])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if np.max(np.abs(pi @ K.matrix - pi)) > STATIONARY_TOL or np.any(pi <= 0):
        raise NotStationary("linear solve did not produce a positive invariant vector")
    return Distribution(pi)


def check_stationary(K: FiniteKernel, pi: Distribution) -> None:
    w = _weights(pi)
    if w.shape[0] != K.m:
        raise NotStationary("distribution and kernel sizes differ")
    if np.max(np.abs(w @ K.matrix - w)) > STATIONARY_TOL:
        raise NotStationary("pi K != pi")


def lp_norm(f, pi, p: float) -> float:
    """``(sum_i pi_i |f_i|^p)^(1/p)``; for ``p = inf`` the max over the support of pi."""
    if p < 1:
        raise BadExponent(f"p must be >= 1, got {p}")
    v = np.abs(_values(f))
    w = _weights(pi)
    if math.isinf(p):
        return float(v[w > 0].max(initial=0.0))
    return float(np.dot(w, v ** p) ** (1.0 / p))


def mean(f, pi) -> float:
    return float(np.dot(_weights(pi), _values(f)))


def center(f, pi) -> StateFunction:
    """``f - pi(f)``."""
    v = _values(f)
    return StateFunction(v - mean(v, pi))


def radon_nikodym_norm(nu, pi, q: float) -> float:
    """L^q(pi) norm of the density d(nu)/d(pi).

    Returns ``math.inf`` when ``nu`` charges a state that ``pi`` does not, i.e.
    when nu is not absolutely continuous with respect to pi.
    """
    if q < 1:
        raise BadExponent(f"q must be >= 1, got {q}")
    nu_w = _weights(nu)
    pi_w = _weights(pi)
    support = pi_w > 0
    if np.any(nu_w[~support] > 0):
        return math.inf
    ratio = nu_w[support] / pi_w[support]
    if math.isinf(q):
        return float(ratio.max())
    return float(np.dot(pi_w[support], ratio ** q) ** (1.0 / q))


def is_reversible(K: FiniteKernel, pi) -> bool:
    """Detailed balance ``pi_i K_ij == pi_j K_ji`` to within ``1e-12``."""
    flux = _weights(pi)[:, None] * K.matrix
    return bool(np.max(np.abs(flux - flux.T)) <= REVERSIBLE_TOL)


# -- closed-form test kernels ------------------------------------------------

def _prob(x, name, allow_zero=False):
    lo_ok = x >= 0 if allow_zero else x > 0
    if not (lo_ok and x <= 1):
        raise BadParams(f"{name}={x} is not a probability in {'[0' if allow_zero else '(0'}, 1]")
    return float(x)


def two_state(a: float, b: float) -> FiniteKernel:
    """Flip 0->1 with probability ``a`` and 1->0 with probability ``b``."""
    a = _prob(a, "a")
    b = _prob(b, "b")
    return make_kernel([[1 - a, a], [b, 1 - b]])


def cycle_walk(m: int, laziness: float = 0.0) -> FiniteKernel:
    """Symmetric nearest-neighbour walk on the cycle Z_m, holding with prob ``laziness``."""
    if int(m) != m or m < 2:
        raise BadParams("cycle_walk needs an integer m >= 2")
    m = int(m)
    if not 0 <= laziness < 1:
        raise BadParams("laziness must lie in [0, 1)")
    k = np.zeros((m, m))
    step = (1.0 - laziness) / 2.0
    for i in range(m):
        k[i, i] += laziness
        k[i, (i + 1) % m] += step
        k[i, (i - 1) % m] += step
    return make_kernel(k)


def iid(mu) -> FiniteKernel:
    """Independent sampling from ``mu``: every row equals ``mu``."""
    w = _weights(mu)
    if w.ndim != 1 or w.shape[0] < 2 or np.any(w <= 0):
        raise BadParams("iid needs a strictly positive weight vector of length >= 2")
    w = w / w.sum()
    return make_kernel(np.tile(w, (w.shape[0], 1)))


def metropolis_grid(target, m: Optional[int] = None) -> FiniteKernel:
    """Metropolis chain on {0..m-1} with +-1 proposals (prob 1/2 each).

    Proposals off the grid are rejected. ``target`` need not be normalized.
    """
    t = _weights(target)
    if m is None:
        m = t.shape[0]
    if t.ndim != 1 or t.shape[0] != m or m < 2 or np.any(t <= 0):
        raise BadParams("metropolis_grid needs a positive target of length m >= 2")
    k = np.zeros((m, m))
    for i in range(m):
        for j in (i - 1, i + 1):
            if 0 <= j < m:
                k[i, j] = 0.5 * min(1.0, t[j] / t[i])
        k[i, i] = 1.0 - k[i].sum()
    return make_kernel(k)


BUILTIN_KERNELS = {
    "two_state": two_state,
    "cycle_walk": cycle_walk,
    "iid": iid,
    "metropolis_grid": metropolis_grid,
}


def builtin_kernel(name: str, **params) -> FiniteKernel:
    try:
        factory = BUILTIN_KERNELS[name]
    except KeyError:
        raise BadParams(f"unknown builtin kernel {name!r}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {name}: {exc}") from None


def kernel_from_json(data: dict) -> FiniteKernel:
    """Kernel from either ``{"matrix": ..., "labels": ...}`` or
    ``{"builtin": name, "params": {...}}``."""
    if "builtin" in data:
        return builtin_kernel(data["builtin"], **data.get("params", {}))
    if "matrix" in data:
        return FiniteKernel.from_json(data)
    raise BadParams("kernel JSON needs a 'matrix' or 'builtin' key")
