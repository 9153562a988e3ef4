"""Trajectory sampling, MCMC averages, and their errors.

Random numbers come from SplitMix64 streams evaluated in numpy, one stream per
replicate. Replicate ``r`` of a run with master seed ``S`` uses the stream
seeded with ``replicate_seed(S, r)``, and the ``k``-th draw of a stream seeded
with ``z`` is ``mix64(z + (k + 1) * GOLDEN_GAMMA)``. Since every draw is a pure
function of (seed, index), replicates are isolated from each other and can be
advanced together as numpy vectors; results do not depend on how replicates
are batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Union

import numpy as np
from scipy import integrate, special

from .errors import BadParams, NotIntegrable, ShortTrajectory, TooLarge
from .markov_core import (
    Distribution,
    FiniteKernel,
    StateFunction,
    _values,
    _weights,
    make_kernel,
    mean,
    stationary_distribution,
)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
BRUTEFORCE_LIMIT = 10**7

_U64 = np.uint64


def mix64(z) -> np.ndarray:
    """SplitMix64 output function (Stafford variant 13), elementwise on uint64."""
    z = np.atleast_1d(np.asarray(z, dtype=_U64))
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def _offset(k: int) -> np.uint64:
    return _U64(((k + 1) * GOLDEN_GAMMA) & MASK64)


def replicate_seed(master_seed: int, replicate) -> np.ndarray:
    """Seed of replicate(s) ``replicate``: the SplitMix64 sequence of ``master_seed``."""
    r = np.atleast_1d(np.asarray(replicate, dtype=np.int64))
    base = np.full(r.shape, int(master_seed) & MASK64, dtype=_U64)
    steps = ((r.astype(object) + 1) * GOLDEN_GAMMA) % (1 << 64)
    return mix64(base + steps.astype(_U64))


def stream_uniform(seeds: np.ndarray, k: int) -> np.ndarray:
    """``k``-th uniform draw in (0, 1) from each stream in ``seeds``."""
    z = mix64(np.asarray(seeds, dtype=_U64) + _offset(k))
    return ((z >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """A Markov chain together with its initial law.

    ``kind == "finite"`` carries a kernel and an initial distribution; ``"ar1"``
    carries ``rho`` and starts from its standard normal stationary law.
    """

    kind: str
    kernel: Optional[FiniteKernel] = None
    nu: Optional[Distribution] = None
    rho: Optional[float] = None

    def __post_init__(self):
        if self.kind == "finite":
            if self.kernel is None:
                raise BadParams("finite chain needs a kernel")
            if self.nu is None:
                object.__setattr__(self, "nu", stationary_distribution(self.kernel))
            elif self.nu.m != self.kernel.m:
                raise BadParams("initial distribution has the wrong number of states")
        elif self.kind == "ar1":
            if self.rho is None or not 0 < self.rho < 1:
                raise BadParams("ar1 needs 0 < rho < 1")
        else:
            raise BadParams(f"unknown chain kind {self.kind!r}")

    @classmethod
    def finite(cls, kernel: FiniteKernel, nu: Optional[Distribution] = None) -> "ChainSpec":
        return cls("finite", kernel=kernel, nu=nu)

    @classmethod
    def ar1(cls, rho: float) -> "ChainSpec":
        return cls("ar1", rho=float(rho))


@dataclass(frozen=True)
class RunSpec:
    n: int
    n0: int = 0
    replicates: int = 1000
    master_seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.replicates < 1 or self.n0 < 0:
            raise BadParams("need n >= 1, replicates >= 1, n0 >= 0")


@dataclass(frozen=True)
class ErrorEstimate:
    mean: float
    std_error: float
    replicates: int

    def to_json(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "replicates": self.replicates}


def _walk(chain: ChainSpec, seeds: np.ndarray, length: int) -> Iterator[np.ndarray]:
    """Yield ``X_1, ..., X_length`` for every stream in ``seeds`` at once."""
    if chain.kind == "finite":
        cum_nu = np.cumsum(chain.nu.weights)
        cum_nu[-1] = 1.0
        cum_k = np.cumsum(chain.kernel.matrix, axis=1)
        cum_k[:, -1] = 1.0
        x = np.searchsorted(cum_nu, stream_uniform(seeds, 0), side="right")
        yield x
        for k in range(1, length):
            u = stream_uniform(seeds, k)
            x = np.sum(cum_k[x] <= u[:, None], axis=1)
            yield x
    else:
        rho = chain.rho
        scale = math.sqrt(1.0 - rho * rho)
        x = special.ndtri(stream_uniform(seeds, 0))
        yield x
        for k in range(1, length):
            x = rho * x + scale * special.ndtri(stream_uniform(seeds, k))
            yield x


def sample_trajectory(chain: ChainSpec, length: int, seed: int) -> np.ndarray:
    """``X_1..X_length`` of the stream seeded with ``seed`` (deterministic)."""
    if length < 1:
        raise BadParams("length must be >= 1")
    seeds = np.array([int(seed) & MASK64], dtype=_U64)
    return np.concatenate([x for x in _walk(chain, seeds, length)])


StateFn = Union[StateFunction, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def _evaluator(f: StateFn) -> Callable[[np.ndarray], np.ndarray]:
    if callable(f) and not isinstance(f, StateFunction):
        return f
    values = _values(f)
    return lambda x: values[x]


def estimator(trajectory, f: StateFn, n: int, n0: int = 0) -> float:
    """``(1/n) * sum_{j=1}^n f(X_{j+n0})`` over a single trajectory."""
    trajectory = np.asarray(trajectory)
    if trajectory.shape[0] < n + n0:
        raise ShortTrajectory(f"need {n + n0} states, trajectory has {trajectory.shape[0]}")
    fx = _evaluator(f)(trajectory[n0:n0 + n])
    return float(np.sum(fx) / n)


def estimation_error(trajectory, f, pi, n: int, n0: int = 0) -> float:
    """``S_{n,n0} f - pi(f)`` for one trajectory of a finite chain.

    Evaluated in exact rational arithmetic and rounded once, so adding a
    constant to ``f`` (when ``f + c`` is itself exact in floating point) leaves
    the result bit-for-bit unchanged.
    """
    trajectory = np.asarray(trajectory)
    if trajectory.shape[0] < n + n0:
        raise ShortTrajectory(f"need {n + n0} states, trajectory has {trajectory.shape[0]}")
    fv = [Fraction(float(v)) for v in _values(f)]
    w = [Fraction(float(v)) for v in _weights(pi)]
    s_n = sum((fv[int(x)] for x in trajectory[n0:n0 + n]), Fraction(0)) / n
    pi_f = sum((wi * vi for wi, vi in zip(w, fv)), Fraction(0)) / sum(w)
    return float(s_n - pi_f)


def ensemble_averages(chain: ChainSpec, f: StateFn, n: int, n0: int,
                      seeds: np.ndarray) -> np.ndarray:
    """``S_{n,n0} f`` for each stream in ``seeds``."""
    fx = _evaluator(f)
    total = np.zeros(len(seeds))
    for t, x in enumerate(_walk(chain, seeds, n + n0)):
        if t >= n0:
            total += fx(x)
    return total / n


def empirical_error(chain: ChainSpec, f: StateFn, run: RunSpec, power: float = 1.0,
                    pi_f: Optional[float] = None) -> ErrorEstimate:
    """Monte Carlo estimate of ``E |S_{n,n0} f - pi(f)|^power`` over independent replicates."""
    if power < 1:
        raise BadParams("power must be >= 1")
    if pi_f is None:
        if chain.kind != "finite":
            raise BadParams("pi(f) must be supplied for continuous-state chains")
        pi_f = mean(f, stationary_distribution(chain.kernel))
    seeds = replicate_seed(run.master_seed, np.arange(run.replicates))
    errors = np.abs(ensemble_averages(chain, f, run.n, run.n0, seeds) - pi_f) ** power
    if run.replicates > 1:
        se = float(np.std(errors, ddof=1) / math.sqrt(run.replicates))
    else:
        se = 0.0
    return ErrorEstimate(float(np.mean(errors)), se, run.replicates)


def exact_error_bruteforce(K: FiniteKernel, nu, f, n: int, n0: int = 0,
                           power: float = 1.0) -> float:
    """Exact ``E_nu |S_{n,n0} f - pi(f)|^power`` by listing every path of length ``n + n0``."""
    m = K.m
    length = n + n0
    if m ** length > BRUTEFORCE_LIMIT:
        raise TooLarge(f"{m}^{length} paths exceeds the limit of {BRUTEFORCE_LIMIT}")
    fv = _values(f)
    pi_f = mean(fv, stationary_distribution(K))
    states = np.arange(m)
    probs = _weights(nu).copy()
    last = states
    sums = fv[last] if n0 == 0 else np.zeros(m)
    for t in range(1, length):
        probs = (probs[:, None] * K.matrix[last]).ravel()
        sums = np.repeat(sums, m)
        last = np.tile(states, last.shape[0])
        if t >= n0:
            sums = sums + fv[last]
    return float(np.dot(probs, np.abs(sums / n - pi_f) ** power))


# -- continuous-state example ------------------------------------------------

def ar1_constants(rho: float) -> tuple[float, float]:
    """``(s, ||K||_{L^2_0})`` for the stationary Gaussian AR(1) kernel.

    The Hermite polynomials diagonalize the kernel with eigenvalues ``rho^k``.
    """
    if not 0 < rho < 1:
        raise BadParams("need 0 < rho < 1")
    return 1.0 / (1.0 - rho), float(rho)


def ar1_discretized_kernel(rho: float, m: int = 400, half_width: float = 6.0) -> FiniteKernel:
    """Finite approximation of the AR(1) kernel on an equispaced grid."""
    x = np.linspace(-half_width, half_width, m)
    scale = math.sqrt(1.0 - rho * rho)
    z = (x[None, :] - rho * x[:, None]) / scale
    w = np.exp(-0.5 * z * z)
    return make_kernel(w / w.sum(axis=1, keepdims=True))


def _normal_singular_moment(beta: float, x0: float) -> float:
    """``E |Z - x0|^(-beta)`` for standard normal ``Z`` by adaptive quadrature."""
    opts = dict(epsabs=0.0, epsrel=1e-12, limit=200)
    right = integrate.quad(_phi, x0, x0 + 1.0,
                           weight="alg", wvar=(-beta, 0.0), **opts)[0]
    left = integrate.quad(_phi, x0 - 1.0, x0, weight="alg", wvar=(0.0, -beta), **opts)[0]
    g = lambda x: abs(x - x0) ** -beta * _phi(x)
    upper = integrate.quad(g, x0 + 1.0, np.inf, **opts)[0]
    lower = integrate.quad(g, -np.inf, x0 - 1.0, **opts)[0]
    return left + right + upper + lower


def _phi(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HeavyTailFunction:
    """``x -> |x - x0|^(-alpha)`` with its standard normal mean and L^p norm."""

    alpha: float
    x0: float
    p: float
    pi_f: float
    lp_norm: float

    def __call__(self, x):
        return np.abs(np.asarray(x, dtype=np.float64) - self.x0) ** -self.alpha

    @property
    def square_integrable(self) -> bool:
        return 2.0 * self.alpha < 1.0


def heavy_tail_function(alpha: float, x0: float = 0.0, p: float = 1.5) -> HeavyTailFunction:
    if not 0 < alpha < 1:
        raise BadParams("alpha must lie in (0, 1)")
    if alpha * p >= 1:
        raise NotIntegrable(f"|x|^-{alpha} is not in L^{p} (alpha*p >= 1)")
    pi_f = _normal_singular_moment(alpha, x0)
    norm = _normal_singular_moment(alpha * p, x0) ** (1.0 / p)
    return HeavyTailFunction(float(alpha), float(x0), float(p), pi_f, norm)
