import numpy as np

from gapbound import markov_core as mc


def random_kernel(rng, m, sparse=False):
    """Random irreducible kernel; ``sparse`` zeroes entries but keeps a Hamiltonian cycle."""
    k = rng.dirichlet(np.full(m, 0.7), size=m)
    if sparse:
        keep = rng.random((m, m)) < 0.4
        perm = rng.permutation(m)
        keep[perm, np.roll(perm, -1)] = True
        k = np.where(keep, k + 1e-3, 0.0)
        k /= k.sum(axis=1, keepdims=True)
    return mc.make_kernel(k)


def random_centred(rng, pi):
    f = rng.normal(size=pi.m)
    return mc.center(f, pi)


ACCEPTANCE_LINES = []
