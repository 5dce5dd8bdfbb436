"""Gauss-Hermite expectations under a normal law."""

from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss

DEFAULT_NODES = 40


@lru_cache(maxsize=None)
def normal_nodes(n: int = DEFAULT_NODES):
    """Nodes and weights for E[f(Z)], Z ~ N(0, 1)."""
    x, w = hermgauss(n)
    nodes = np.sqrt(2.0) * x
    weights = w / np.sqrt(np.pi)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def expect_normal(f, mean=0.0, sd=1.0, n: int = DEFAULT_NODES):
    """E[f(X)] for X ~ N(mean, sd^2).

    ``mean`` and ``sd`` may be arrays; the node axis is appended last, so ``f``
    must broadcast over it.
    """
    nodes, weights = normal_nodes(n)
    mean = np.asarray(mean, dtype=float)[..., None]
    sd = np.asarray(sd, dtype=float)[..., None]
    return np.sum(f(mean + sd * nodes) * weights, axis=-1)
