"""Compiled inner loops for the sequential path simulations.

Random draws are always produced by numpy generators outside these kernels,
so results depend only on the seed and not on compilation.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def markov_path(uniforms, cumulative, start):
    """State path of length ``len(uniforms) + 1`` by inverse-CDF steps."""
    horizon = uniforms.shape[0]
    n = cumulative.shape[1]
    path = np.empty(horizon + 1, dtype=np.int64)
    path[0] = start
    for t in range(horizon):
        row = path[t]
        u = uniforms[t]
        k = 0
        while k < n - 1 and u >= cumulative[row, k]:
            k += 1
        path[t + 1] = k
    return path


@njit(cache=True)
def surplus_path(shocks, s0, s_bar, big_s_bar, s_max, rho):
    """Log surplus ratio recursion with lambda clamped at 0 and s capped at s_max."""
    horizon = shocks.shape[0]
    s = np.empty(horizon + 1)
    s[0] = s0
    caps = 0
    for t in range(horizon):
        arg = 1.0 - 2.0 * (s[t] - s_bar)
        lam = 0.0
        if arg > 0.0:
            lam = np.sqrt(arg) / big_s_bar - 1.0
            if lam < 0.0:
                lam = 0.0
        nxt = (1.0 - rho) * s_bar + rho * s[t] + lam * shocks[t]
        if nxt > s_max:
            nxt = s_max
            caps += 1
        s[t + 1] = nxt
    return s, caps


@njit(cache=True)
def lrr_states(eps, w, rho, phi_e, sigma2_bar, nu1, sigma_w, floor):
    """Persistent growth component and conditional variance paths."""
    horizon = eps.shape[0]
    q = np.empty(horizon + 1)
    s2 = np.empty(horizon + 1)
    q[0] = 0.0
    s2[0] = sigma2_bar
    hits = 0
    for t in range(horizon):
        sd = np.sqrt(s2[t])
        q[t + 1] = rho * q[t] + phi_e * sd * eps[t]
        nxt = sigma2_bar + nu1 * (s2[t] - sigma2_bar) + sigma_w * w[t]
        if nxt < floor:
            nxt = floor
            hits += 1
        s2[t + 1] = nxt
    return q, s2, hits
