"""Small estimation helpers shared by the simulation modules."""

import numpy as np


def batch_means_se(x, n_batches: int = 100) -> float:
    """Standard error of the mean of a serially correlated series.

    Splits ``x`` into ``n_batches`` contiguous blocks; the trailing remainder
    is dropped from the variance estimate only.
    """
    x = np.asarray(x, dtype=float)
    size = x.shape[0] // n_batches
    if size < 2:
        return float(x.std(ddof=1) / np.sqrt(x.shape[0])) if x.shape[0] > 1 else float("nan")
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def lag1_autocorr(x) -> float:
    """Centered lag-1 cross-products over the centered sum of squares."""
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    return float(np.dot(d[:-1], d[1:]) / np.dot(d, d))
