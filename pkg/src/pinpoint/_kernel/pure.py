"""NumPy reference implementations of the numeric kernels.

Kept in lockstep with _core.pyx; arithmetic is arranged the same way so both
backends agree to float rounding.
"""

from __future__ import annotations

import numpy as np


def posterior(prior, likelihood, floor: float, square: bool):
    """Bayes update: normalize prior * max(likelihood, floor), optionally
    squaring the likelihood factor.  Raises ValueError on zero total mass.
    """
    prior = np.asarray(prior, dtype=np.float64)
    factor = np.maximum(np.asarray(likelihood, dtype=np.float64), floor)
    if square:
        factor = factor * factor
    weights = prior * factor
    z = float(weights.sum())
    if z <= 0.0:
        raise ValueError("zero-mass posterior")
    return weights / z


def eig_score(prior, likelihoods) -> float:
    """Expected negative log posterior of the true item.

    likelihoods is a (k, m) matrix: column j holds P(response_j | q, item_i).
    score = sum_j sum_i w_ij * (-ln(w_ij / Z_j)) with w = prior[:,None] * L
    and Z_j the column sums; zero-weight terms contribute nothing.
    """
    prior = np.asarray(prior, dtype=np.float64)
    lik = np.asarray(likelihoods, dtype=np.float64)
    w = prior[:, None] * lik
    z = w.sum(axis=0)
    safe_z = np.where(z > 0.0, z, 1.0)
    ratio = w / safe_z[None, :]
    log_ratio = np.log(np.where(w > 0.0, ratio, 1.0))
    return float(-(w * log_ratio).sum())
