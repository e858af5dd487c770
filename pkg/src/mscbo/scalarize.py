"""Scalarization weights and weighted-sum costs.

Weights live on the probability simplex (``lam``) or, for the adaptive dynamics,
as unconstrained log-weights (``mu``) mapped back through a softmax. All functions
act along the last axis so they broadcast over swarms and particles.
"""

from __future__ import annotations

import numpy as np


def _pair(lam, fx):
    lam = np.asarray(lam, dtype=float)
    fx = np.asarray(fx, dtype=float)
    if lam.shape[-1] != fx.shape[-1]:
        raise ValueError(f"dimension mismatch: {lam.shape[-1]} weights for {fx.shape[-1]} objectives")
    return lam, fx


def weighted_sum(lam, fx):
    lam, fx = _pair(lam, fx)
    return np.sum(lam * fx, axis=-1)


def lambda_from_mu(mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if not np.all(np.isfinite(mu)):
        raise ValueError("mu must be finite")
    e = np.exp(mu - np.max(mu, axis=-1, keepdims=True))
    return e / np.sum(e, axis=-1, keepdims=True)


def mu_from_lambda(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("log-weights need strictly positive weights")
    return np.log(lam)


def scalarized_cost_mu(mu, fx):
    """Weighted sum with softmax(mu) weights, stabilized against overflow."""
    mu, fx = _pair(mu, fx)
    return weighted_sum(lambda_from_mu(mu), fx)


def penalty_uniform(fx, means_f, R_c: float, r_c: float):
    """Cluster penalty ``sum_l R_c exp(-|f(x) - f(v_l)| / r_c)`` over the given means.

    ``fx`` may carry leading batch axes; ``means_f`` is ``(m, p)`` and should
    already exclude the particle's own swarm.
    """
    if r_c <= 0:
        raise ValueError("r_c must be positive")
    fx = np.asarray(fx, dtype=float)
    means_f = np.asarray(means_f, dtype=float).reshape(-1, fx.shape[-1])
    if len(means_f) == 0:
        return np.zeros(fx.shape[:-1]) if fx.ndim > 1 else 0.0
    dist = np.linalg.norm(fx[..., None, :] - means_f, axis=-1)
    return np.sum(R_c * np.exp(-dist / r_c), axis=-1)


def sample_simplex(p: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the standard simplex via sorted-uniform spacings."""
    if p < 1:
        raise ValueError("p must be at least 1")
    cuts = np.sort(rng.random(p - 1))
    return np.diff(np.concatenate([[0.0], cuts, [1.0]]))


def equidistant_weights(K: int, eps: float = 0.001) -> np.ndarray:
    """``K`` biobjective weights with first components evenly spaced on [eps, 1 - eps]."""
    if K < 2:
        raise ValueError("equidistant weights need K >= 2")
    if not 0 <= eps < 0.5:
        raise ValueError("eps must lie in [0, 0.5)")
    first = np.linspace(eps, 1.0 - eps, K)
    return np.stack([first, 1.0 - first], axis=-1)
