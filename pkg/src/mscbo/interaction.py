"""Pairwise swarm interactions that drive the adaptive weights.

Two swarms interact through the distance of their log-weights and the distance of
their consensus points in objective space. The default kernels are exponential
(Morse type); the ``gaussian`` kernel uses squared distances and is the smooth
variant for which the equilibrium spacing is the root of :func:`force_prefactor_u`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .scalarize import lambda_from_mu

KERNELS = ("exponential", "gaussian")


@dataclass(frozen=True)
class PotentialParams:
    R: float = 0.001
    A: float = 0.0
    r: float = 0.01
    a: float = 1.0
    R_f: float = 0.0001
    A_f: float = 0.0
    r_f: float = 1.0
    a_f: float = 1.0

    def __post_init__(self):
        for name in ("R", "A", "R_f", "A_f"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("r", "a", "r_f", "a_f"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _nonneg(d):
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    return d


def morse_potential(d, R, A, r, a):
    d = _nonneg(d)
    return R * np.exp(-d / r) - A * np.exp(-d / a)


def smoothed_potential(d, R, A, r, a):
    d = _nonneg(d)
    return R * np.exp(-(d**2) / r) - A * np.exp(-(d**2) / a)


def force_prefactor_u(d, params: PotentialParams):
    """Objective-space force prefactor of the smoothed kernel; negative means repulsion."""
    d = np.asarray(d, dtype=float)
    p = params
    return (2 * p.A_f / p.a_f) * np.exp(-(d**2) / p.a_f) - (2 * p.R_f / p.r_f) * np.exp(-(d**2) / p.r_f)


def d_min_root(params: PotentialParams, tol: float = 1e-10) -> Optional[float]:
    """Equilibrium spacing: the sign change of ``u`` from repulsion to attraction.

    Returns None when ``u`` keeps one sign on (0, D_max].
    """
    hi = 10.0 * max(math.sqrt(params.a_f), math.sqrt(params.r_f))
    lo = 0.0
    u_lo = float(force_prefactor_u(lo, params))
    u_hi = float(force_prefactor_u(hi, params))
    if not (u_lo < 0.0 < u_hi):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if force_prefactor_u(mid, params) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def force_coefficient(d, df, params: PotentialParams, kernel: str = "exponential",
                      c_rep: float = math.inf):
    """Scalar factor of the pairwise force; broadcasts over ``d`` and ``df``."""
    d = np.asarray(d, dtype=float)
    df = np.asarray(df, dtype=float)
    p = params
    if kernel == "exponential":
        sd, sdf = d, df
    elif kernel == "gaussian":
        sd, sdf = d**2, df**2
    else:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    weight_part = (p.A / p.a) * np.exp(-sd / p.a) - (p.R / p.r) * np.exp(-sd / p.r)
    obj_part = (p.A_f / p.a_f) * np.exp(-sdf / p.a_f) - (p.R_f / p.r_f) * np.exp(-sdf / p.r_f)
    obj_part = np.where(df < c_rep, obj_part, 0.0)
    return weight_part + obj_part


def pairwise_force(mu_k, mu_l, d_kl, df_kl, params: PotentialParams, kernel: str = "exponential",
                   c_rep: float = math.inf) -> np.ndarray:
    """Force exerted on swarm k by swarm l; zero when the log-weights coincide."""
    diff = np.asarray(mu_k, dtype=float) - np.asarray(mu_l, dtype=float)
    norm = np.linalg.norm(diff)
    if norm == 0.0:
        return np.zeros_like(diff)
    return force_coefficient(d_kl, df_kl, params, kernel, c_rep) * diff / norm


def neighbor_mask(mu) -> np.ndarray:
    """Adjacency of swarms that are direct neighbours after sorting by the first weight."""
    K = len(mu)
    order = np.argsort(lambda_from_mu(mu)[:, 0], kind="stable")
    mask = np.zeros((K, K), dtype=bool)
    mask[order[:-1], order[1:]] = True
    mask[order[1:], order[:-1]] = True
    return mask


def total_forces(mu, means_f, params: PotentialParams, kernel: str = "exponential",
                 c_rep: float = math.inf, neighbors_only: bool = False) -> np.ndarray:
    """``sum_{l != k} K(k, l)`` for every swarm k, shape ``(K, p)``."""
    mu = np.asarray(mu, dtype=float)
    means_f = np.asarray(means_f, dtype=float)
    diff = mu[:, None, :] - mu[None, :, :]
    d = np.linalg.norm(diff, axis=-1)
    df = np.linalg.norm(means_f[:, None, :] - means_f[None, :, :], axis=-1)
    coef = force_coefficient(d, df, params, kernel, c_rep)
    active = d > 0.0
    if neighbors_only:
        active &= neighbor_mask(mu)
    unit = np.divide(diff, d[..., None], out=np.zeros_like(diff), where=active[..., None])
    return np.sum(np.where(active, coef, 0.0)[..., None] * unit, axis=1)
