"""Multi-swarm consensus-based optimization steppers.

Each swarm drifts toward its own consensus point, a softmin-weighted mean of its
particles under a scalarized cost. Three variants build on one another:

``fixed``
    constant scalarization weights, anisotropic noise ``sigma * sqrt(tau) * (X - v) * W``;
``adaptive``
    log-weights ``mu`` repel each other through :mod:`mscbo.interaction`;
``full``
    adaptive weights, a cluster penalty in the consensus weights, and sampling noise
    ``sigma * sqrt(tau * |X - v|) * W`` that keeps swarms from collapsing.

Cross-swarm quantities are always read from the state at the start of the step, so
results do not depend on the order in which swarms are visited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .indicators import EPS_DOM, ParetoApproximation
from .interaction import KERNELS, PotentialParams, total_forces
from .problems import Problem, evaluate, sample_uniform
from .scalarize import (
    equidistant_weights,
    lambda_from_mu,
    mu_from_lambda,
    penalty_uniform,
    sample_simplex,
    weighted_sum,
)

VARIANTS = ("fixed", "adaptive", "full")
WEIGHT_INITS = ("auto", "equidistant", "simplex-uniform", "explicit")
INTERACTIONS = ("all", "neighbors")

_INIT_STREAM = 0
_NOISE_STREAM = 1


@dataclass(frozen=True)
class RunConfig:
    K: int = 30
    N_bar: int = 20
    tau: float = 0.1
    T: float = 5.0
    # Coefficient of the drift toward the consensus point; 1 in all reported runs.
    drift_coefficient: float = 1.0
    sigma: float = 0.1
    alpha: float = 100.0
    beta: float = 10.0
    potential: PotentialParams = field(default_factory=PotentialParams)
    R_c: float = 1.0
    r_c: float = 0.1
    variant: str = "full"
    seed: int = 0
    # "auto" picks equidistant weights for two objectives, simplex-uniform otherwise.
    weight_init: str = "auto"
    weights: Optional[tuple] = None
    weight_eps: float = 0.001
    eps_dom: float = EPS_DOM
    interaction: str = "all"
    kernel: str = "exponential"
    c_rep: float = math.inf
    # Extra factor on the explicit weight update mu <- mu - scale * tau / K * sum K(k, l).
    weight_scale: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.K >= 1, "K must be at least 1"),
            (self.N_bar >= 1, "N_bar must be at least 1"),
            (self.tau > 0, "tau must be positive"),
            (self.T >= self.tau, "T must be at least tau"),
            (self.sigma >= 0, "sigma must be non-negative"),
            (self.alpha > 0, "alpha must be positive"),
            (self.beta >= 0, "beta must be non-negative"),
            (self.R_c >= 0, "R_c must be non-negative"),
            (self.r_c > 0, "r_c must be positive"),
            (self.eps_dom >= 0, "eps_dom must be non-negative"),
            (self.c_rep > 0, "c_rep must be positive"),
            (self.weight_scale >= 0, "weight_scale must be non-negative"),
            (0 <= self.weight_eps < 0.5, "weight_eps must lie in [0, 0.5)"),
            (0 <= self.seed < 2**64, "seed must be a 64-bit unsigned integer"),
            (self.variant in VARIANTS, f"variant must be one of {', '.join(VARIANTS)}"),
            (self.weight_init in WEIGHT_INITS, f"weight_init must be one of {', '.join(WEIGHT_INITS)}"),
            (self.interaction in INTERACTIONS, f"interaction must be one of {', '.join(INTERACTIONS)}"),
            (self.kernel in KERNELS, f"kernel must be one of {', '.join(KERNELS)}"),
        ]
        for ok, message in checks:
            if not ok:
                raise ValueError(message)
        if self.weight_init == "explicit":
            if self.weights is None or len(self.weights) != self.K:
                raise ValueError("explicit weight_init needs one weight vector per swarm")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.T / self.tau - 1e-9))


@dataclass
class SwarmSystemState:
    positions: np.ndarray  # (K, N, d)
    fx: np.ndarray  # (K, N, p), objectives of ``positions``
    mu: np.ndarray  # (K, p) log-weights
    means: np.ndarray  # (K, d) consensus points
    means_f: np.ndarray  # (K, p)
    t: float = 0.0
    step: int = 0

    @property
    def lam(self) -> np.ndarray:
        return lambda_from_mu(self.mu)


@dataclass
class Diagnostics:
    E: np.ndarray  # (K, d) swarm centroids
    V: np.ndarray  # (K,) mean distance to the centroid
    M: np.ndarray  # (K,) mean of exp(-alpha * cost)
    pairwise_df: np.ndarray  # (K, K) objective-space distances between consensus points


class NoiseStream:
    """Counter-based random streams keyed by (seed, purpose, step, swarm).

    Every (step, swarm) pair gets its own Philox counter block, so the Gaussian
    increments of one swarm never depend on how many draws another swarm made.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)

    def generator(self, purpose: int, step: int = 0, swarm: int = 0) -> np.random.Generator:
        counter = np.array([0, purpose, step, swarm], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.seed, counter=counter))

    def init_generator(self) -> np.random.Generator:
        return self.generator(_INIT_STREAM)

    def normals(self, step: int, K: int, N: int, d: int) -> np.ndarray:
        return np.stack(
            [self.generator(_NOISE_STREAM, step, k).standard_normal((N, d)) for k in range(K)]
        )


# --- consensus points ----------------------------------------------------------


def _softmin_mean(positions: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    # Shift by the max exponent per swarm: the largest weight is exactly 1.
    w = np.exp(exponents - np.max(exponents, axis=-1, keepdims=True))
    return np.sum(w[..., None] * positions, axis=-2) / np.sum(w, axis=-1)[..., None]


def weighted_mean(positions_k, costs_k, alpha: float) -> np.ndarray:
    """Consensus point ``sum_j X_j exp(-alpha c_j) / sum_j exp(-alpha c_j)`` of one swarm."""
    positions_k = np.asarray(positions_k, dtype=float)
    costs_k = np.asarray(costs_k, dtype=float)
    return _softmin_mean(positions_k, -alpha * costs_k)


def weighted_mean_penalized(positions_k, costs_k, penalties_k, alpha: float, beta: float) -> np.ndarray:
    positions_k = np.asarray(positions_k, dtype=float)
    exponents = -alpha * np.asarray(costs_k, dtype=float) - beta * np.asarray(penalties_k, dtype=float)
    return _softmin_mean(positions_k, exponents)


def _penalties(fx: np.ndarray, targets_f: np.ndarray, cfg: RunConfig) -> np.ndarray:
    """Cluster penalty of every particle against the other swarms' consensus objectives."""
    K = fx.shape[0]
    out = np.empty(fx.shape[:2])
    for k in range(K):
        others = np.delete(targets_f, k, axis=0)
        out[k] = penalty_uniform(fx[k], others, cfg.R_c, cfg.r_c)
    return out


def consensus_points(positions, fx, mu, cfg: RunConfig, targets_f=None) -> np.ndarray:
    """Consensus point of every swarm; penalized when ``targets_f`` is given."""
    costs = weighted_sum(lambda_from_mu(mu)[:, None, :], fx)
    exponents = -cfg.alpha * costs
    if targets_f is not None and cfg.beta > 0:
        exponents = exponents - cfg.beta * _penalties(fx, targets_f, cfg)
    return _softmin_mean(positions, exponents)


# --- state construction -------------------------------------------------------


def initial_weights(problem: Problem, cfg: RunConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.weight_init == "explicit":
        lam = np.asarray(cfg.weights, dtype=float)
        if lam.shape != (cfg.K, problem.p):
            raise ValueError(f"explicit weights must have shape ({cfg.K}, {problem.p})")
        return lam / lam.sum(axis=1, keepdims=True)
    scheme = cfg.weight_init
    if scheme == "auto":
        scheme = "equidistant" if problem.p == 2 else "simplex-uniform"
    if scheme == "equidistant":
        if problem.p != 2:
            raise ValueError("equidistant weights are only defined for two objectives")
        if cfg.K == 1:
            return np.array([[0.5, 0.5]])
        return equidistant_weights(cfg.K, cfg.weight_eps)
    return np.stack([sample_simplex(problem.p, rng) for _ in range(cfg.K)])


def initial_state(problem: Problem, cfg: RunConfig, noise: Optional[NoiseStream] = None) -> SwarmSystemState:
    noise = noise or NoiseStream(cfg.seed)
    rng = noise.init_generator()
    positions = sample_uniform(problem, cfg.K * cfg.N_bar, rng).reshape(cfg.K, cfg.N_bar, problem.d)
    mu = mu_from_lambda(initial_weights(problem, cfg, rng))
    return make_state(problem, cfg, positions, mu)


def make_state(problem: Problem, cfg: RunConfig, positions, mu, t: float = 0.0, step: int = 0) -> SwarmSystemState:
    """State with freshly computed caches (unpenalized consensus points)."""
    positions = np.asarray(positions, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if positions.ndim != 3 or positions.shape[2] != problem.d:
        raise ValueError(f"positions must have shape (K, N, {problem.d})")
    if mu.shape != (positions.shape[0], problem.p):
        raise ValueError(f"mu must have shape ({positions.shape[0]}, {problem.p})")
    fx = evaluate(problem, positions)
    means = consensus_points(positions, fx, mu, cfg)
    return SwarmSystemState(positions, fx, mu, means, evaluate(problem, means), t, step)


# --- steppers ------------------------------------------------------------------


def _check(state: SwarmSystemState, problem: Problem, cfg: RunConfig, variant: str) -> None:
    if cfg.variant != variant:
        raise ValueError(f"config variant is {cfg.variant!r}, stepper expects {variant!r}")
    K, N, d = state.positions.shape
    if d != problem.d or state.mu.shape != (K, problem.p):
        raise ValueError("state does not match the problem dimensions")
    if K != cfg.K or N != cfg.N_bar:
        raise ValueError("state does not match the configured swarm sizes")


def _advance(state, problem, cfg, noise, *, adapt: bool, penalize: bool, sampling_noise: bool):
    X, fx, mu = state.positions, state.fx, state.mu
    K, N, d = X.shape

    targets = state.means_f if penalize else None
    v = consensus_points(X, fx, mu, cfg, targets)
    v_f = evaluate(problem, v)

    dev = X - v[:, None, :]
    W = noise.normals(state.step, K, N, d)
    if sampling_noise:
        diffusion = cfg.sigma * np.sqrt(cfg.tau * np.abs(dev)) * W
    else:
        diffusion = cfg.sigma * math.sqrt(cfg.tau) * dev * W
    X_new = np.clip(X - cfg.tau * cfg.drift_coefficient * dev + diffusion, problem.lower, problem.upper)
    fx_new = evaluate(problem, X_new)

    if adapt and K > 1:
        force = total_forces(
            mu, v_f, cfg.potential, cfg.kernel, cfg.c_rep,
            neighbors_only=cfg.interaction == "neighbors",
        )
        mu_new = mu - cfg.weight_scale * (cfg.tau / K) * force
    else:
        mu_new = mu.copy()

    means = consensus_points(X_new, fx_new, mu_new, cfg, v_f if penalize else None)
    return SwarmSystemState(
        X_new, fx_new, mu_new, means, evaluate(problem, means),
        t=state.t + cfg.tau, step=state.step + 1,
    )


def step_fixed(state, problem, cfg, noise):
    _check(state, problem, cfg, "fixed")
    return _advance(state, problem, cfg, noise, adapt=False, penalize=False, sampling_noise=False)


def step_adaptive(state, problem, cfg, noise):
    _check(state, problem, cfg, "adaptive")
    return _advance(state, problem, cfg, noise, adapt=True, penalize=False, sampling_noise=False)


def step_full(state, problem, cfg, noise):
    _check(state, problem, cfg, "full")
    return _advance(state, problem, cfg, noise, adapt=True, penalize=True, sampling_noise=True)


STEPPERS = {"fixed": step_fixed, "adaptive": step_adaptive, "full": step_full}


def step(state, problem, cfg, noise):
    return STEPPERS[cfg.variant](state, problem, cfg, noise)


# --- diagnostics and driver ------------------------------------------------------


def diagnostics(state: SwarmSystemState, problem: Problem, alpha: float) -> Diagnostics:
    X = state.positions
    E = X.mean(axis=1)
    V = np.linalg.norm(X - E[:, None, :], axis=-1).mean(axis=1)
    costs = weighted_sum(state.lam[:, None, :], state.fx)
    M = np.exp(-alpha * costs).mean(axis=1)
    pairwise_df = np.linalg.norm(state.means_f[:, None, :] - state.means_f[None, :, :], axis=-1)
    return Diagnostics(E=E, V=V, M=M, pairwise_df=pairwise_df)


def approximation(state: SwarmSystemState, eps_dom: float = EPS_DOM) -> ParetoApproximation:
    """All final particles followed by all consensus points, dominance-flagged."""
    K, N, d = state.positions.shape
    x = np.concatenate([state.positions.reshape(K * N, d), state.means])
    fx = np.concatenate([state.fx.reshape(K * N, -1), state.means_f])
    origin = np.array(["particle"] * (K * N) + ["mean"] * K)
    swarm = np.concatenate([np.repeat(np.arange(K), N), np.arange(K)])
    j = np.concatenate([np.tile(np.arange(N), K), np.full(K, -1)])
    return ParetoApproximation.build(x, fx, origin, swarm, j, eps_dom)


@dataclass
class RunResult:
    state: SwarmSystemState
    trace: list  # Diagnostics per step, index 0 is the initial state
    weights: np.ndarray  # (n_steps + 1, K, p) simplex weights per step
    approximation: ParetoApproximation


def run(problem: Problem, cfg: RunConfig) -> RunResult:
    noise = NoiseStream(cfg.seed)
    state = initial_state(problem, cfg, noise)
    trace = [diagnostics(state, problem, cfg.alpha)]
    weights = [state.lam]
    stepper = STEPPERS[cfg.variant]
    for _ in range(cfg.n_steps):
        state = stepper(state, problem, cfg, noise)
        trace.append(diagnostics(state, problem, cfg.alpha))
        weights.append(state.lam)
    return RunResult(state, trace, np.stack(weights), approximation(state, cfg.eps_dom))


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    return replace(cfg, **changes)
