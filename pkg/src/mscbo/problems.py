"""Benchmark multi-objective problems on boxes.

Every problem evaluates vectorized: ``x`` of shape ``(..., d)`` maps to
objectives of shape ``(..., p)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .indicators import EPS_DOM, nondominated_filter


@dataclass(frozen=True)
class Problem:
    name: str
    d: int
    p: int
    lower: np.ndarray
    upper: np.ndarray
    hv_ref: np.ndarray
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    # Maps a resolution to decision vectors sampling the known efficient set.
    efficient_set: Optional[Callable[[int], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("a problem needs at least two objectives")
        if self.lower.shape != (self.d,) or self.upper.shape != (self.d,):
            raise ValueError("bounds must have length d")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        if self.hv_ref.shape != (self.p,):
            raise ValueError("hv_ref must have length p")

    def evaluate(self, x) -> np.ndarray:
        return evaluate(self, x)

    def project(self, y) -> np.ndarray:
        return project(self, y)


@dataclass(frozen=True)
class ReferenceFront:
    points: np.ndarray  # (n, p), lexicographic by first objective
    x: np.ndarray  # (n, d) decision vectors that produced ``points``
    source: str  # "analytic" or "grid-oracle"


def _check_dim(problem: Problem, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if problem.d == 1 and x.ndim == 0:
        x = x.reshape(1)
    if x.shape[-1] != problem.d:
        raise ValueError(
            f"{problem.name} expects decision vectors of length {problem.d}, got {x.shape[-1]}"
        )
    return x


def evaluate(problem: Problem, x) -> np.ndarray:
    """Objective vector(s) ``f(x)``; ``x`` may be a single point or a batch."""
    return problem.func(_check_dim(problem, x))


def project(problem: Problem, y) -> np.ndarray:
    """Euclidean projection onto the box, i.e. a componentwise clamp."""
    y = _check_dim(problem, y)
    return np.clip(y, problem.lower, problem.upper)


def sample_uniform(problem: Problem, n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be at least 1")
    u = rng.random((n, problem.d))
    return problem.lower + u * (problem.upper - problem.lower)


def default_resolution(problem: Problem) -> int:
    return 2000 if problem.d == 1 else 400


def _grid(problem: Problem, resolution: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(problem.lower, problem.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def reference_front(problem: Problem, resolution: Optional[int] = None) -> ReferenceFront:
    """Non-dominated reference points for GD/IGD.

    Problems with a known efficient set are sampled along it; others fall back to
    a uniform grid over the box. Both are passed through the epsilon filter.
    """
    if resolution is None:
        resolution = default_resolution(problem)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if problem.efficient_set is not None:
        x = np.asarray(problem.efficient_set(resolution), dtype=float).reshape(-1, problem.d)
        source = "analytic"
    else:
        x = _grid(problem, resolution)
        source = "grid-oracle"
    fx = evaluate(problem, x)
    mask = nondominated_filter(fx, EPS_DOM)
    x, fx = x[mask], fx[mask]
    order = np.lexsort(fx.T[::-1])
    return ReferenceFront(points=fx[order], x=x[order], source=source)


# --- problem definitions -------------------------------------------------


def _schaffer1(x):
    x = x[..., 0]
    return np.stack([(x - 2.0) ** 2, 0.5 * x**2], axis=-1)


def _dent(x):
    x1, x2 = x[..., 0], x[..., 1]
    base = 0.5 * (np.sqrt(1.0 + (x1 + x2) ** 2) + np.sqrt(1.0 + (x1 - x2) ** 2))
    bump = 0.85 * np.exp(-((x1 - x2) ** 2))
    return np.stack([base + 0.5 * (x1 - x2) + bump, base - 0.5 * (x1 - x2) + bump], axis=-1)


def _schaffer2_f1(x):
    return np.select(
        [x <= 1.0, x <= 3.0, x <= 4.0],
        [-x, x - 2.0, 4.0 - x],
        default=x - 4.0,
    )


def _schaffer2(x):
    x = x[..., 0]
    return np.stack([_schaffer2_f1(x), (x - 5.0) ** 2], axis=-1)


def _three(x):
    x1, x2 = x[..., 0], x[..., 1]
    f1 = 2 * (x1 - 1) ** 2 + 2 * (x1 - 1) * (x2 - 1) + 4 * (x2 - 1) ** 2
    f2 = (x1 - 2) ** 2 + 4 * (x1 - 2) * (x2 - 3) + 8 * (x2 - 3) ** 2
    f3 = 4 * x1**2 + 2 * x1 * x2 + x2**2
    return np.stack([f1, f2, f3], axis=-1)


def _quadratic(x):
    x = x[..., 0]
    return np.stack([x**2 + 1.0, 0.5 * (x - 1.0) ** 2 + 1.0], axis=-1)


def _schaffer2_efficient(resolution: int) -> np.ndarray:
    left = resolution // 2
    return np.concatenate(
        [np.linspace(1.0, 2.0, left), np.linspace(4.0, 5.0, resolution - left)]
    )[:, None]


def quadratic_argmin(lam1) -> np.ndarray:
    """Closed-form minimizer of ``lam1 * f1 + (1 - lam1) * f2`` for the quadratic problem."""
    lam1 = np.asarray(lam1, dtype=float)
    return (1.0 - lam1) / (1.0 + lam1)


_REGISTRY: dict[str, Problem] = {}


def register(problem: Problem) -> Problem:
    key = problem.name.lower()
    if key in _REGISTRY:
        raise ValueError(f"problem {key!r} is already registered")
    _REGISTRY[key] = problem
    return problem


def get_problem(name: str) -> Problem:
    try:
        return _REGISTRY[name.lower()]
    except KeyError:
        raise KeyError(
            f"unknown problem {name!r}; registered problems: {', '.join(problem_names())}"
        ) from None


def problem_names() -> list[str]:
    return sorted(_REGISTRY)


def _arr(*v) -> np.ndarray:
    return np.array(v, dtype=float)


SCHAFFER1 = register(
    Problem(
        "schaffer1", 1, 2, _arr(0.0), _arr(2.0), _arr(4.0, 2.0), _schaffer1,
        efficient_set=lambda n: np.linspace(0.0, 2.0, n)[:, None],
    )
)
DENT = register(Problem("dent", 2, 2, _arr(-2.0, -2.0), _arr(2.0, 2.0), _arr(5.0, 5.0), _dent))
SCHAFFER2 = register(
    Problem(
        "schaffer2", 1, 2, _arr(-5.0), _arr(10.0), _arr(1.0, 16.0), _schaffer2,
        efficient_set=_schaffer2_efficient,
    )
)
THREE = register(
    Problem("three", 2, 3, _arr(-0.5, -0.5), _arr(3.5, 3.5), _arr(25.0, 80.0, 50.0), _three)
)
# Strictly convex biobjective example with a closed-form efficient set x in [0, 1].
QUADRATIC = register(
    Problem(
        "quadratic", 1, 2, _arr(-1.0), _arr(2.0), _arr(5.0, 3.0), _quadratic,
        efficient_set=lambda n: np.linspace(0.0, 1.0, n)[:, None],
    )
)
