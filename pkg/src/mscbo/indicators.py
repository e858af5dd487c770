"""Dominance filtering and front quality indicators (GD, IGD, hypervolume)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

EPS_DOM = 1e-5


def dominates(z1, z2, eps_dom: float = EPS_DOM) -> bool:
    """True iff ``z1`` is no worse everywhere and better than ``z2 - eps_dom`` somewhere."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if z1.shape != z2.shape:
        raise ValueError(f"dimension mismatch: {z1.shape} vs {z2.shape}")
    return bool(np.all(z1 <= z2) and np.any(z1 < z2 - eps_dom))


def _filter_2d(z: np.ndarray, eps_dom: float) -> np.ndarray:
    # A point q is dominated iff some z has
    #   z1 < q1 - eps and z2 <= q2, or
    #   z1 <= q1      and z2 < q2 - eps.
    # Both reduce to prefix minima of f2 over points sorted by f1.
    order = np.argsort(z[:, 0], kind="stable")
    f1 = z[order, 0]
    prefmin = np.minimum.accumulate(z[order, 1])
    q1, q2 = z[:, 0], z[:, 1]

    idx_a = np.searchsorted(f1, q1 - eps_dom, side="left")
    case_a = (idx_a > 0) & (prefmin[np.maximum(idx_a - 1, 0)] <= q2)

    idx_b = np.searchsorted(f1, q1, side="right")
    case_b = prefmin[idx_b - 1] < q2 - eps_dom
    return ~(case_a | case_b)


def _strict_case_3d(z: np.ndarray, i: int, eps_dom: float, block: int = 512) -> np.ndarray:
    """For each q: is there a point with z_i < q_i - eps and z_j <= q_j, z_k <= q_k?

    Points are swept in order of z_i. Completed blocks are summarized by a (z_j, z_k)
    staircase; the partially eligible block is checked pairwise.
    """
    j, k = [c for c in range(3) if c != i]
    order = np.argsort(z[:, i], kind="stable")
    zs = z[order]
    n = len(z)
    limit = np.searchsorted(zs[:, i], z[:, i] - eps_dom, side="left")  # eligible prefix length
    out = np.zeros(n, dtype=bool)
    stair_j = np.empty(0)
    stair_k = np.empty(0)
    by_limit = np.argsort(limit, kind="stable")
    lim_sorted = limit[by_limit]
    for start in range(0, n, block):
        stop = min(start + block, n)
        lo = np.searchsorted(lim_sorted, start, side="right")
        hi = np.searchsorted(lim_sorted, stop, side="right")
        queries = by_limit[lo:hi]
        if len(queries):
            q = z[queries]
            hit = np.zeros(len(queries), dtype=bool)
            if len(stair_j):
                idx = np.searchsorted(stair_j, q[:, j], side="right")
                hit = (idx > 0) & (stair_k[np.maximum(idx - 1, 0)] <= q[:, k])
            part = zs[start:stop]
            eligible = np.arange(stop - start)[None, :] < (limit[queries] - start)[:, None]
            inside = (part[None, :, j] <= q[:, None, j]) & (part[None, :, k] <= q[:, None, k])
            out[queries] = hit | np.any(eligible & inside, axis=1)
        # Fold the finished block into the staircase of prefix minima.
        merged_j = np.concatenate([stair_j, zs[start:stop, j]])
        merged_k = np.concatenate([stair_k, zs[start:stop, k]])
        srt = np.lexsort((merged_k, merged_j))
        merged_j, merged_k = merged_j[srt], np.minimum.accumulate(merged_k[srt])
        last = np.append(merged_j[:-1] != merged_j[1:], True)
        merged_j, merged_k = merged_j[last], merged_k[last]
        drops = np.append(True, merged_k[1:] < merged_k[:-1])
        stair_j, stair_k = merged_j[drops], merged_k[drops]
    return out


def _filter_3d(z: np.ndarray, eps_dom: float) -> np.ndarray:
    dominated = np.zeros(len(z), dtype=bool)
    for i in range(3):
        dominated |= _strict_case_3d(z, i, eps_dom)
    return ~dominated


def _dominated_by_any(cand: np.ndarray, by: np.ndarray, eps_dom: float) -> np.ndarray:
    le = np.all(by[None, :, :] <= cand[:, None, :], axis=2)
    lt = np.any(by[None, :, :] < cand[:, None, :] - eps_dom, axis=2)
    return np.any(le & lt, axis=1)


def _filter_nd(z: np.ndarray, eps_dom: float, chunk: int = 256) -> np.ndarray:
    # Any dominator has a smaller objective sum, so sweeping in sum order lets each
    # chunk be checked against the non-dominated archive plus its own tie region.
    n = len(z)
    sums = z.sum(axis=1)
    order = np.argsort(sums, kind="stable")
    zs, ss = z[order], sums[order]
    keep = np.zeros(n, dtype=bool)
    archive = np.empty((0, z.shape[1]))
    for s in range(0, n, chunk):
        e = min(s + chunk, n)
        e2 = int(np.searchsorted(ss, ss[e - 1], side="right"))
        cand = zs[s:e]
        dom = _dominated_by_any(cand, zs[s:e2], eps_dom)
        if len(archive):
            undecided = ~dom
            if undecided.any():
                dom[undecided] = _dominated_by_any(cand[undecided], archive, eps_dom)
        keep[s:e] = ~dom
        if (~dom).any():
            archive = np.concatenate([archive, cand[~dom]])
    mask = np.empty(n, dtype=bool)
    mask[order] = keep
    return mask


def nondominated_filter(points, eps_dom: float = EPS_DOM) -> np.ndarray:
    """Boolean mask of the points not dominated by any other point."""
    z = np.asarray(points, dtype=float)
    if z.ndim != 2 or len(z) == 0:
        raise ValueError("nondominated_filter needs a non-empty (n, p) array")
    if eps_dom < 0:
        raise ValueError("eps_dom must be non-negative")
    if z.shape[1] == 2:
        return _filter_2d(z, eps_dom)
    if z.shape[1] == 3:
        return _filter_3d(z, eps_dom)
    return _filter_nd(z, eps_dom)


def _as_points(obj) -> np.ndarray:
    pts = getattr(obj, "points", obj)
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("point sets must be non-empty (n, p) arrays")
    return pts


def gd(approx, reference) -> float:
    """Mean distance from each approximation point to its nearest reference point."""
    a, r = _as_points(approx), _as_points(reference)
    dist, _ = cKDTree(r).query(a)
    return float(np.mean(dist))


def igd(approx, reference) -> float:
    """Mean distance from each reference point to its nearest approximation point."""
    return gd(reference, approx)


def _hv2d(z: np.ndarray, ref: np.ndarray) -> float:
    if len(z) == 0:
        return 0.0
    order = np.lexsort((z[:, 1], z[:, 0]))
    f1, f2 = z[order, 0], z[order, 1]
    prev = np.minimum.accumulate(np.concatenate([[ref[1]], f2[:-1]]))
    heights = np.maximum(prev - f2, 0.0)
    return float(np.sum((ref[0] - f1) * heights))


def _hv3d(z: np.ndarray, ref: np.ndarray) -> float:
    if len(z) == 0:
        return 0.0
    order = np.argsort(z[:, 2], kind="stable")
    z = z[order]
    levels = np.append(z[:, 2], ref[2])
    total = 0.0
    for i in range(len(z)):
        depth = levels[i + 1] - levels[i]
        if depth > 0:
            total += _hv2d(z[: i + 1, :2], ref[:2]) * depth
    return total


def hypervolume(points, ref_point) -> float:
    """Exact dominated hypervolume for two or three objectives.

    Points are clipped to the reference point first, so anything beyond it in some
    coordinate adds nothing.
    """
    ref = np.asarray(ref_point, dtype=float)
    z = np.asarray(points, dtype=float).reshape(-1, ref.size)
    p = ref.size
    if p not in (2, 3):
        raise ValueError(f"exact hypervolume supports 2 or 3 objectives, got {p}")
    z = np.minimum(z, ref)
    z = z[np.all(z < ref, axis=1)]
    if len(z) == 0:
        return 0.0
    z = z[nondominated_filter(z, 0.0)]
    return _hv2d(z, ref) if p == 2 else _hv3d(z, ref)


def hv_monte_carlo(points, ref_point, lower_corner, n_samples: int, rng: np.random.Generator,
                   chunk: int = 20000) -> tuple[float, float]:
    """Monte-Carlo hypervolume estimate and its binomial standard error."""
    ref = np.asarray(ref_point, dtype=float)
    lo = np.asarray(lower_corner, dtype=float)
    z = np.asarray(points, dtype=float).reshape(-1, ref.size)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if lo.shape != ref.shape or np.any(lo > ref):
        raise ValueError("lower_corner must lie below ref_point")
    volume = float(np.prod(ref - lo))
    hits = 0
    for s in range(0, n_samples, chunk):
        m = min(chunk, n_samples - s)
        u = lo + rng.random((m, ref.size)) * (ref - lo)
        if len(z):
            hits += int(np.count_nonzero(np.any(np.all(z[None, :, :] <= u[:, None, :], axis=2), axis=1)))
    frac = hits / n_samples
    return volume * frac, volume * np.sqrt(frac * (1.0 - frac) / n_samples)


@dataclass
class ParetoApproximation:
    x: np.ndarray  # (n, d)
    fx: np.ndarray  # (n, p)
    origin: np.ndarray  # "particle" or "mean"
    swarm: np.ndarray
    j: np.ndarray  # particle index within the swarm, -1 for means
    nondominated: np.ndarray

    def __len__(self):
        return len(self.fx)

    @classmethod
    def build(cls, x, fx, origin, swarm, j, eps_dom: float = EPS_DOM) -> "ParetoApproximation":
        fx = np.asarray(fx, dtype=float)
        return cls(
            x=np.asarray(x, dtype=float),
            fx=fx,
            origin=np.asarray(origin),
            swarm=np.asarray(swarm, dtype=int),
            j=np.asarray(j, dtype=int),
            nondominated=nondominated_filter(fx, eps_dom),
        )

    @property
    def front(self) -> np.ndarray:
        return self.fx[self.nondominated]


@dataclass(frozen=True)
class IndicatorReport:
    gd: float
    igd: float
    hv: float
    ni: int

    def as_dict(self) -> dict:
        return {"gd": self.gd, "igd": self.igd, "hv": self.hv, "ni": self.ni}


def report(approx: ParetoApproximation, reference, ref_point) -> IndicatorReport:
    """Indicators of the non-dominated part of ``approx``."""
    front = approx.front
    return IndicatorReport(
        gd=gd(front, reference),
        igd=igd(front, reference),
        hv=hypervolume(front, ref_point),
        ni=int(np.count_nonzero(approx.nondominated)),
    )
