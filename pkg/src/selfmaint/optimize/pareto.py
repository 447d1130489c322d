"""Dominance, non-dominated sorting, crowding distance and hypervolume.

Points are ``(reliability, cost)`` pairs: reliability is maximised, cost
minimised.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    return a[0] >= b[0] and a[1] <= b[1] and (a[0] > b[0] or a[1] < b[1])


def _as_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    return arr.reshape(-1, 2)


def domination_matrix(points) -> np.ndarray:
    """``D[i, j]`` is True when point i dominates point j."""
    p = _as_array(points)
    r, c = p[:, 0], p[:, 1]
    ge = r[:, None] >= r[None, :]
    le = c[:, None] <= c[None, :]
    strict = (r[:, None] > r[None, :]) | (c[:, None] < c[None, :])
    return ge & le & strict


def fast_non_dominated_sort(points) -> list[list[int]]:
    """Partition point indices into successive non-dominated fronts."""
    p = _as_array(points)
    n = len(p)
    if n == 0:
        return []
    dom = domination_matrix(p)
    dominated_by = dom.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    fronts = []
    while remaining.any():
        front = np.flatnonzero(remaining & (dominated_by == 0))
        fronts.append(front.tolist())
        remaining[front] = False
        dominated_by = dominated_by - dom[front].sum(axis=0)
    return fronts


def crowding_distance(front) -> np.ndarray:
    """Crowding distance of every point of one front.

    Boundary points of each objective get ``inf``; interior points sum the
    normalised gap between their two neighbours over both objectives.
    """
    p = _as_array(front)
    n = len(p)
    if n == 0:
        raise ValueError("crowding distance of an empty front")
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for m in range(p.shape[1]):
        order = np.argsort(p[:, m], kind="stable")
        values = p[order, m]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = values[-1] - values[0]
        if span <= 0:
            continue
        dist[order[1:-1]] += (values[2:] - values[:-2]) / span
    return dist


def pareto_indices(points) -> list[int]:
    """Indices of the non-dominated points, in O(n log n).

    Equal points do not dominate each other, so all copies are kept.
    """
    p = _as_array(points)
    if len(p) == 0:
        return []
    order = np.lexsort((-p[:, 0], p[:, 1]))
    keep = []
    best_r = -np.inf
    last = None
    for idx in order:
        r, c = p[idx]
        if last is not None and r == last[0] and c == last[1]:
            keep.append(int(idx))
        elif r > best_r:
            keep.append(int(idx))
            best_r = r
            last = (r, c)
    return sorted(keep)


def hypervolume(points, ref_cost: float, ref_reliability: float = 0.0) -> float:
    """Area dominated by ``points`` and bounded by ``(ref_reliability, ref_cost)``."""
    p = _as_array(points)
    p = p[(p[:, 0] > ref_reliability) & (p[:, 1] < ref_cost)]
    if len(p) == 0:
        return 0.0
    p = p[np.lexsort((-p[:, 0], p[:, 1]))]
    area = 0.0
    best = ref_reliability
    for r, c in p:
        if r > best:
            area += (r - best) * (ref_cost - c)
            best = r
    return float(area)
