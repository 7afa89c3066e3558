"""Pareto dominance, nondominated sorting, crowding distance, and hypervolume.

All routines use the MINIMIZATION orientation: a vector ``a`` dominates ``b``
when ``a <= b`` componentwise with strict inequality in at least one
component.  Maximization problems should negate their objectives at the API
boundary.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "ParetoArchive",
    "dominates",
    "nondominated_filter",
    "fast_nondominated_sort",
    "crowding_distance",
    "hypervolume",
    "hypervolume_monte_carlo",
    "igd",
]


@dataclass(frozen=True)
class ParetoArchive:
    """A Pareto set / frontier pair: X holds designs, Y their objectives."""

    X: np.ndarray  # (P, d)
    Y: np.ndarray  # (P, K)

    def __post_init__(self):
        if self.X.shape[0] != self.Y.shape[0]:
            raise InvalidArgumentError("X and Y must have the same number of rows")


def dominates(a, b) -> bool:
    """True iff ``a`` Pareto-dominates ``b`` (minimization)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidArgumentError(f"shape mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def _nondominated_mask_2d(Y: np.ndarray) -> np.ndarray:
    # Sweep over groups of equal f1 in ascending order.  A point survives iff
    # it attains its group's minimal f2 and that value strictly beats every
    # point with smaller f1 (duplicates never dominate each other).
    n = Y.shape[0]
    order = np.lexsort((Y[:, 1], Y[:, 0]))
    mask = np.zeros(n, dtype=bool)
    best_f2 = np.inf
    i = 0
    while i < n:
        j = i
        f1 = Y[order[i], 0]
        while j < n and Y[order[j], 0] == f1:
            j += 1
        gmin = Y[order[i], 1]
        if gmin < best_f2:
            for t in range(i, j):
                if Y[order[t], 1] == gmin:
                    mask[order[t]] = True
            best_f2 = gmin
        i = j
    return mask


def _nondominated_mask_general(Y: np.ndarray) -> np.ndarray:
    n = Y.shape[0]
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        if not mask[i]:
            continue
        le = np.all(Y <= Y[i], axis=1)
        lt = np.any(Y < Y[i], axis=1)
        dominators = le & lt
        if np.any(dominators):
            mask[i] = False
    return mask


def nondominated_filter(Y) -> np.ndarray:
    """Indices (ascending) of rows of ``Y`` not dominated by any other row.

    Exactly equal rows do not dominate each other; duplicates are all kept.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[0] < 1:
        raise InvalidArgumentError("need at least one row")
    if Y.shape[1] == 2 and Y.shape[0] > 64:
        mask = _nondominated_mask_2d(Y)
    else:
        mask = _nondominated_mask_general(Y)
    return np.flatnonzero(mask)


def fast_nondominated_sort(Y) -> list[np.ndarray]:
    """Partition row indices of ``Y`` into rank-ordered nondominated fronts."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n = Y.shape[0]
    # dominated_by[i, j]: row i dominates row j
    le = np.all(Y[:, None, :] <= Y[None, :, :], axis=2)
    lt = np.any(Y[:, None, :] < Y[None, :, :], axis=2)
    dom = le & lt
    n_dominators = dom.sum(axis=0)
    fronts: list[np.ndarray] = []
    remaining = np.ones(n, dtype=bool)
    while np.any(remaining):
        current = np.flatnonzero(remaining & (n_dominators == 0))
        fronts.append(current)
        remaining[current] = False
        n_dominators = n_dominators - dom[current].sum(axis=0)
    return fronts


def crowding_distance(Yfront) -> np.ndarray:
    """NSGA-II crowding distance; boundary points per objective get +inf."""
    Y = np.atleast_2d(np.asarray(Yfront, dtype=float))
    p, K = Y.shape
    if p <= 2:
        return np.full(p, np.inf)
    dist = np.zeros(p)
    for k in range(K):
        order = np.argsort(Y[:, k], kind="stable")
        span = Y[order[-1], k] - Y[order[0], k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span <= 0:
            continue
        gaps = (Y[order[2:], k] - Y[order[:-2], k]) / span
        dist[order[1:-1]] += gaps
    return dist


def _hv_2d(Y: np.ndarray, ref: np.ndarray) -> float:
    idx = nondominated_filter(Y)
    P = np.unique(Y[idx], axis=0)
    order = np.argsort(P[:, 0], kind="stable")
    hv = 0.0
    prev_f2 = ref[1]
    for i in order:
        f1, f2 = P[i]
        hv += (prev_f2 - f2) * (ref[0] - f1)
        prev_f2 = f2
    return hv


def _hv_3d(Y: np.ndarray, ref: np.ndarray) -> float:
    # Sweep along the third objective: between consecutive z-levels the
    # dominated region is a prism over the 2D front of all points at or
    # below the lower level.
    idx = nondominated_filter(Y)
    P = np.unique(Y[idx], axis=0)
    z_levels = np.unique(P[:, 2])
    hv = 0.0
    for t, z in enumerate(z_levels):
        z_next = z_levels[t + 1] if t + 1 < len(z_levels) else ref[2]
        thickness = z_next - z
        if thickness <= 0:
            continue
        active = P[P[:, 2] <= z][:, :2]
        hv += _hv_2d(active, ref[:2]) * thickness
    return hv


def hypervolume_monte_carlo(Yfront, ref, n_samples: int = 10**6, rng=None):
    """Monte Carlo hypervolume estimate: returns (estimate, standard_error)."""
    Y = np.atleast_2d(np.asarray(Yfront, dtype=float))
    ref = np.asarray(ref, dtype=float)
    rng = np.random.default_rng(rng)
    lower = Y.min(axis=0)
    box_vol = float(np.prod(ref - lower))
    if box_vol <= 0:
        return 0.0, 0.0
    hits = 0
    chunk = 200_000
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        S = rng.uniform(lower, ref, size=(m, Y.shape[1]))
        dominated = np.zeros(m, dtype=bool)
        for y in Y:
            dominated |= np.all(S >= y, axis=1)
        hits += int(dominated.sum())
        done += m
    p = hits / n_samples
    est = box_vol * p
    se = box_vol * np.sqrt(p * (1 - p) / n_samples)
    return est, se


def hypervolume(Yfront, ref, n_samples: int = 10**6, rng=None) -> float:
    """Lebesgue measure of the union of boxes [y_i, ref] (minimization).

    Exact for K <= 3 (dimension sweep); Monte Carlo with ``n_samples``
    draws for K > 3.  Points that do not dominate ``ref`` are dropped with
    a warning.
    """
    Y = np.atleast_2d(np.asarray(Yfront, dtype=float))
    ref = np.asarray(ref, dtype=float)
    if Y.shape[1] != ref.shape[0]:
        raise InvalidArgumentError("front and reference point dimensions differ")
    keep = np.all(Y <= ref, axis=1)
    n_dropped = int((~keep).sum())
    if n_dropped:
        warnings.warn(f"hypervolume: excluded {n_dropped} point(s) not dominating the reference")
    Y = Y[keep]
    if Y.shape[0] == 0:
        warnings.warn("hypervolume: empty effective front")
        return 0.0
    K = Y.shape[1]
    if K == 1:
        return float(ref[0] - Y.min())
    if K == 2:
        return float(_hv_2d(Y, ref))
    if K == 3:
        return float(_hv_3d(Y, ref))
    est, _ = hypervolume_monte_carlo(Y, ref, n_samples=n_samples, rng=rng)
    return float(est)


def igd(reference_front, front) -> float:
    """Inverted generational distance from a reference front to ``front``."""
    R = np.atleast_2d(np.asarray(reference_front, dtype=float))
    F = np.atleast_2d(np.asarray(front, dtype=float))
    d2 = ((R[:, None, :] - F[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2.min(axis=1)).mean())
