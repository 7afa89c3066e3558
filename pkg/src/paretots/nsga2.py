"""A self-contained elitist NSGA-II solver with SBX and polynomial mutation.

Used as the inner solver over posterior sample paths, where the objective
is cheap and evaluated in per-generation batches.  Minimization throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .gp import DesignSpace
from .pareto import ParetoArchive, crowding_distance, fast_nondominated_sort, nondominated_filter

__all__ = ["EAConfig", "sbx_crossover", "polynomial_mutation", "nsga2_run"]


@dataclass(frozen=True)
class EAConfig:
    pop_size: int = 100
    generations: int = 100
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    mutation_prob: float | None = None  # defaults to 1/d
    mutation_eta: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2 or self.pop_size % 2 != 0:
            raise InvalidArgumentError("pop_size must be even and >= 2")
        if self.generations < 1:
            raise InvalidArgumentError("generations must be >= 1")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if v is not None and not (0.0 <= v <= 1.0):
                raise InvalidArgumentError(f"{name} must lie in [0, 1]")


def sbx_crossover(p1, p2, cfg: EAConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover; children are clamped to no-op when
    crossover_prob = 0 and always equal the parents when p1 == p2."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    rng = np.random.default_rng(rng)
    if rng.uniform() >= cfg.crossover_prob:
        return p1.copy(), p2.copy()
    u = rng.uniform(size=p1.shape)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (cfg.crossover_eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (cfg.crossover_eta + 1.0)),
    )
    # per-gene exchange with probability 0.5, as in the canonical operator
    swap = rng.uniform(size=p1.shape) < 0.5
    beta = np.where(swap, beta, 1.0)
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1, c2


def polynomial_mutation(x, space: DesignSpace, cfg: EAConfig, rng) -> np.ndarray:
    """Bounded polynomial mutation (Deb); stays within the design space."""
    x = np.asarray(x, dtype=float).copy()
    rng = np.random.default_rng(rng)
    d = x.shape[0]
    prob = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / d
    lo, hi = space.lower, space.upper
    span = hi - lo
    do = rng.uniform(size=d) < prob
    if not np.any(do):
        return x
    u = rng.uniform(size=d)
    delta1 = (x - lo) / span
    delta2 = (hi - x) / span
    mut_pow = 1.0 / (cfg.mutation_eta + 1.0)
    with np.errstate(invalid="ignore"):
        val_lo = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - delta1) ** (cfg.mutation_eta + 1.0)
        val_hi = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - delta2) ** (cfg.mutation_eta + 1.0)
        deltaq = np.where(u <= 0.5, val_lo**mut_pow - 1.0, 1.0 - val_hi**mut_pow)
    x = np.where(do, x + deltaq * span, x)
    return np.clip(x, lo, hi)


def _rank_and_crowding(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    finite = np.all(np.isfinite(Y), axis=1)
    n = Y.shape[0]
    rank = np.full(n, np.inf)
    crowd = np.zeros(n)
    idx_finite = np.flatnonzero(finite)
    if idx_finite.size:
        fronts = fast_nondominated_sort(Y[idx_finite])
        for r, front in enumerate(fronts):
            ids = idx_finite[front]
            rank[ids] = r
            crowd[ids] = crowding_distance(Y[ids])
    n_bad = n - idx_finite.size
    if n_bad:
        warnings.warn(f"nsga2: quarantined {n_bad} non-finite objective row(s)")
        rank[~finite] = np.inf
    return rank, crowd


def _tournament(rank, crowd, rng, n_picks):
    n = rank.shape[0]
    a = rng.integers(0, n, size=n_picks)
    b = rng.integers(0, n, size=n_picks)
    better_a = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] > crowd[b]))
    return np.where(better_a, a, b)


def _survival(Y: np.ndarray, pop_size: int) -> np.ndarray:
    rank, crowd = _rank_and_crowding(Y)
    # rank ascending, crowding descending, index ascending for determinism
    order = np.lexsort((np.arange(Y.shape[0]), -crowd, rank))
    return order[:pop_size]


def nsga2_run(objectives, space: DesignSpace, cfg: EAConfig,
              archive_all: bool = False,
              inject_points: np.ndarray | None = None,
              gen_callback=None) -> ParetoArchive:
    """Run NSGA-II on a batched vector objective ((P, d) -> (P, K)).

    ``inject_points`` seeds up to 10% of the initial population with given
    designs (clamped to bounds).  ``gen_callback(gen, pop_Y, archive_Y)``
    is invoked after every generation with the current population
    objectives and the nondominated set of all points evaluated so far.
    Returns the nondominated subset of the final population, or of every
    evaluated point when ``archive_all`` is set.
    """
    rng = np.random.default_rng(cfg.seed)
    d = space.dim
    pop = cfg.pop_size
    X = space.from_unit(rng.uniform(size=(pop, d)))
    if inject_points is not None and len(inject_points):
        k = min(len(inject_points), max(1, pop // 10))
        X[:k] = np.clip(np.atleast_2d(inject_points)[:k], space.lower, space.upper)
    Y = np.atleast_2d(np.asarray(objectives(X), dtype=float))

    all_X = [X]
    all_Y = [Y]
    rank, crowd = _rank_and_crowding(Y)

    for gen in range(cfg.generations):
        parents = _tournament(rank, crowd, rng, pop)
        children = np.empty_like(X)
        for i in range(0, pop, 2):
            c1, c2 = sbx_crossover(X[parents[i]], X[parents[i + 1]], cfg, rng)
            children[i] = polynomial_mutation(np.clip(c1, space.lower, space.upper), space, cfg, rng)
            children[i + 1] = polynomial_mutation(np.clip(c2, space.lower, space.upper), space, cfg, rng)
        Yc = np.atleast_2d(np.asarray(objectives(children), dtype=float))
        all_X.append(children)
        all_Y.append(Yc)

        X_comb = np.vstack([X, children])
        Y_comb = np.vstack([Y, Yc])
        keep = _survival(Y_comb, pop)
        X, Y = X_comb[keep], Y_comb[keep]
        rank, crowd = _rank_and_crowding(Y)

        if gen_callback is not None:
            AY = np.vstack(all_Y)
            finite = np.all(np.isfinite(AY), axis=1)
            arch_Y = AY[finite][nondominated_filter(AY[finite])] if np.any(finite) else AY[:0]
            gen_callback(gen, Y, arch_Y)

    if archive_all:
        AX, AY = np.vstack(all_X), np.vstack(all_Y)
    else:
        AX, AY = X, Y
    finite = np.all(np.isfinite(AY), axis=1)
    AX, AY = AX[finite], AY[finite]
    if AY.shape[0] == 0:
        return ParetoArchive(AX, AY)
    idx = nondominated_filter(AY)
    return ParetoArchive(AX[idx], AY[idx])
