"""Desk-scale comparison policies: Sobol quasi-random search and a simple
random-weight Chebyshev-scalarization Thompson sampling baseline.

The scalarized baseline is a stand-in for the scalarization family of
methods, not a faithful reproduction of any of them.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.stats import qmc

from .acquisition import AcquisitionBatch, BOState, archive_of, make_initial_state
from .config import ExperimentConfig, RunHistory
from .errors import InvalidArgumentError
from .gp import DesignSpace
from .nsga2 import EAConfig, nsga2_run
from .paths import PathState, select_inducing

__all__ = ["SobolStream", "sobol_next", "run_sobol", "run_scalarized_ts"]

_MAX_SOBOL_DIM = 21201  # scipy direction-number table


class SobolStream:
    """Deterministic Sobol sequence over a design space, origin skipped.

    With ``scramble=True`` a seeded Owen scramble (digital shift) is applied;
    the default stream is unscrambled and depends only on the dimension.
    """

    def __init__(self, space: DesignSpace, scramble: bool = False, seed: int = 0):
        if space.dim > _MAX_SOBOL_DIM:
            raise InvalidArgumentError(f"Sobol supports up to {_MAX_SOBOL_DIM} dimensions")
        self.space = space
        self.index = 0
        self._engine = qmc.Sobol(space.dim, scramble=scramble, seed=seed)
        if not scramble:
            self._engine.fast_forward(1)  # drop the all-zeros origin

    def next_points(self, n: int = 1) -> np.ndarray:
        pts = self._engine.random(n)
        self.index += n
        return self.space.from_unit(pts)


def sobol_next(stream: SobolStream) -> np.ndarray:
    """The next point of the stream, scaled to the design space."""
    return stream.next_points(1)[0]


def _finish(state: BOState) -> RunHistory:
    arch = archive_of(state.data)
    state.history.final_X, state.history.final_Y = arch.X, arch.Y
    return state.history


def run_sobol(cfg: ExperimentConfig, oracle, space: DesignSpace,
              seed_X=None, seed_Y=None, seed_seq=None) -> RunHistory:
    """Quasi-random search baseline under the same budget accounting."""
    from .acquisition import _observe_batch, ingest

    state = make_initial_state(cfg, space, oracle, seed_X, seed_Y, seed_seq)
    stream = SobolStream(space)
    while state.evaluations < cfg.budget:
        t0 = time.perf_counter()
        q = min(cfg.q, cfg.budget - state.evaluations)
        pts = stream.next_points(q)
        batch = AcquisitionBatch(pts, [(-1, 0.0)] * q)
        Y_obs = _observe_batch(oracle, pts, state.data.n_objectives)
        _ingest_without_models(state, batch, Y_obs, time.perf_counter() - t0)
    return _finish(state)


def _ingest_without_models(state: BOState, batch, Y_obs, wallclock):
    Y_obs = np.atleast_2d(np.asarray(Y_obs, dtype=float))
    bad = ~np.all(np.isfinite(Y_obs), axis=1)
    if np.any(bad):
        Y_obs = Y_obs.copy()
        Y_obs[bad] = np.nan
        state.n_failures += int(bad.sum())
    state.data = state.data.append(batch.points, Y_obs)
    state.iteration += 1
    state.record(batch.points, Y_obs, batch.provenance, wallclock)


def run_scalarized_ts(cfg: ExperimentConfig, oracle, space: DesignSpace,
                      seed_X=None, seed_Y=None, seed_seq=None) -> RunHistory:
    """Thompson sampling on a random augmented-Chebyshev scalarization.

    Per acquisition: draw simplex-uniform weights, scalarize one posterior
    path per objective (objectives standardized to the current data), and
    take the minimizer found by the evolutionary solver.
    """
    from .acquisition import _observe_batch, ingest

    state = make_initial_state(cfg, space, oracle, seed_X, seed_Y, seed_seq)
    while state.evaluations < cfg.budget:
        t0 = time.perf_counter()
        q = min(cfg.q, cfg.budget - state.evaluations)
        if not state.models:
            state.fit_models()
        pts = []
        for _ in range(q):
            pts.append(_scalarized_ts_point(state, space))
        batch = AcquisitionBatch(np.vstack(pts), [(-1, 0.0)] * q)
        Y_obs = _observe_batch(oracle, batch.points, state.data.n_objectives)
        ingest(state, batch, Y_obs, time.perf_counter() - t0)
    return _finish(state)


def _scalarized_ts_point(state: BOState, space: DesignSpace) -> np.ndarray:
    cfg = state.cfg
    ss = state.seed_seq.spawn(1)[0]
    children = ss.spawn(len(state.models) + 2)
    rng = np.random.default_rng(children[-1])
    K = len(state.models)
    w = rng.dirichlet(np.ones(K))
    inducing = state.data.X[select_inducing(state.data)]
    paths = [
        PathState(m, children[i], mode=cfg.path_config.mode,
                  nystrom_threshold=cfg.path_config.nystrom_threshold,
                  inducing_X=inducing)
        for i, m in enumerate(state.models)
    ]
    mask = state.data.finite_mask
    mu = state.data.Y[mask].mean(axis=0)
    sd = state.data.Y[mask].std(axis=0)
    sd = np.where(sd > 1e-12, sd, 1.0)

    def scalar_objective(X: np.ndarray) -> np.ndarray:
        F = np.column_stack([p.path_values(X) for p in paths])
        Ft = (F - mu) / sd
        cheb = np.max(w * Ft, axis=1) + 0.05 * np.sum(w * Ft, axis=1)
        return cheb[:, None]

    ea_seed = int(children[-2].generate_state(1)[0])
    ea = cfg.ea
    ea_cfg = EAConfig(pop_size=ea.pop_size, generations=ea.generations,
                      crossover_prob=ea.crossover_prob, crossover_eta=ea.crossover_eta,
                      mutation_prob=ea.mutation_prob, mutation_eta=ea.mutation_eta,
                      seed=ea_seed)
    arch = nsga2_run(scalar_objective, space, ea_cfg)
    best = int(np.argmin(arch.Y[:, 0]))
    return arch.X[best]
