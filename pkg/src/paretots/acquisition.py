"""The batch Pareto-optimal Thompson sampling acquisition policy.

Each step draws one posterior sample path per objective, finds the Pareto
set of the sampled paths with NSGA-II, and picks a q-point batch from that
set by a greedy maximin-distance rule against everything observed so far.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig, HistoryRecord, PathConfig, RunHistory
from .errors import InvalidArgumentError
from .gp import Dataset, DesignSpace, GPModel, fit_gp
from .nsga2 import EAConfig, nsga2_run
from .pareto import ParetoArchive, hypervolume, nondominated_filter
from .paths import PathState, select_inducing

__all__ = [
    "AcquisitionBatch",
    "BOState",
    "solve_inner_moo",
    "maximin_select",
    "qpots_step",
    "run_qpots",
    "resolve_ref_point",
    "archive_of",
]


@dataclass(frozen=True)
class AcquisitionBatch:
    points: np.ndarray  # (q, d)
    provenance: list  # [(index into X*, maximin distance), ...]


def resolve_ref_point(ref_point, Y_seed: np.ndarray) -> np.ndarray:
    """Reference point: as configured, or worst seed value + 10% of range."""
    if isinstance(ref_point, str):
        if ref_point != "auto":
            raise InvalidArgumentError(f"ref_point must be 'auto' or a vector, got {ref_point!r}")
        finite = Y_seed[np.all(np.isfinite(Y_seed), axis=1)]
        worst = finite.max(axis=0)
        span = finite.max(axis=0) - finite.min(axis=0)
        span = np.where(span > 0, span, 1.0)
        return worst + 0.1 * span
    return np.asarray(ref_point, dtype=float)


def archive_of(data: Dataset) -> ParetoArchive:
    """Nondominated subset of the successfully observed rows."""
    mask = data.finite_mask
    X, Y = data.X[mask], data.Y[mask]
    idx = nondominated_filter(Y)
    return ParetoArchive(X[idx], Y[idx])


def solve_inner_moo(models: list[GPModel], space: DesignSpace, ea_cfg: EAConfig,
                    seed_seq: np.random.SeedSequence,
                    path_cfg: PathConfig = PathConfig(),
                    inducing_X: np.ndarray | None = None,
                    incumbents: np.ndarray | None = None) -> ParetoArchive:
    """NSGA-II over one sampled posterior path per objective."""
    children = seed_seq.spawn(len(models) + 1)
    threshold = None
    if path_cfg.nystrom == "on":
        threshold = 0
    elif path_cfg.nystrom == "auto":
        threshold = path_cfg.nystrom_threshold
    paths = [
        PathState(m, children[i], mode=path_cfg.mode, nystrom_threshold=threshold,
                  inducing_X=inducing_X, cache_cap=path_cfg.cache_cap)
        for i, m in enumerate(models)
    ]

    def objectives(X: np.ndarray) -> np.ndarray:
        return np.column_stack([p.path_values(X) for p in paths])

    ea_seed = int(children[-1].generate_state(1)[0])
    cfg = EAConfig(**{**{f: getattr(ea_cfg, f) for f in ea_cfg.__dataclass_fields__},
                      "seed": ea_seed})
    archive = nsga2_run(objectives, space, cfg, inject_points=incumbents)
    if archive.X.shape[0] == 0:
        raise RuntimeError("inner multiobjective solve produced an empty Pareto set")
    return archive


def maximin_select(Xstar: np.ndarray, Xn: np.ndarray, q: int,
                   space: DesignSpace | None = None,
                   distance_space: str = "unit") -> AcquisitionBatch:
    """Greedy maximin batch from the inner-solve Pareto set.

    Each pick maximizes the minimum Euclidean distance to the observed
    designs plus the picks made so far; ties break to the lowest index.
    Distances are computed in unit-cube coordinates unless
    ``distance_space='raw'``.
    """
    Xstar = np.atleast_2d(np.asarray(Xstar, dtype=float))
    Xn = np.atleast_2d(np.asarray(Xn, dtype=float))
    if Xstar.shape[0] == 0:
        raise InvalidArgumentError("empty candidate Pareto set")
    if q > Xstar.shape[0]:
        warnings.warn(f"maximin_select: q={q} clamped to |X*|={Xstar.shape[0]}")
        q = Xstar.shape[0]
    A, B = Xstar, Xn
    if distance_space == "unit":
        if space is None:
            raise InvalidArgumentError("unit distance space requires the design space")
        A, B = space.to_unit(Xstar), space.to_unit(Xn)
    d2 = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)  # (N*, n)
    min_dist = np.sqrt(d2.min(axis=1))
    chosen: list[int] = []
    provenance = []
    for _ in range(q):
        dist = min_dist.copy()
        if chosen:
            dist[chosen] = -np.inf
        j = int(np.argmax(dist))  # argmax takes the lowest index on ties
        chosen.append(j)
        provenance.append((j, float(min_dist[j])))
        step = np.sqrt(((A - A[j]) ** 2).sum(axis=1))
        min_dist = np.minimum(min_dist, step)
    return AcquisitionBatch(Xstar[chosen], provenance)


@dataclass
class BOState:
    """Mutable loop state for one optimization run."""

    data: Dataset | None
    space: DesignSpace
    cfg: ExperimentConfig
    seed_seq: np.random.SeedSequence
    models: list[GPModel] = field(default_factory=list)
    iteration: int = 0
    history: RunHistory = field(default_factory=RunHistory)
    ref_point: np.ndarray | None = None
    n_failures: int = 0
    pending: dict | None = None  # ask/tell protocol bookkeeping

    def __post_init__(self):
        if self.ref_point is None and self.data is not None:
            self.ref_point = resolve_ref_point(self.cfg.ref_point, self.data.Y)
            self.history.ref_point = self.ref_point

    @property
    def evaluations(self) -> int:
        return self.data.n

    def fit_models(self, warm: bool = False):
        ss = self.seed_seq.spawn(1)[0]
        rngs = ss.spawn(self.data.n_objectives)
        self.models = [
            fit_gp(self.data, k, rngs[k], space=self.space,
                   warm_start=self.models[k].hyper if warm and self.models else None)
            for k in range(self.data.n_objectives)
        ]

    def record(self, batch_X, batch_Y, provenance, wallclock: float):
        arch = archive_of(self.data)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            hv = hypervolume(arch.Y, self.ref_point)
        self.history.add(HistoryRecord(
            iteration=self.iteration,
            evaluations=self.evaluations,
            hypervolume=hv,
            batch_X=np.atleast_2d(np.asarray(batch_X, dtype=float)),
            batch_Y=np.atleast_2d(np.asarray(batch_Y, dtype=float)),
            provenance=list(provenance),
            wallclock_s=wallclock,
        ))


def propose(state: BOState, q: int) -> AcquisitionBatch:
    """Select the next q-point batch (Algorithm steps 1-4)."""
    if not state.models:
        state.fit_models()
    cfg = state.cfg
    ss = state.seed_seq.spawn(1)[0]
    inducing = state.data.X[select_inducing(state.data)]
    incumbents = archive_of(state.data).X
    inner = solve_inner_moo(
        state.models, state.space, cfg.ea, ss,
        path_cfg=cfg.path_config, inducing_X=inducing, incumbents=incumbents,
    )
    return maximin_select(inner.X, state.data.X, q, space=state.space,
                          distance_space=cfg.maximin_space)


def ingest(state: BOState, batch: AcquisitionBatch, Y_obs: np.ndarray,
           wallclock: float = 0.0):
    """Append observations, refit surrogates, and log the step."""
    Y_obs = np.atleast_2d(np.asarray(Y_obs, dtype=float))
    bad = ~np.all(np.isfinite(Y_obs), axis=1)
    if np.any(bad):
        Y_obs = Y_obs.copy()
        Y_obs[bad] = np.nan
        state.n_failures += int(bad.sum())
        if state.n_failures > 0.1 * state.cfg.budget:
            raise RuntimeError(
                f"oracle failed {state.n_failures} times (> 10% of budget {state.cfg.budget})"
            )
    state.data = state.data.append(batch.points, Y_obs)
    state.iteration += 1
    if not state.models or state.iteration % max(state.cfg.refit_every, 1) == 0:
        # warm-started local refits between periodic full multi-start fits
        full = not state.models or state.iteration % 10 == 0
        state.fit_models(warm=not full)
    state.record(batch.points, Y_obs, batch.provenance, wallclock)


def qpots_step(state: BOState, q: int, oracle) -> BOState:
    """One full acquisition round: propose, observe, update."""
    t0 = time.perf_counter()
    batch = propose(state, q)
    Y_obs = _observe_batch(oracle, batch.points, state.data.n_objectives)
    ingest(state, batch, Y_obs, wallclock=time.perf_counter() - t0)
    return state


def _observe_batch(oracle, points: np.ndarray, K: int) -> np.ndarray:
    out = np.full((points.shape[0], K), np.nan)
    for i, x in enumerate(points):
        try:
            y = np.asarray(oracle(x), dtype=float)
            if y.shape == (K,):
                out[i] = y
        except Exception:
            pass  # sentinel row stays NaN
    return out


def make_initial_state(cfg: ExperimentConfig, space: DesignSpace, oracle,
                       seed_X: np.ndarray | None = None,
                       seed_Y: np.ndarray | None = None,
                       seed_seq: np.random.SeedSequence | None = None) -> BOState:
    """Seed-design phase: uniform random designs unless data is supplied."""
    if seed_seq is None:
        seed_seq = np.random.SeedSequence(cfg.base_seed)
    if seed_X is None:
        design_rng = np.random.default_rng(seed_seq.spawn(1)[0])
        seed_X = space.from_unit(design_rng.uniform(size=(cfg.n_seed, space.dim)))
    else:
        seed_seq.spawn(1)  # keep the stream layout identical either way
    if seed_Y is None:
        seed_Y = _observe_batch(oracle, seed_X, cfg.K)
    data = Dataset(seed_X, seed_Y, noise_var=cfg.noise_var)
    state = BOState(data=data, space=space, cfg=cfg, seed_seq=seed_seq)
    state.record(seed_X[:0], seed_Y[:0], [], 0.0)
    return state


def run_qpots(cfg: ExperimentConfig, oracle, space: DesignSpace,
              seed_X=None, seed_Y=None, seed_seq=None) -> RunHistory:
    """Full qPOTS run: seed design then acquisition rounds up to the budget."""
    state = make_initial_state(cfg, space, oracle, seed_X, seed_Y, seed_seq)
    while state.evaluations < cfg.budget:
        q = min(cfg.q, cfg.budget - state.evaluations)
        qpots_step(state, q, oracle)
    arch = archive_of(state.data)
    state.history.final_X, state.history.final_Y = arch.X, arch.Y
    return state.history
