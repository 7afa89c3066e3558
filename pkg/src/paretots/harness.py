"""Experiment orchestration: config files, seeded repetitions, persistence,
checkpoint/resume, and the ask/tell protocol for external oracles.

File formats
------------
config           YAML mapping of the ExperimentConfig fields
repNN_history.csv   rep, iter, evals, hv, wallclock_s
repNN_events.jsonl  one JSON object per step with full batch data
repNN_archive.csv   x0..x{d-1} columns then y0..y{K-1} columns
summary.csv      iter, hv_mean, hv_std across repetitions
"""

from __future__ import annotations

import csv
import hashlib
import json
import pickle
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from .acquisition import (
    BOState, ingest, propose, AcquisitionBatch, run_qpots,
)
from .baselines import run_sobol, run_scalarized_ts
from .benchmarks import get_benchmark, observe
from .config import ExperimentConfig, RunHistory
from .errors import ConfigError, ProtocolError
from .gp import DesignSpace

__all__ = [
    "load_config",
    "save_config",
    "run_experiment",
    "checkpoint",
    "resume",
    "ask",
    "tell",
    "init_external_state",
    "POLICIES",
    "write_history",
    "write_archive",
]

CHECKPOINT_VERSION = 1
OUTPUT_DIR_ENV = "PARETOTS_OUT"

POLICIES = {
    "qpots": run_qpots,
    "sobol": run_sobol,
    "scalarized-ts": run_scalarized_ts,
}


# -- configuration ---------------------------------------------------------

def load_config(path) -> ExperimentConfig:
    """Parse and validate a YAML config file, applying all defaults."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config must be a mapping, got {type(raw).__name__}")
    cfg = ExperimentConfig.from_dict(raw)
    if cfg.benchmark != "external":
        bench = get_benchmark(cfg.benchmark)
        cfg = cfg.resolved(bench.d, bench.K)
    else:
        if cfg.d is None or cfg.K is None:
            raise ConfigError("d, K: required for an external oracle")
        cfg = cfg.resolved(cfg.d, cfg.K)
    return cfg


def save_config(cfg: ExperimentConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)


# -- seed-phase fairness ---------------------------------------------------

def make_seed_data(cfg: ExperimentConfig, space: DesignSpace, bench, rep_seed: int):
    """Seed design and noisy seed observations, independent of the policy."""
    design_rng = np.random.default_rng(np.random.SeedSequence([rep_seed, 0]))
    X = space.from_unit(design_rng.uniform(size=(cfg.n_seed, space.dim)))
    noise_rng = np.random.default_rng(np.random.SeedSequence([rep_seed, 1]))
    Y = np.vstack([observe(bench, x, cfg.noise_var, noise_rng) for x in X])
    return X, Y


def make_oracle(cfg: ExperimentConfig, bench, rep_seed: int):
    noise_rng = np.random.default_rng(np.random.SeedSequence([rep_seed, 2]))

    def oracle(x):
        return observe(bench, x, cfg.noise_var, noise_rng)

    return oracle


def _run_one_rep(cfg: ExperimentConfig, rep: int) -> RunHistory:
    bench = get_benchmark(cfg.benchmark)
    rep_seed = cfg.base_seed + rep
    X0, Y0 = make_seed_data(cfg, bench.space, bench, rep_seed)
    oracle = make_oracle(cfg, bench, rep_seed)
    seed_seq = np.random.SeedSequence([rep_seed, 3])
    runner = POLICIES[cfg.policy]
    return runner(cfg, oracle, bench.space, seed_X=X0, seed_Y=Y0, seed_seq=seed_seq)


def run_experiment(cfg: ExperimentConfig, workers: int = 1,
                   out_dir=None) -> list[RunHistory]:
    """Run all repetitions of a configured experiment and persist results.

    Repetition r uses seed base_seed + r for both the seed design and the
    policy stream, so different policies see identical seed datasets.
    """
    if cfg.benchmark == "external":
        raise ConfigError("benchmark: run_experiment needs a registered benchmark; "
                          "use the ask/tell protocol for external oracles")
    out = Path(out_dir if out_dir is not None
               else os.environ.get(OUTPUT_DIR_ENV, cfg.output_dir))
    out.mkdir(parents=True, exist_ok=True)
    reps = list(range(cfg.repetitions))
    histories: list[RunHistory | None] = [None] * cfg.repetitions
    failures: list[tuple[int, str]] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = {r: pool.submit(_run_one_rep, cfg, r) for r in reps}
            for r, fut in futs.items():
                try:
                    histories[r] = fut.result()
                except Exception as exc:
                    failures.append((r, str(exc)))
    else:
        for r in reps:
            try:
                histories[r] = _run_one_rep(cfg, r)
            except Exception as exc:
                failures.append((r, str(exc)))
    for r, hist in enumerate(histories):
        if hist is None:
            continue
        write_history(hist, r, out / f"rep{r:02d}_history.csv")
        write_events(hist, r, out / f"rep{r:02d}_events.jsonl")
        write_archive(hist, out / f"rep{r:02d}_archive.csv")
    done = [h for h in histories if h is not None]
    if done:
        write_summary(done, out / "summary.csv")
    if failures:
        msgs = "; ".join(f"rep {r}: {m}" for r, m in failures)
        if not done:
            raise RuntimeError(f"all repetitions failed: {msgs}")
        import warnings

        warnings.warn(f"failed repetitions: {msgs}")
    return done


# -- persistence -----------------------------------------------------------

def write_history(hist: RunHistory, rep: int, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rep", "iter", "evals", "hv", "wallclock_s"])
        for rec in hist.records:
            w.writerow([rep, rec.iteration, rec.evaluations,
                        f"{rec.hypervolume:.12g}", f"{rec.wallclock_s:.6f}"])


def write_events(hist: RunHistory, rep: int, path):
    with open(path, "w") as fh:
        for rec in hist.records:
            fh.write(json.dumps({
                "rep": rep,
                "iter": rec.iteration,
                "evals": rec.evaluations,
                "hv": rec.hypervolume,
                "batch_x": np.asarray(rec.batch_X).tolist(),
                "batch_y": np.asarray(rec.batch_Y).tolist(),
                "provenance": [[int(i), float(v)] for i, v in rec.provenance],
            }) + "\n")


def write_archive(hist: RunHistory, path):
    X = np.atleast_2d(hist.final_X) if hist.final_X is not None else np.empty((0, 0))
    Y = np.atleast_2d(hist.final_Y) if hist.final_Y is not None else np.empty((0, 0))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(X.shape[1])] + [f"y{j}" for j in range(Y.shape[1])])
        for i in range(X.shape[0]):
            w.writerow([f"{v:.17g}" for v in X[i]] + [f"{v:.17g}" for v in Y[i]])


def write_all_points(data_X: np.ndarray, data_Y: np.ndarray, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(data_X.shape[1])]
                   + [f"y{j}" for j in range(data_Y.shape[1])])
        for i in range(data_X.shape[0]):
            w.writerow([f"{v:.17g}" for v in data_X[i]] + [f"{v:.17g}" for v in data_Y[i]])


def write_summary(histories: list[RunHistory], path):
    n_iter = min(len(h.records) for h in histories)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "evals", "hv_mean", "hv_std"])
        for t in range(n_iter):
            hvs = np.array([h.records[t].hypervolume for h in histories])
            w.writerow([histories[0].records[t].iteration,
                        histories[0].records[t].evaluations,
                        f"{hvs.mean():.12g}", f"{hvs.std():.12g}"])


# -- checkpoint / resume ---------------------------------------------------

def checkpoint(state: BOState, path):
    """Serialize the full loop state (RNG stream included) with a digest."""
    payload = pickle.dumps(state, protocol=4)
    blob = {
        "version": CHECKPOINT_VERSION,
        "sha256": hashlib.sha256(payload).hexdigest(),
        "payload": payload,
    }
    with open(path, "wb") as fh:
        pickle.dump(blob, fh, protocol=4)


def resume(path) -> BOState:
    try:
        with open(path, "rb") as fh:
            blob = pickle.load(fh)
        version = blob["version"]
        if version != CHECKPOINT_VERSION:
            raise ProtocolError(
                f"checkpoint version {version} != supported {CHECKPOINT_VERSION}")
        if hashlib.sha256(blob["payload"]).hexdigest() != blob["sha256"]:
            raise ProtocolError("checkpoint integrity check failed")
        return pickle.loads(blob["payload"])
    except ProtocolError:
        raise
    except Exception as exc:
        raise ProtocolError(f"cannot read checkpoint {path}: {exc}") from exc


# -- ask/tell protocol -----------------------------------------------------

def init_external_state(cfg: ExperimentConfig, state_path) -> BOState:
    """Create an ask/tell state whose first proposal is the seed design."""
    space = (get_benchmark(cfg.benchmark).space if cfg.benchmark != "external"
             else DesignSpace.unit_cube(cfg.d))
    seed_seq = np.random.SeedSequence([cfg.base_seed, 3])
    design_rng = np.random.default_rng(np.random.SeedSequence([cfg.base_seed, 0]))
    seed_X = space.from_unit(design_rng.uniform(size=(cfg.n_seed, space.dim)))
    seed_seq.spawn(1)  # mirror the in-process stream layout
    state = BOState(data=None, space=space, cfg=cfg, seed_seq=seed_seq)
    state.pending = {"phase": "seed", "points": seed_X, "ids": list(range(len(seed_X)))}
    checkpoint(state, state_path)
    return state


def ask(state_path, proposals_path=None) -> Path:
    """Write the current pending batch (proposing one first if needed)."""
    state = resume(state_path)
    if state.pending is None:
        if state.data is None:
            raise ProtocolError("state not initialized")
        if state.data.n >= state.cfg.budget:
            raise ProtocolError("budget exhausted; nothing to propose")
        q = min(state.cfg.q, state.cfg.budget - state.data.n)
        batch = propose(state, q)
        next_id = state.data.n
        state.pending = {
            "phase": "loop",
            "points": batch.points,
            "ids": list(range(next_id, next_id + len(batch.points))),
            "provenance": batch.provenance,
        }
        checkpoint(state, state_path)
    out = Path(proposals_path) if proposals_path else Path(str(state_path) + ".proposals.jsonl")
    with open(out, "w") as fh:
        for pid, x in zip(state.pending["ids"], state.pending["points"]):
            fh.write(json.dumps({"id": int(pid), "x": [float(v) for v in x]}) + "\n")
    return out


def tell(state_path, obs_path) -> BOState:
    """Ingest observations for the pending batch and advance the state."""
    from .gp import Dataset

    state = resume(state_path)
    if state.pending is None:
        raise ProtocolError("tell without a pending ask")
    rows = {}
    with open(obs_path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            rid = int(rec["id"])
            if rid in rows:
                raise ProtocolError(f"duplicate observation id {rid}")
            rows[rid] = rec
    expected = set(int(i) for i in state.pending["ids"])
    got = set(rows)
    if got != expected:
        raise ProtocolError(
            f"observation ids mismatch: missing {sorted(expected - got)}, "
            f"unexpected {sorted(got - expected)}")
    K = state.cfg.K
    Y = np.full((len(state.pending["ids"]), K), np.nan)
    for j, pid in enumerate(state.pending["ids"]):
        rec = rows[int(pid)]
        if rec.get("failed"):
            continue
        y = np.asarray(rec["y"], dtype=float)
        if y.shape != (K,):
            raise ProtocolError(f"observation {pid}: expected {K} values")
        Y[j] = y
    points = np.asarray(state.pending["points"], dtype=float)
    phase = state.pending["phase"]
    provenance = state.pending.get("provenance", [])
    state.pending = None
    if phase == "seed":
        state.data = Dataset(points, Y, noise_var=state.cfg.noise_var)
        state.__post_init__()  # resolves the reference point
        state.record(points[:0], Y[:0], [], 0.0)
    else:
        ingest(state, AcquisitionBatch(points, provenance), Y)
    checkpoint(state, state_path)
    return state
