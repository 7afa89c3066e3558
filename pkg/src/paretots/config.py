"""Experiment configuration and per-run history records."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Any

import numpy as np

from .errors import ConfigError
from .nsga2 import EAConfig

__all__ = ["ExperimentConfig", "HistoryRecord", "RunHistory", "PathConfig"]

POLICY_NAMES = ("qpots", "sobol", "scalarized-ts")


@dataclass(frozen=True)
class PathConfig:
    """How posterior sample paths are drawn inside the acquisition."""

    mode: str = "consistent"  # or "per-generation"
    nystrom: str = "auto"  # auto | on | off
    nystrom_threshold: int = 256
    cache_cap: int = 50_000

    def __post_init__(self):
        if self.mode not in ("consistent", "per-generation"):
            raise ConfigError(f"path mode must be consistent|per-generation, got {self.mode!r}")
        if self.nystrom not in ("auto", "on", "off"):
            raise ConfigError(f"nystrom must be auto|on|off, got {self.nystrom!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: str = ""  # registry name, or "external"
    policy: str = "qpots"
    d: int | None = None
    K: int | None = None
    n_seed: int | None = None  # default 10 * d
    budget: int = 0
    q: int = 1
    noise_var: float = 1e-3
    ea: EAConfig | None = None  # pop default 100 * d
    ref_point: Any = "auto"  # K-vector or "auto"
    repetitions: int = 10
    base_seed: int = 0
    nystrom: str = "auto"
    path_mode: str = "consistent"
    refit_every: int = 1
    maximin_space: str = "unit"  # unit | raw
    output_dir: str = "results"

    def __post_init__(self):
        if not self.benchmark:
            raise ConfigError("benchmark: a benchmark name or 'external' is required")
        if self.policy not in POLICY_NAMES:
            raise ConfigError(f"policy: must be one of {POLICY_NAMES}, got {self.policy!r}")
        if self.q < 1:
            raise ConfigError("q: must be >= 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions: must be >= 1")
        if self.noise_var < 0:
            raise ConfigError("noise_var: must be nonnegative")
        if self.maximin_space not in ("unit", "raw"):
            raise ConfigError("maximin_space: must be unit|raw")

    def resolved(self, d: int, K: int) -> "ExperimentConfig":
        """Fill defaults that depend on problem dimensions and validate."""
        n_seed = self.n_seed if self.n_seed is not None else 10 * d
        ea = self.ea if self.ea is not None else EAConfig(pop_size=100 * d)
        cfg = ExperimentConfig(**{**asdict_shallow(self), "d": d, "K": K,
                                  "n_seed": n_seed, "ea": ea})
        if cfg.budget <= n_seed:
            raise ConfigError(f"budget: must exceed n_seed ({n_seed}), got {cfg.budget}")
        return cfg

    @property
    def path_config(self) -> PathConfig:
        return PathConfig(mode=self.path_mode, nystrom=self.nystrom)

    def to_dict(self) -> dict:
        out = asdict_shallow(self)
        if isinstance(out["ea"], EAConfig):
            out["ea"] = asdict(out["ea"])
        if isinstance(out["ref_point"], np.ndarray):
            out["ref_point"] = [float(v) for v in out["ref_point"]]
        return out

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        known = set(ExperimentConfig.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown configuration key(s): {', '.join(sorted(unknown))}")
        ea = raw.get("ea")
        if isinstance(ea, dict):
            bad = set(ea) - set(EAConfig.__dataclass_fields__)
            if bad:
                raise ConfigError(f"ea: unknown key(s): {', '.join(sorted(bad))}")
            try:
                raw["ea"] = EAConfig(**ea)
            except Exception as exc:
                raise ConfigError(f"ea: {exc}") from exc
        try:
            return ExperimentConfig(**raw)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(str(exc)) from exc


def asdict_shallow(cfg) -> dict:
    return {name: getattr(cfg, name) for name in cfg.__dataclass_fields__}


@dataclass
class HistoryRecord:
    iteration: int
    evaluations: int
    hypervolume: float
    batch_X: np.ndarray
    batch_Y: np.ndarray
    provenance: list
    wallclock_s: float


@dataclass
class RunHistory:
    records: list[HistoryRecord] = field(default_factory=list)
    final_X: np.ndarray | None = None
    final_Y: np.ndarray | None = None
    ref_point: np.ndarray | None = None

    def add(self, rec: HistoryRecord):
        if self.records and rec.iteration <= self.records[-1].iteration:
            raise ValueError("records must be strictly ordered by iteration")
        self.records.append(rec)

    @property
    def hypervolumes(self) -> np.ndarray:
        return np.array([r.hypervolume for r in self.records])
