"""Consistent posterior sample paths via the reparameterization trick.

A path is one realization of the posterior process.  Values already
realized are cached and every later query is drawn from the Gaussian law
conditioned on the training data plus the cache, so the evolutionary
solver sees a single coherent function across generations.

The covariance square root is an exact Cholesky factor by default and a
Nystrom factor ``Sigma_Nm Sigma_mm^{-1/2}`` for large batches, with the
inducing set taken from the nondominated observed points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import CacheLimitError, IllConditionedError, InvalidArgumentError
from .gp import Dataset, GPModel, jittered_cholesky
from .pareto import nondominated_filter

__all__ = [
    "SqrtFactor",
    "exact_sqrt",
    "nystrom_sqrt",
    "select_inducing",
    "PathState",
]

_CACHE_CAP = 50_000
_COND_JITTER = 1e-10


@dataclass(frozen=True)
class SqrtFactor:
    """An N x m factor F with F F^T approximating a covariance matrix."""

    factor: np.ndarray
    method: str  # "exact-cholesky" | "nystrom"
    inducing_count: int


def exact_sqrt(cov: np.ndarray) -> SqrtFactor:
    """Cholesky square root (with jitter escalation) of a PSD matrix."""
    cov = np.asarray(cov, dtype=float)
    scale = max(float(np.abs(cov).max()), 1.0)
    if not np.allclose(cov, cov.T, atol=1e-8 * scale):
        raise InvalidArgumentError("covariance must be symmetric")
    L, _ = jittered_cholesky(0.5 * (cov + cov.T))
    return SqrtFactor(L, "exact-cholesky", cov.shape[0])


def nystrom_sqrt(cov_mN: np.ndarray, cov_mm: np.ndarray) -> SqrtFactor:
    """Nystrom square-root factor Sigma_Nm Sigma_mm^{-1/2}.

    cov_mN holds the m inducing rows of the N-point covariance; cov_mm the
    inducing principal submatrix.  Cost O(m^3 + N m^2).
    """
    cov_mN = np.atleast_2d(np.asarray(cov_mN, dtype=float))
    cov_mm = np.atleast_2d(np.asarray(cov_mm, dtype=float))
    m = cov_mm.shape[0]
    if cov_mN.shape[0] != m:
        raise InvalidArgumentError("cov_mN must have one row per inducing point")
    try:
        L_mm, _ = jittered_cholesky(cov_mm)
        # F = Sigma_Nm L_mm^{-T}; then F F^T = Sigma_Nm Sigma_mm^{-1} Sigma_mN
        F = linalg.solve_triangular(L_mm, cov_mN, lower=True).T
    except IllConditionedError:
        warnings.warn("nystrom_sqrt: singular inducing block, using pseudo-inverse")
        w, V = np.linalg.eigh(0.5 * (cov_mm + cov_mm.T))
        tol = max(w.max(), 0.0) * m * np.finfo(float).eps
        inv_sqrt = np.where(w > tol, 1.0 / np.sqrt(np.maximum(w, tol)), 0.0)
        F = cov_mN.T @ (V * inv_sqrt) @ V.T
    return SqrtFactor(F, "nystrom", m)


def select_inducing(data: Dataset) -> np.ndarray:
    """Inducing indices: the nondominated observed rows (full set if < 2)."""
    finite = np.flatnonzero(data.finite_mask)
    if finite.size == 0:
        return np.arange(data.n)
    idx = finite[nondominated_filter(data.Y[finite])]
    if idx.size < 2:
        return finite
    return idx


class PathState:
    """One posterior sample path with a growing consistency cache.

    Parameters
    ----------
    model : fitted GPModel
    rng : seed or np.random.Generator for this realization
    mode : "consistent" caches realized values and conditions on them;
        "per-generation" redraws a fresh joint sample on every query.
    nystrom_threshold : batch sizes above this use the Nystrom square root
        (None disables it).
    inducing_X : points used as the Nystrom inducing set.
    """

    def __init__(self, model: GPModel, rng, mode: str = "consistent",
                 nystrom_threshold: int | None = 256,
                 inducing_X: np.ndarray | None = None,
                 cache_cap: int = _CACHE_CAP):
        if mode not in ("consistent", "per-generation"):
            raise InvalidArgumentError(f"unknown path mode: {mode}")
        self.model = model
        self.rng = np.random.default_rng(rng)
        self.mode = mode
        self.nystrom_threshold = nystrom_threshold
        self.inducing_X = None if inducing_X is None else np.atleast_2d(inducing_X)
        self.cache_cap = cache_cap
        d = model.train_X.shape[1]
        self.cached_X = np.empty((0, d))
        self.cached_vals = np.empty(0)
        # Cholesky of the posterior covariance at cached points (+ jitter)
        # and the whitened residual, both extended incrementally.
        self._L = np.empty((0, 0))
        self._w = np.empty(0)
        self._index: dict[bytes, int] = {}

    @property
    def cache_size(self) -> int:
        return self.cached_X.shape[0]

    def __call__(self, Xq) -> np.ndarray:
        return self.path_values(Xq)

    def path_values(self, Xq) -> np.ndarray:
        """Realized path values at the query points (B-vector)."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        if Xq.shape[1] != self.model.train_X.shape[1]:
            raise InvalidArgumentError("query dimension mismatch")
        if self.mode == "per-generation":
            return self._fresh_joint_draw(Xq)

        out = np.empty(Xq.shape[0])
        new_rows: list[int] = []
        new_keys: list[bytes] = []
        seen_new: dict[bytes, int] = {}
        for i in range(Xq.shape[0]):
            key = Xq[i].tobytes()
            hit = self._index.get(key)
            if hit is not None:
                out[i] = self.cached_vals[hit]
            elif key in seen_new:
                out[i] = np.nan  # duplicate of a pending new point, fill later
            else:
                seen_new[key] = len(new_rows)
                new_rows.append(i)
                new_keys.append(key)
        if new_rows:
            X_new = Xq[new_rows]
            vals = self._extend(X_new)
            out[new_rows] = vals
        # resolve duplicates of freshly realized points
        for i in range(Xq.shape[0]):
            if np.isnan(out[i]):
                out[i] = self.cached_vals[self._index[Xq[i].tobytes()]]
        return out

    # -- internals ---------------------------------------------------------

    def _posterior_blocks(self, X_new: np.ndarray):
        mean_new, cov_new = self.model.posterior(X_new)
        if self.cache_size:
            cross = self.model.posterior_cross_cov(self.cached_X, X_new)  # (M, B)
        else:
            cross = np.empty((0, X_new.shape[0]))
        return mean_new, cov_new, cross

    def _extend(self, X_new: np.ndarray) -> np.ndarray:
        B = X_new.shape[0]
        if self.cache_size + B > self.cache_cap:
            raise CacheLimitError(
                f"path cache would exceed {self.cache_cap} points; raise the "
                "Nystrom threshold, lower the EA budget, or use per-generation mode"
            )
        mean_new, cov_new, cross = self._posterior_blocks(X_new)
        if self.cache_size:
            T = linalg.solve_triangular(self._L, cross, lower=True)  # (M, B)
            cond_mean = mean_new + T.T @ self._w
            cond_cov = cov_new - T.T @ T
            cond_cov = 0.5 * (cond_cov + cond_cov.T)
        else:
            T = np.empty((0, B))
            cond_mean = mean_new
            cond_cov = cov_new

        use_nystrom = (
            self.nystrom_threshold is not None
            and B > self.nystrom_threshold
            and self.inducing_X is not None
            and self.inducing_X.shape[0] < B
        )
        if use_nystrom:
            vals = cond_mean + self._nystrom_draw(X_new, cond_cov)
        else:
            L_B, _ = jittered_cholesky(
                cond_cov + _COND_JITTER * max(self.model.hyper.signal_var, 1.0) * np.eye(B)
            )
            vals = cond_mean + L_B @ self.rng.standard_normal(B)

        # extend the cache factorization with the exact conditional block
        L_B, _ = jittered_cholesky(
            cond_cov + _COND_JITTER * max(self.model.hyper.signal_var, 1.0) * np.eye(B)
        )
        M = self.cache_size
        L_ext = np.zeros((M + B, M + B))
        L_ext[:M, :M] = self._L
        L_ext[M:, :M] = T.T
        L_ext[M:, M:] = L_B
        w_new = linalg.solve_triangular(L_B, vals - cond_mean, lower=True)
        self._L = L_ext
        self._w = np.concatenate([self._w, w_new])
        for j in range(B):
            self._index[X_new[j].tobytes()] = M + j
        self.cached_X = np.vstack([self.cached_X, X_new])
        self.cached_vals = np.concatenate([self.cached_vals, vals])
        return vals

    def _nystrom_draw(self, X_new: np.ndarray, cond_cov: np.ndarray) -> np.ndarray:
        """Zero-mean draw with covariance ~ cond_cov via the inducing set."""
        Xm = self.inducing_X
        # conditional (on training + cache) covariance blocks at the inducing set
        _, cov_mm_post = self.model.posterior(Xm)
        cross_mN = self.model.posterior_cross_cov(Xm, X_new)  # (m, B)
        if self.cache_size:
            cross_mc = self.model.posterior_cross_cov(Xm, self.cached_X)  # (m, M)
            Tm = linalg.solve_triangular(self._L, cross_mc.T, lower=True)  # (M, m)
            Tn = linalg.solve_triangular(
                self._L, self.model.posterior_cross_cov(self.cached_X, X_new), lower=True
            )
            cov_mm = cov_mm_post - Tm.T @ Tm
            cross = cross_mN - Tm.T @ Tn
        else:
            cov_mm = cov_mm_post
            cross = cross_mN
        F = nystrom_sqrt(cross, cov_mm).factor  # (B, m)
        return F @ self.rng.standard_normal(F.shape[1])

    def _fresh_joint_draw(self, Xq: np.ndarray) -> np.ndarray:
        mean, cov = self.model.posterior(Xq)
        B = Xq.shape[0]
        use_nystrom = (
            self.nystrom_threshold is not None
            and B > self.nystrom_threshold
            and self.inducing_X is not None
            and self.inducing_X.shape[0] < B
        )
        if use_nystrom:
            Xm = self.inducing_X
            _, cov_mm = self.model.posterior(Xm)
            cross = self.model.posterior_cross_cov(Xm, Xq)
            F = nystrom_sqrt(cross, cov_mm).factor
            return mean + F @ self.rng.standard_normal(F.shape[1])
        F = exact_sqrt(cov).factor
        return mean + F @ self.rng.standard_normal(B)
