"""Gaussian process regression with an anisotropic Matern-5/2 kernel.

One model per objective: zero-mean prior (after internal standardization),
noisy observations, hyperparameters fitted by maximizing the log marginal
likelihood with analytic gradients and a multi-start quasi-Newton ascent.

The posterior follows the usual conditioning identities

    mean(x) = k_n(x)^T [K_n + tau^2 I]^{-1} y_n
    var(x)  = k(x, x) - k_n(x)^T [K_n + tau^2 I]^{-1} k_n(x)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .errors import IllConditionedError, InvalidArgumentError

__all__ = [
    "DesignSpace",
    "Dataset",
    "GPHyperparams",
    "GPModel",
    "matern52",
    "matern52_matrix",
    "log_marginal_likelihood",
    "fit_gp",
    "jittered_cholesky",
]

_SQRT5 = np.sqrt(5.0)

# Jitter escalation: start at 1e-10 * mean(diag), multiply by 10 up to
# 1e-4 * mean(diag), then give up.
_JITTER_START = 1e-10
_JITTER_MAX = 1e-4


@dataclass(frozen=True)
class DesignSpace:
    """A box domain [lower, upper] in R^d."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise InvalidArgumentError("lower/upper must be 1-D vectors of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise InvalidArgumentError("bounds must be finite")
        if not np.all(lower < upper):
            raise InvalidArgumentError("need lower[i] < upper[i] for all i")

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def range(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, X, atol: float = 1e-12) -> bool:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return bool(np.all(X >= self.lower - atol) and np.all(X <= self.upper + atol))

    def to_unit(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.lower) / self.range

    def from_unit(self, U) -> np.ndarray:
        return self.lower + np.asarray(U, dtype=float) * self.range

    @staticmethod
    def unit_cube(d: int) -> "DesignSpace":
        return DesignSpace(np.zeros(d), np.ones(d))


@dataclass(frozen=True)
class Dataset:
    """Observed designs X (n x d) and objectives Y (n x K) with noise variance.

    Rows of Y may be entirely NaN: these are failed-oracle sentinels and are
    excluded from model fitting (see ``finite_mask``).
    """

    X: np.ndarray
    Y: np.ndarray
    noise_var: float = 0.0

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if X.shape[0] != Y.shape[0]:
            raise InvalidArgumentError("X and Y must have the same number of rows")
        if X.shape[0] < 1:
            raise InvalidArgumentError("need at least one observation")
        if not np.all(np.isfinite(X)):
            raise InvalidArgumentError("X entries must be finite")
        if self.noise_var < 0:
            raise InvalidArgumentError("noise_var must be nonnegative")
        row_finite = np.all(np.isfinite(Y), axis=1)
        row_nan = np.all(np.isnan(Y), axis=1)
        if not np.all(row_finite | row_nan):
            raise InvalidArgumentError("Y rows must be fully finite or all-NaN sentinels")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def n_objectives(self) -> int:
        return self.Y.shape[1]

    @property
    def finite_mask(self) -> np.ndarray:
        return np.all(np.isfinite(self.Y), axis=1)

    def append(self, X_new, Y_new) -> "Dataset":
        X_new = np.atleast_2d(np.asarray(X_new, dtype=float))
        Y_new = np.atleast_2d(np.asarray(Y_new, dtype=float))
        return Dataset(np.vstack([self.X, X_new]), np.vstack([self.Y, Y_new]), self.noise_var)


@dataclass(frozen=True)
class GPHyperparams:
    """Anisotropic Matern-5/2 hyperparameters."""

    lengthscales: np.ndarray
    signal_var: float
    noise_var: float

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        object.__setattr__(self, "lengthscales", ls)
        if not np.all(ls > 0):
            raise InvalidArgumentError("lengthscales must be positive")
        if not self.signal_var > 0:
            raise InvalidArgumentError("signal_var must be positive")
        if self.noise_var < 0:
            raise InvalidArgumentError("noise_var must be nonnegative")


def matern52_matrix(X1, X2, hyper: GPHyperparams) -> np.ndarray:
    """Matern-5/2 cross-covariance matrix between two point sets."""
    X1 = np.atleast_2d(np.asarray(X1, dtype=float))
    X2 = np.atleast_2d(np.asarray(X2, dtype=float))
    diff = (X1[:, None, :] - X2[None, :, :]) / hyper.lengthscales
    r = np.sqrt(np.maximum((diff**2).sum(axis=-1), 0.0))
    s = _SQRT5 * r
    return hyper.signal_var * (1.0 + s + s**2 / 3.0) * np.exp(-s)


def matern52(x, x2, hyper: GPHyperparams) -> float:
    """Matern-5/2 kernel between two points; k(x, x) = signal_var."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x.shape != x2.shape:
        raise InvalidArgumentError("point dimensions differ")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(x2))):
        raise InvalidArgumentError("kernel inputs must be finite")
    return float(matern52_matrix(x[None, :], x2[None, :], hyper)[0, 0])


def jittered_cholesky(A: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky of a PSD matrix, escalating diagonal jitter on failure.

    Returns (L, jitter_used).  Raises IllConditionedError once the jitter
    exceeds 1e-4 * mean(diag).
    """
    diag_mean = float(np.mean(np.diag(A)))
    if diag_mean <= 0:
        diag_mean = 1.0
    try:
        return linalg.cholesky(A, lower=True), 0.0
    except linalg.LinAlgError:
        pass
    jitter = _JITTER_START * diag_mean
    while jitter <= _JITTER_MAX * diag_mean:
        try:
            L = linalg.cholesky(A + jitter * np.eye(A.shape[0]), lower=True)
            return L, jitter
        except linalg.LinAlgError:
            jitter *= 10.0
    raise IllConditionedError(
        f"Cholesky failed after jitter escalation up to {_JITTER_MAX * diag_mean:.3e}"
    )


@dataclass(frozen=True)
class GPModel:
    """A fitted GP posterior for one objective (immutable after fit).

    ``mean_offset`` is the constant prior mean in original units (the
    training-target mean when fitted; zero when built directly from
    hyperparameters).
    """

    hyper: GPHyperparams
    train_X: np.ndarray
    train_y: np.ndarray
    mean_offset: float = 0.0
    alpha: np.ndarray = field(default=None, repr=False)
    chol: np.ndarray = field(default=None, repr=False)

    @staticmethod
    def from_hyperparams(train_X, train_y, hyper: GPHyperparams, mean_offset: float = 0.0) -> "GPModel":
        train_X = np.atleast_2d(np.asarray(train_X, dtype=float))
        train_y = np.atleast_1d(np.asarray(train_y, dtype=float))
        K = matern52_matrix(train_X, train_X, hyper)
        K[np.diag_indices_from(K)] += hyper.noise_var
        L, _ = jittered_cholesky(K)
        resid = train_y - mean_offset
        alpha = linalg.cho_solve((L, True), resid)
        return GPModel(hyper, train_X, train_y, mean_offset, alpha, L)

    @property
    def n(self) -> int:
        return self.train_X.shape[0]

    def posterior(self, Xq, full_cov: bool = True):
        """Posterior (mean, cov) at query points; cov diagonal clamped >= 0."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        if Xq.shape[1] != self.train_X.shape[1]:
            raise InvalidArgumentError(
                f"query dim {Xq.shape[1]} != training dim {self.train_X.shape[1]}"
            )
        k_n = matern52_matrix(Xq, self.train_X, self.hyper)  # (N, n)
        mean = self.mean_offset + k_n @ self.alpha
        V = linalg.solve_triangular(self.chol, k_n.T, lower=True)  # (n, N)
        if full_cov:
            cov = matern52_matrix(Xq, Xq, self.hyper) - V.T @ V
            cov = 0.5 * (cov + cov.T)
            d = np.diag(cov).copy()
            np.fill_diagonal(cov, np.maximum(d, 0.0))
            return mean, cov
        var = self.hyper.signal_var - (V**2).sum(axis=0)
        return mean, np.maximum(var, 0.0)

    def posterior_cross_cov(self, Xa, Xb) -> np.ndarray:
        """Posterior covariance block cov(f(Xa), f(Xb) | data)."""
        Xa = np.atleast_2d(np.asarray(Xa, dtype=float))
        Xb = np.atleast_2d(np.asarray(Xb, dtype=float))
        k_a = matern52_matrix(Xa, self.train_X, self.hyper)
        k_b = matern52_matrix(Xb, self.train_X, self.hyper)
        Va = linalg.solve_triangular(self.chol, k_a.T, lower=True)
        Vb = linalg.solve_triangular(self.chol, k_b.T, lower=True)
        return matern52_matrix(Xa, Xb, self.hyper) - Va.T @ Vb


def _lml_terms(hyper: GPHyperparams, X: np.ndarray, y: np.ndarray):
    K = matern52_matrix(X, X, hyper)
    Kn = K + hyper.noise_var * np.eye(X.shape[0])
    L, _ = jittered_cholesky(Kn)
    alpha = linalg.cho_solve((L, True), y)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.sum(np.log(np.diag(L))))
        - 0.5 * X.shape[0] * np.log(2.0 * np.pi)
    )
    return lml, K, L, alpha


def _kernel_grads(hyper: GPHyperparams, X: np.ndarray, K: np.ndarray):
    """Derivatives of the noisy covariance matrix wrt raw hyperparameters.

    Yields (name, dK) for lengthscales[i], signal_var, noise_var.
    """
    n = X.shape[0]
    diff = X[:, None, :] - X[None, :, :]
    scaled2 = (diff / hyper.lengthscales) ** 2
    r = np.sqrt(np.maximum(scaled2.sum(axis=-1), 0.0))
    common = hyper.signal_var * (5.0 / 3.0) * (1.0 + _SQRT5 * r) * np.exp(-_SQRT5 * r)
    grads = []
    for i in range(X.shape[1]):
        grads.append(("lengthscale", i, common * scaled2[:, :, i] / hyper.lengthscales[i]))
    grads.append(("signal_var", None, K / hyper.signal_var))
    grads.append(("noise_var", None, np.eye(n)))
    return grads


def log_marginal_likelihood(hyper: GPHyperparams, data: Dataset, objective_index: int,
                            with_grad: bool = False):
    """GP evidence for one objective column; optionally with its gradient.

    The gradient is wrt the raw hyperparameters, ordered
    (lengthscales..., signal_var, noise_var), via
    d lml / d theta = 0.5 tr((alpha alpha^T - Kn^{-1}) dK/d theta).
    """
    mask = data.finite_mask
    X = data.X[mask]
    y = data.Y[mask, objective_index]
    lml, K, L, alpha = _lml_terms(hyper, X, y)
    if not with_grad:
        return lml
    Kn_inv = linalg.cho_solve((L, True), np.eye(X.shape[0]))
    M = np.outer(alpha, alpha) - Kn_inv
    grad = np.array([0.5 * np.sum(M * dK) for _, _, dK in _kernel_grads(hyper, X, K)])
    return lml, grad


def _neg_lml_and_grad(theta: np.ndarray, X: np.ndarray, y: np.ndarray, d: int,
                      fixed_noise: float | None):
    ls = np.exp(theta[:d])
    sv = np.exp(theta[d])
    nv = np.exp(theta[d + 1]) if fixed_noise is None else fixed_noise
    hyper = GPHyperparams(ls, sv, nv)
    try:
        lml, K, L, alpha = _lml_terms(hyper, X, y)
    except IllConditionedError:
        return 1e25, np.zeros_like(theta)
    Kn_inv = linalg.cho_solve((L, True), np.eye(X.shape[0]))
    M = np.outer(alpha, alpha) - Kn_inv
    raw = [0.5 * np.sum(M * dK) for _, _, dK in _kernel_grads(hyper, X, K)]
    # chain rule to log-parameters
    g = np.empty_like(theta)
    g[:d] = np.array(raw[:d]) * ls
    g[d] = raw[d] * sv
    if fixed_noise is None:
        g[d + 1] = raw[d + 1] * nv
    return -lml, -g


def fit_gp(data: Dataset, objective_index: int, rng,
           space: DesignSpace | None = None,
           learn_noise: bool = False,
           n_starts: int = 8,
           max_iter: int = 200,
           warm_start: GPHyperparams | None = None) -> GPModel:
    """Fit a GP to one objective column by maximizing the marginal likelihood.

    Inputs are rescaled to the unit cube and targets standardized internally;
    the returned model's hyperparameters are in original units.  When
    ``warm_start`` is given, only a single local ascent from those
    hyperparameters is performed (used for cheap refits inside the BO loop).
    """
    rng = np.random.default_rng(rng)
    mask = data.finite_mask
    X_raw = data.X[mask]
    y_raw = data.Y[mask, objective_index]
    n, d = X_raw.shape
    n_distinct = np.unique(X_raw, axis=0).shape[0]
    if n < 2 or n_distinct < 2:
        raise InvalidArgumentError("fit_gp needs at least 2 distinct designs")
    if n_distinct < n and data.noise_var == 0.0 and not learn_noise:
        raise IllConditionedError(
            "duplicate designs with zero observation noise make the Gram matrix singular"
        )

    if space is None:
        lo = X_raw.min(axis=0)
        hi = X_raw.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1.0)
        space = DesignSpace(lo, hi)
    X = space.to_unit(X_raw)
    y_mean = float(np.mean(y_raw))
    y_std = float(np.std(y_raw))
    y_scale = y_std if y_std > 1e-12 else 1.0
    y = (y_raw - y_mean) / y_scale

    fixed_noise = None if learn_noise else data.noise_var / y_scale**2

    lb = np.full(d + 2, np.log(1e-4))
    ub = np.full(d + 2, np.log(1e4))
    lb[d + 1], ub[d + 1] = np.log(1e-10), np.log(1e2)

    def starts():
        var_y = max(float(np.var(y)), 1e-4)
        s0 = np.concatenate([np.log(0.5 * np.ones(d)), [np.log(var_y)],
                             [np.log(max(fixed_noise or 1e-3, 1e-8))]])
        yield s0
        for _ in range(n_starts - 1):
            ls = rng.uniform(np.log(0.05), np.log(5.0), size=d)
            sv = rng.uniform(np.log(0.1), np.log(10.0))
            nv = rng.uniform(np.log(1e-6), np.log(1e-1))
            yield np.concatenate([ls, [sv], [nv]])

    dim_theta = d + 2 if learn_noise else d + 1
    best = None
    if warm_start is not None:
        start_list = [_theta_from_warm(warm_start, space, y_scale)]
        ascent_iters = min(max_iter, 60)
    else:
        start_list = list(starts())
        ascent_iters = max_iter
    for s in start_list:
        theta0 = s[:dim_theta]
        res = optimize.minimize(
            _neg_lml_and_grad, theta0, args=(X, y, d, fixed_noise),
            method="L-BFGS-B", jac=True,
            bounds=list(zip(lb[:dim_theta], ub[:dim_theta])),
            options={"maxiter": ascent_iters, "ftol": 1e-14, "gtol": 1e-10},
        )
        if best is None or res.fun < best.fun:
            best = res
    theta = best.x
    if warm_start is None:
        # polish: a second tight ascent from the winner
        res = optimize.minimize(
            _neg_lml_and_grad, best.x, args=(X, y, d, fixed_noise),
            method="L-BFGS-B", jac=True,
            bounds=list(zip(lb[:dim_theta], ub[:dim_theta])),
            options={"maxiter": max_iter, "ftol": 1e-16, "gtol": 1e-12},
        )
        if res.fun <= best.fun:
            theta = res.x

    ls_unit = np.exp(theta[:d])
    sv_std = np.exp(theta[d])
    nv_std = np.exp(theta[d + 1]) if learn_noise else fixed_noise
    hyper = GPHyperparams(
        lengthscales=ls_unit * space.range,
        signal_var=sv_std * y_scale**2,
        noise_var=nv_std * y_scale**2,
    )
    return GPModel.from_hyperparams(X_raw, y_raw, hyper, mean_offset=y_mean)


def _theta_from_warm(warm: GPHyperparams, space: DesignSpace, y_scale: float):
    theta = np.concatenate([
        np.log(warm.lengthscales / space.range),
        [np.log(warm.signal_var / y_scale**2)],
        [np.log(max(warm.noise_var / y_scale**2, 1e-10))],
    ])
    return theta
