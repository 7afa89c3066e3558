"""Synthetic multiobjective test functions on the unit cube (minimization).

Branin-Currin, ZDT3, DTLZ3, and DTLZ7, with additive Gaussian observation
noise available through :func:`observe`.  Closed forms follow the original
benchmark literature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .gp import DesignSpace

__all__ = [
    "Benchmark",
    "branin_currin",
    "zdt3",
    "dtlz3",
    "dtlz7",
    "observe",
    "get_benchmark",
    "BENCHMARK_NAMES",
]


@dataclass(frozen=True)
class Benchmark:
    name: str
    d: int
    K: int
    space: DesignSpace
    eval_batch: Callable[[np.ndarray], np.ndarray]  # (n, d) -> (n, K), noiseless

    def __call__(self, x) -> np.ndarray:
        return self.eval_batch(np.atleast_2d(np.asarray(x, dtype=float)))[0]


def _check_unit(x: np.ndarray, d: int | None = None):
    x = np.asarray(x, dtype=float)
    if d is not None and x.shape[-1] != d:
        raise InvalidArgumentError(f"expected dimension {d}, got {x.shape[-1]}")
    if np.any(x < -1e-12) or np.any(x > 1 + 1e-12):
        raise InvalidArgumentError("input outside the unit cube")
    return np.clip(x, 0.0, 1.0)


def _branin_batch(X: np.ndarray) -> np.ndarray:
    # rescaled to [0,1]^2: x1' in [-5, 10], x2' in [0, 15]
    x1 = 15.0 * X[:, 0] - 5.0
    x2 = 15.0 * X[:, 1]
    a, b, c = 1.0, 5.1 / (4 * np.pi**2), 5.0 / np.pi
    r, s, t = 6.0, 10.0, 1.0 / (8 * np.pi)
    return a * (x2 - b * x1**2 + c * x1 - r) ** 2 + s * (1 - t) * np.cos(x1) + s


def _currin_batch(X: np.ndarray) -> np.ndarray:
    x1, x2 = X[:, 0], X[:, 1]
    with np.errstate(divide="ignore"):
        factor = np.where(x2 > 0, 1.0 - np.exp(-1.0 / (2.0 * np.maximum(x2, 1e-300))), 1.0)
    num = 2300 * x1**3 + 1900 * x1**2 + 2092 * x1 + 60
    den = 100 * x1**3 + 500 * x1**2 + 4 * x1 + 20
    return factor * num / den


def branin_currin(x) -> np.ndarray:
    """Rescaled Branin paired with the Currin exponential on [0,1]^2."""
    x = _check_unit(np.atleast_1d(x), 2)
    X = x[None, :]
    return np.array([_branin_batch(X)[0], _currin_batch(X)[0]])


def _zdt3_batch(X: np.ndarray) -> np.ndarray:
    d = X.shape[1]
    f1 = X[:, 0]
    g = 1.0 + 9.0 * X[:, 1:].sum(axis=1) / (d - 1)
    h = 1.0 - np.sqrt(f1 / g) - (f1 / g) * np.sin(10 * np.pi * f1)
    return np.column_stack([f1, g * h])


def zdt3(x) -> np.ndarray:
    """ZDT3: two objectives with a disconnected Pareto frontier."""
    x = _check_unit(np.atleast_1d(x))
    if x.shape[0] < 2:
        raise InvalidArgumentError("zdt3 needs d >= 2")
    return _zdt3_batch(x[None, :])[0]


def _dtlz3_batch(X: np.ndarray, K: int) -> np.ndarray:
    d = X.shape[1]
    XM = X[:, K - 1:]
    z = XM - 0.5
    g = 100.0 * (XM.shape[1] + np.sum(z**2 - np.cos(20 * np.pi * z), axis=1))
    theta = X[:, : K - 1] * np.pi / 2
    F = np.empty((X.shape[0], K))
    for k in range(K):
        f = 1.0 + g
        for j in range(K - 1 - k):
            f = f * np.cos(theta[:, j])
        if k > 0:
            f = f * np.sin(theta[:, K - 1 - k])
        F[:, k] = f
    return F


def dtlz3(x, K: int = 2) -> np.ndarray:
    """DTLZ3: spherical front (unit norm at g = 0), Rastrigin-style g."""
    x = _check_unit(np.atleast_1d(x))
    if x.shape[0] < K:
        raise InvalidArgumentError("dtlz3 needs d >= K")
    return _dtlz3_batch(x[None, :], K)[0]


def _dtlz7_batch(X: np.ndarray, K: int) -> np.ndarray:
    XM = X[:, K - 1:]
    g = 1.0 + 9.0 * XM.mean(axis=1)
    F = np.empty((X.shape[0], K))
    F[:, : K - 1] = X[:, : K - 1]
    fk = F[:, : K - 1]
    h = K - np.sum(fk / (1.0 + g[:, None]) * (1.0 + np.sin(3 * np.pi * fk)), axis=1)
    F[:, K - 1] = (1.0 + g) * h
    return F


def dtlz7(x, K: int = 2) -> np.ndarray:
    """DTLZ7: disconnected front via the sinusoidal h-function."""
    x = _check_unit(np.atleast_1d(x))
    if x.shape[0] < K:
        raise InvalidArgumentError("dtlz7 needs d >= K")
    return _dtlz7_batch(x[None, :], K)[0]


def observe(bench: Benchmark, x, noise_var: float, rng) -> np.ndarray:
    """Noisy observation: eval(x) plus iid zero-mean Gaussian per objective."""
    if noise_var < 0:
        raise InvalidArgumentError("noise_var must be nonnegative")
    y = bench(x)
    if noise_var == 0:
        return y
    rng = np.random.default_rng(rng)
    return y + rng.normal(0.0, np.sqrt(noise_var), size=y.shape)


def _make(name: str, d: int, K: int, fn) -> Benchmark:
    def batch(X: np.ndarray) -> np.ndarray:
        X = _check_unit(np.atleast_2d(X), d)
        return fn(X)

    return Benchmark(name, d, K, DesignSpace.unit_cube(d), batch)


def _registry() -> dict[str, Benchmark]:
    reg = {}
    reg["branin-currin"] = _make(
        "branin-currin", 2, 2,
        lambda X: np.column_stack([_branin_batch(X), _currin_batch(X)]),
    )
    for d in (5, 10):
        reg[f"zdt3-d{d}"] = _make(f"zdt3-d{d}", d, 2, _zdt3_batch)
        reg[f"dtlz3-d{d}"] = _make(f"dtlz3-d{d}", d, 2, lambda X: _dtlz3_batch(X, 2))
        reg[f"dtlz7-d{d}"] = _make(f"dtlz7-d{d}", d, 2, lambda X: _dtlz7_batch(X, 2))
    return reg


_REGISTRY = _registry()
BENCHMARK_NAMES = tuple(sorted(_REGISTRY))


def get_benchmark(name: str) -> Benchmark:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown benchmark {name!r}; available: {', '.join(BENCHMARK_NAMES)}"
        ) from None
