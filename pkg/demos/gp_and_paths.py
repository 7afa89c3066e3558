"""Fit a GP to noisy 1-D data and draw consistent posterior sample paths.

Run:  python3 demos/gp_and_paths.py
"""

import numpy as np

from paretots import Dataset, DesignSpace, PathState, fit_gp


def main():
    rng = np.random.default_rng(0)
    space = DesignSpace.unit_cube(1)

    # ten noisy observations of a wiggly function
    X = rng.uniform(size=(10, 1))
    y = np.sin(8 * X[:, 0]) + 0.1 * rng.normal(size=10)
    data = Dataset(X, y[:, None], noise_var=0.01)

    model = fit_gp(data, objective_index=0, rng=0, space=space)
    h = model.hyper
    print(f"fitted lengthscale {h.lengthscales[0]:.3f}, "
          f"signal variance {h.signal_var:.3f}")

    grid = np.linspace(0, 1, 9)[:, None]
    mean, var = model.posterior(grid, full_cov=False)
    print("\n  x     mean    +-2sd")
    for g, m, v in zip(grid[:, 0], mean, np.sqrt(var)):
        print(f"  {g:.3f}  {m:+.3f}  {2 * v:.3f}")

    # a sample path is one coherent realization: re-querying a point
    # returns the value already realized there
    path = PathState(model, rng=1)
    first = path(grid)
    again = path(grid)
    print(f"\npath re-query identical: {np.array_equal(first, again)}")

    # three different paths all interpolate the data region but disagree
    # where the posterior is uncertain
    spread = np.std([PathState(model, rng=s)(grid) for s in range(3)], axis=0)
    print(f"path spread at grid points: min {spread.min():.3f} max {spread.max():.3f}")


if __name__ == "__main__":
    main()
