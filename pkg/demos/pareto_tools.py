"""Nondominated filtering, hypervolume, and the NSGA-II inner solver.

Run:  python3 demos/pareto_tools.py
"""

import numpy as np

from paretots import (
    DesignSpace,
    EAConfig,
    hypervolume,
    igd,
    nondominated_filter,
    nsga2_run,
)


def main():
    # two points at (0.2, 0.8) and (0.8, 0.2) dominate 0.28 of the unit box
    front = np.array([[0.2, 0.8], [0.8, 0.2], [0.9, 0.9]])
    keep = nondominated_filter(front)
    print(f"nondominated rows: {list(keep)} (the third point is dominated)")
    print(f"hypervolume vs ref (1,1): {hypervolume(front[keep], [1, 1]):.4f}")

    # solve ZDT3 (d=5), a problem with a disconnected Pareto frontier
    d = 5

    def zdt3(X):
        f1 = X[:, 0]
        g = 1 + 9 * X[:, 1:].sum(axis=1) / (d - 1)
        h = 1 - np.sqrt(f1 / g) - (f1 / g) * np.sin(10 * np.pi * f1)
        return np.column_stack([f1, g * h])

    arch = nsga2_run(zdt3, DesignSpace.unit_cube(d),
                     EAConfig(pop_size=100, generations=100, seed=0))
    print(f"\nNSGA-II found {arch.Y.shape[0]} nondominated points on ZDT3")
    print(f"hypervolume vs ref (11,11): {hypervolume(arch.Y, [11, 11]):.3f}")

    # distance to the analytic front
    pieces = [(0.0, 0.0830015349), (0.1822287280, 0.2577623634),
              (0.4093136748, 0.4538821041), (0.6183967944, 0.6525117038),
              (0.8233317983, 0.8518328654)]
    ref = []
    for lo, hi in pieces:
        f1 = np.linspace(lo, hi, 60)
        ref.append(np.column_stack([f1, 1 - np.sqrt(f1) - f1 * np.sin(10 * np.pi * f1)]))
    print(f"IGD to the analytic front: {igd(np.vstack(ref), arch.Y):.4f}")


if __name__ == "__main__":
    main()
