"""A small head-to-head: qPOTS against Sobol search on Branin-Currin.

Both policies start from the exact same seed data (repetition seeding is
policy-independent), so the comparison is paired.

Run:  python3 demos/qpots_vs_sobol.py
"""

from paretots import EAConfig, ExperimentConfig
from paretots.harness import _run_one_rep


def main():
    base = dict(benchmark="branin-currin", n_seed=20, budget=60,
                noise_var=1e-3, ea=EAConfig(pop_size=40, generations=10))

    for policy in ("qpots", "sobol"):
        cfg = ExperimentConfig(policy=policy, **base).resolved(2, 2)
        hist = _run_one_rep(cfg, rep=0)
        hv = hist.hypervolumes
        marks = "  ".join(f"{v:8.1f}" for v in hv[:: max(1, len(hv) // 6)])
        print(f"{policy:12s} hv trajectory: {marks}  ->  final {hv[-1]:.1f}")


if __name__ == "__main__":
    main()
