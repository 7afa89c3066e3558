"""Driving the optimizer with an external oracle through ask/tell.

The same protocol works from the command line (`paretots ask` / `paretots
tell`); here we call the harness functions directly and play the oracle
ourselves.

Run:  python3 demos/ask_tell.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from paretots import EAConfig, ExperimentConfig
from paretots.benchmarks import get_benchmark
from paretots.harness import ask, init_external_state, tell


def main():
    cfg = ExperimentConfig(
        benchmark="external", d=2, K=2, n_seed=10, budget=16,
        noise_var=0.0, ea=EAConfig(pop_size=20, generations=5),
    ).resolved(2, 2)

    # pretend branin-currin is an expensive simulator we can only call by hand
    simulator = get_benchmark("branin-currin")

    with tempfile.TemporaryDirectory() as tmp:
        state_path = Path(tmp) / "state.pkl"
        init_external_state(cfg, state_path)

        evals = 0
        while evals < cfg.budget:
            proposals = ask(state_path)
            obs_path = Path(tmp) / "obs.jsonl"
            with open(proposals) as fh, open(obs_path, "w") as out:
                for line in fh:
                    rec = json.loads(line)
                    y = simulator(np.array(rec["x"]))
                    out.write(json.dumps({"id": rec["id"],
                                          "y": [float(v) for v in y]}) + "\n")
            state = tell(state_path, obs_path)
            evals = state.data.n
            print(f"told {evals:2d}/{cfg.budget} evaluations, "
                  f"archive hv {state.history.records[-1].hypervolume:.1f}")


if __name__ == "__main__":
    main()
