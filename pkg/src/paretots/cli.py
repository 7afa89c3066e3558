"""Command line interface for running experiments and driving ask/tell.

Exit codes: 0 success, 2 configuration error, 3 protocol error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import harness
from .config import POLICY_NAMES
from .errors import ConfigError, IllConditionedError, InvalidArgumentError, ProtocolError
from .pareto import hypervolume


def _cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    if args.policy:
        from .config import ExperimentConfig

        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "policy": args.policy})
    if cfg.benchmark == "external":
        state_path = args.state or "external_state.pkl"
        harness.init_external_state(cfg, state_path)
        print(f"external oracle configured; state written to {state_path}; "
              f"drive it with 'paretots ask' / 'paretots tell'")
        return 0
    histories = harness.run_experiment(cfg, workers=args.workers, out_dir=args.out)
    final = [h.records[-1].hypervolume for h in histories]
    print(f"completed {len(histories)} repetition(s); "
          f"final hypervolume mean {np.mean(final):.6g} std {np.std(final):.6g}")
    return 0


def _cmd_ask(args) -> int:
    out = harness.ask(args.state, args.proposals)
    print(f"proposals written to {out}")
    return 0


def _cmd_tell(args) -> int:
    state = harness.tell(args.state, args.obs)
    print(f"state advanced to {state.data.n} evaluations (iteration {state.iteration})")
    return 0


def _cmd_resume(args) -> int:
    state = harness.resume(args.state)
    if state.data is None or state.data.n >= state.cfg.budget:
        print("nothing to resume")
        return 0
    bench = harness.get_benchmark(state.cfg.benchmark)
    oracle = harness.make_oracle(state.cfg, bench, state.cfg.base_seed)
    from .acquisition import qpots_step

    while state.data.n < state.cfg.budget:
        q = min(state.cfg.q, state.cfg.budget - state.data.n)
        qpots_step(state, q, oracle)
        harness.checkpoint(state, args.state)
    print(f"run complete at {state.data.n} evaluations")
    return 0


def _cmd_hv(args) -> int:
    ref = np.array([float(v) for v in args.ref.split(",")])
    with open(args.archive) as fh:
        rows = list(csv.DictReader(fh))
    ycols = [c for c in (rows[0].keys() if rows else []) if c.startswith("y")]
    if not ycols:
        raise ConfigError(f"no y columns found in {args.archive}")
    Y = np.array([[float(r[c]) for c in ycols] for r in rows])
    print(f"{hypervolume(Y, ref):.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paretots",
                                description="Batch Pareto-optimal Thompson sampling experiments")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a configured experiment")
    r.add_argument("--config", required=True)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--policy", choices=POLICY_NAMES, help="override the config's policy")
    r.add_argument("--out", default=None, help="output directory override")
    r.add_argument("--state", default=None, help="state path for external oracles")
    r.set_defaults(fn=_cmd_run)

    a = sub.add_parser("ask", help="write the next proposal batch")
    a.add_argument("--state", required=True)
    a.add_argument("--proposals", default=None)
    a.set_defaults(fn=_cmd_ask)

    t = sub.add_parser("tell", help="ingest observations for the pending batch")
    t.add_argument("--state", required=True)
    t.add_argument("--obs", required=True)
    t.set_defaults(fn=_cmd_tell)

    s = sub.add_parser("resume", help="continue an interrupted benchmark run")
    s.add_argument("--state", required=True)
    s.set_defaults(fn=_cmd_resume)

    h = sub.add_parser("hv", help="hypervolume of an archive CSV")
    h.add_argument("--archive", required=True)
    h.add_argument("--ref", required=True, help="comma-separated reference point")
    h.set_defaults(fn=_cmd_hv)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return 3
    except (IllConditionedError, InvalidArgumentError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
