import csv
import json
import pickle

import numpy as np
import pytest
import yaml

from paretots import harness
from paretots.acquisition import make_initial_state, qpots_step
from paretots.benchmarks import get_benchmark, observe
from paretots.config import ExperimentConfig
from paretots.errors import ConfigError, ProtocolError
from paretots.nsga2 import EAConfig


def write_yaml(path, mapping):
    with open(path, "w") as fh:
        yaml.safe_dump(mapping, fh)
    return path


SMALL = dict(benchmark="branin-currin", policy="qpots", n_seed=15, budget=19,
             repetitions=2, noise_var=1e-4,
             ea=dict(pop_size=16, generations=4))


class TestConfig:
    def test_defaults_depend_on_dimension(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", dict(benchmark="zdt3-d5", budget=60))
        cfg = harness.load_config(p)
        assert cfg.n_seed == 50  # 10 * d
        assert cfg.ea.pop_size == 500  # 100 * d
        assert cfg.policy == "qpots" and cfg.q == 1

    def test_unknown_key_named(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", dict(benchmark="zdt3-d5", budget=60, qq=3))
        with pytest.raises(ConfigError, match="qq"):
            harness.load_config(p)

    def test_budget_must_exceed_seed(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", dict(benchmark="zdt3-d5", budget=50))
        with pytest.raises(ConfigError, match="budget"):
            harness.load_config(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            harness.load_config(tmp_path / "nope.yaml")

    def test_not_a_mapping(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError, match="mapping"):
            harness.load_config(p)

    def test_external_requires_dimensions(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", dict(benchmark="external", budget=30))
        with pytest.raises(ConfigError, match="d, K"):
            harness.load_config(p)

    def test_round_trip(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", SMALL)
        cfg = harness.load_config(p)
        harness.save_config(cfg, tmp_path / "back.yaml")
        again = harness.load_config(tmp_path / "back.yaml")
        assert again == cfg

    def test_bad_policy(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", dict(benchmark="zdt3-d5", budget=60,
                                                 policy="random"))
        with pytest.raises(ConfigError, match="policy"):
            harness.load_config(p)


class TestSeedFairness:
    def test_seed_data_policy_independent(self):
        bench = get_benchmark("branin-currin")
        base = dict(SMALL)
        base.pop("ea")
        cfgs = [ExperimentConfig(**{**base, "policy": pol},
                                 ea=EAConfig(pop_size=16, generations=4)).resolved(2, 2)
                for pol in ("qpots", "sobol", "scalarized-ts")]
        sets = [harness.make_seed_data(c, bench.space, bench, rep_seed=42) for c in cfgs]
        for X, Y in sets[1:]:
            assert np.array_equal(X, sets[0][0])
            assert np.array_equal(Y, sets[0][1])

    def test_different_reps_different_designs(self):
        bench = get_benchmark("branin-currin")
        cfg = ExperimentConfig.from_dict(SMALL).resolved(2, 2)
        X0, _ = harness.make_seed_data(cfg, bench.space, bench, rep_seed=0)
        X1, _ = harness.make_seed_data(cfg, bench.space, bench, rep_seed=1)
        assert not np.array_equal(X0, X1)


class TestRunExperiment:
    def test_outputs_and_determinism(self, tmp_path):
        cfg = ExperimentConfig.from_dict(SMALL).resolved(2, 2)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        h1 = harness.run_experiment(cfg, out_dir=out1)
        h2 = harness.run_experiment(cfg, out_dir=out2)
        assert len(h1) == 2
        for rep in range(2):
            for name in (f"rep{rep:02d}_history.csv", f"rep{rep:02d}_events.jsonl",
                         f"rep{rep:02d}_archive.csv"):
                assert (out1 / name).exists()
            # bit-identical apart from the wallclock column
            rows1 = list(csv.reader(open(out1 / f"rep{rep:02d}_history.csv")))
            rows2 = list(csv.reader(open(out2 / f"rep{rep:02d}_history.csv")))
            assert [r[:4] for r in rows1] == [r[:4] for r in rows2]
            assert (out1 / f"rep{rep:02d}_archive.csv").read_text() == \
                   (out2 / f"rep{rep:02d}_archive.csv").read_text()
        assert (out1 / "summary.csv").exists()
        rows = list(csv.DictReader(open(out1 / "summary.csv")))
        assert rows[0]["iter"] == "0"
        assert int(rows[-1]["evals"]) == cfg.budget

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        cfg = ExperimentConfig.from_dict({**SMALL, "repetitions": 1,
                                            "policy": "sobol"}).resolved(2, 2)
        monkeypatch.setenv(harness.OUTPUT_DIR_ENV, str(tmp_path / "envout"))
        harness.run_experiment(cfg)
        assert (tmp_path / "envout" / "summary.csv").exists()

    def test_external_rejected(self):
        cfg = ExperimentConfig(benchmark="external", d=2, K=2, n_seed=4,
                               budget=8).resolved(2, 2)
        with pytest.raises(ConfigError):
            harness.run_experiment(cfg)


def small_cfg(**over):
    base = dict(SMALL)
    base["ea"] = EAConfig(pop_size=16, generations=4)
    base.update(over)
    return ExperimentConfig(**base).resolved(2, 2)


class TestCheckpoint:
    def test_round_trip_preserves_stream(self, tmp_path):
        bench = get_benchmark("branin-currin")
        cfg = small_cfg()
        s1 = make_initial_state(cfg, bench.space, bench,
                                seed_seq=np.random.SeedSequence(0))
        harness.checkpoint(s1, tmp_path / "ck.pkl")
        s2 = harness.resume(tmp_path / "ck.pkl")
        oracle = bench
        qpots_step(s1, 1, oracle)
        qpots_step(s2, 1, oracle)
        assert np.array_equal(s1.data.X, s2.data.X)
        assert np.array_equal(s1.data.Y, s2.data.Y)

    def test_split_equals_straight_run(self, tmp_path):
        bench = get_benchmark("branin-currin")
        cfg = small_cfg(budget=18)
        straight = make_initial_state(cfg, bench.space, bench,
                                      seed_seq=np.random.SeedSequence(1))
        for _ in range(3):
            qpots_step(straight, 1, bench)

        split = make_initial_state(cfg, bench.space, bench,
                                   seed_seq=np.random.SeedSequence(1))
        qpots_step(split, 1, bench)
        harness.checkpoint(split, tmp_path / "mid.pkl")
        resumed = harness.resume(tmp_path / "mid.pkl")
        for _ in range(2):
            qpots_step(resumed, 1, bench)
        assert np.array_equal(straight.data.X, resumed.data.X)
        assert np.array_equal(straight.data.Y, resumed.data.Y)

    def test_integrity_check(self, tmp_path):
        bench = get_benchmark("branin-currin")
        state = make_initial_state(small_cfg(), bench.space, bench,
                                   seed_seq=np.random.SeedSequence(2))
        path = tmp_path / "ck.pkl"
        harness.checkpoint(state, path)
        blob = pickle.load(open(path, "rb"))
        blob["payload"] = blob["payload"][:-1] + b"\x00"
        pickle.dump(blob, open(path, "wb"))
        with pytest.raises(ProtocolError, match="integrity"):
            harness.resume(path)

    def test_version_check(self, tmp_path):
        path = tmp_path / "ck.pkl"
        pickle.dump({"version": 99, "sha256": "", "payload": b""}, open(path, "wb"))
        with pytest.raises(ProtocolError, match="version"):
            harness.resume(path)

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "junk.pkl"
        path.write_bytes(b"not a pickle")
        with pytest.raises(ProtocolError):
            harness.resume(path)


class TestAskTell:
    def drive(self, cfg, state_path, proposals_path, bench, rep_seed):
        """Answer every ask with the same noisy values an in-process run sees."""
        seed_noise = np.random.default_rng(np.random.SeedSequence([rep_seed, 1]))
        loop_noise = np.random.default_rng(np.random.SeedSequence([rep_seed, 2]))
        # seed batch
        harness.ask(state_path, proposals_path)
        state = self.answer(proposals_path, state_path, bench, cfg, seed_noise)
        while state.data.n < cfg.budget:
            harness.ask(state_path, proposals_path)
            state = self.answer(proposals_path, state_path, bench, cfg, loop_noise)
        return state

    @staticmethod
    def answer(proposals_path, state_path, bench, cfg, noise_rng):
        obs_path = str(proposals_path) + ".obs"
        with open(proposals_path) as fh, open(obs_path, "w") as out:
            for line in fh:
                rec = json.loads(line)
                y = observe(bench, np.array(rec["x"]), cfg.noise_var, noise_rng)
                out.write(json.dumps({"id": rec["id"], "y": [float(v) for v in y]}) + "\n")
        return harness.tell(state_path, obs_path)

    def test_matches_in_process_run(self, tmp_path):
        cfg = small_cfg(budget=18, q=2)
        bench = get_benchmark("branin-currin")
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        state = self.drive(cfg, sp, tmp_path / "props.jsonl", bench, cfg.base_seed)

        inproc = harness._run_one_rep(cfg, rep=0)
        # same evaluations in the same order, bit for bit
        ext_events = [(r.iteration, r.evaluations) for r in state.history.records]
        in_events = [(r.iteration, r.evaluations) for r in inproc.records]
        assert ext_events == in_events
        for a, b in zip(state.history.records, inproc.records):
            assert np.array_equal(a.batch_X, b.batch_X)
            assert np.array_equal(a.batch_Y, b.batch_Y)
            assert a.hypervolume == b.hypervolume

    def test_tell_without_ask(self, tmp_path):
        cfg = small_cfg()
        bench = get_benchmark("branin-currin")
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        pp = tmp_path / "p.jsonl"
        harness.ask(sp, pp)
        self.answer(pp, sp, bench, cfg,
                    np.random.default_rng(np.random.SeedSequence([0, 1])))
        obs = tmp_path / "stale.jsonl"
        obs.write_text('{"id": 0, "y": [1.0, 2.0]}\n')
        with pytest.raises(ProtocolError, match="pending"):
            harness.tell(sp, obs)

    def test_id_mismatch(self, tmp_path):
        cfg = small_cfg()
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        harness.ask(sp, tmp_path / "p.jsonl")
        obs = tmp_path / "o.jsonl"
        obs.write_text('{"id": 999, "y": [1.0, 2.0]}\n')
        with pytest.raises(ProtocolError, match="mismatch"):
            harness.tell(sp, obs)

    def test_duplicate_id(self, tmp_path):
        cfg = small_cfg()
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        harness.ask(sp, tmp_path / "p.jsonl")
        obs = tmp_path / "o.jsonl"
        obs.write_text('{"id": 0, "y": [1.0, 2.0]}\n{"id": 0, "y": [1.0, 2.0]}\n')
        with pytest.raises(ProtocolError, match="duplicate"):
            harness.tell(sp, obs)

    def test_failed_rows_accepted_as_sentinels(self, tmp_path):
        cfg = small_cfg(n_seed=4, budget=19)
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        pp = tmp_path / "p.jsonl"
        harness.ask(sp, pp)
        obs = tmp_path / "o.jsonl"
        with open(pp) as fh, open(obs, "w") as out:
            for i, line in enumerate(fh):
                rec = json.loads(line)
                if i == 0:
                    out.write(json.dumps({"id": rec["id"], "failed": True}) + "\n")
                else:
                    out.write(json.dumps({"id": rec["id"], "y": [1.0, 2.0]}) + "\n")
        state = harness.tell(sp, obs)
        assert np.all(np.isnan(state.data.Y[0]))
        assert np.array_equal(state.data.Y[1], [1.0, 2.0])

    def test_wrong_vector_length(self, tmp_path):
        cfg = small_cfg()
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        harness.ask(sp, tmp_path / "p.jsonl")
        obs = tmp_path / "o.jsonl"
        obs.write_text("\n".join(
            json.dumps({"id": i, "y": [1.0]}) for i in range(15)) + "\n")
        with pytest.raises(ProtocolError, match="expected 2 values"):
            harness.tell(sp, obs)

    def test_ask_after_budget_exhausted(self, tmp_path):
        cfg = small_cfg(n_seed=4, budget=5)
        bench = get_benchmark("branin-currin")
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        self.drive(cfg, sp, tmp_path / "p.jsonl", bench, cfg.base_seed)
        with pytest.raises(ProtocolError, match="exhausted"):
            harness.ask(sp, tmp_path / "p.jsonl")

    def test_ask_is_idempotent_while_pending(self, tmp_path):
        cfg = small_cfg()
        sp = tmp_path / "state.pkl"
        harness.init_external_state(cfg, sp)
        p1 = harness.ask(sp, tmp_path / "a.jsonl")
        p2 = harness.ask(sp, tmp_path / "b.jsonl")
        assert p1.read_text() == p2.read_text()
