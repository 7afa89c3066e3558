import numpy as np
import pytest

from paretots.acquisition import (
    archive_of,
    ingest,
    make_initial_state,
    maximin_select,
    propose,
    qpots_step,
    resolve_ref_point,
    run_qpots,
    solve_inner_moo,
)
from paretots.benchmarks import get_benchmark
from paretots.config import ExperimentConfig
from paretots.errors import InvalidArgumentError
from paretots.gp import Dataset, DesignSpace, GPHyperparams, GPModel
from paretots.nsga2 import EAConfig

UNIT2 = DesignSpace.unit_cube(2)


def small_cfg(**over):
    base = dict(benchmark="branin-currin", policy="qpots", budget=26, n_seed=20,
                ea=EAConfig(pop_size=20, generations=5), noise_var=1e-4)
    base.update(over)
    return ExperimentConfig(**base).resolved(2, 2)


def stagewise_oracle(Xstar, Xn, q):
    """Independent greedy maximin reference (pure python loops)."""
    chosen = []
    obs = [tuple(r) for r in Xn]
    for _ in range(q):
        best_j, best_d = None, -1.0
        for j in range(len(Xstar)):
            if j in chosen:
                continue
            dmin = min(
                float(np.linalg.norm(Xstar[j] - np.array(p)))
                for p in obs + [tuple(Xstar[c]) for c in chosen]
            )
            if dmin > best_d + 1e-15:
                best_j, best_d = j, dmin
        chosen.append(best_j)
    return chosen


class TestRefPoint:
    def test_auto_hand_case(self):
        Y = np.array([[0.0, 10.0], [2.0, 4.0]])
        assert np.allclose(resolve_ref_point("auto", Y), [2.2, 10.6])

    def test_auto_skips_failed_rows(self):
        Y = np.array([[0.0, 1.0], [np.nan, np.nan], [1.0, 0.0]])
        assert np.allclose(resolve_ref_point("auto", Y), [1.1, 1.1])

    def test_explicit_passthrough(self):
        assert np.array_equal(resolve_ref_point([5.0, 6.0], np.zeros((2, 2))), [5.0, 6.0])

    def test_bad_string(self):
        with pytest.raises(InvalidArgumentError):
            resolve_ref_point("max", np.zeros((2, 2)))


class TestArchiveOf:
    def test_filters_dominated_and_failed(self):
        X = np.array([[0.1], [0.2], [0.3], [0.4]])
        Y = np.array([[0.0, 1.0], [1.0, 0.0], [2.0, 2.0], [np.nan, np.nan]])
        arch = archive_of(Dataset(X, Y))
        assert np.array_equal(arch.X, X[:2]) and np.array_equal(arch.Y, Y[:2])


class TestMaximinSelect:
    @pytest.mark.parametrize("seed", range(15))
    def test_matches_stagewise_oracle(self, seed):
        rng = np.random.default_rng(seed)
        Xstar = rng.uniform(size=(rng.integers(5, 50), 2))
        Xn = rng.uniform(size=(rng.integers(3, 20), 2))
        q = int(rng.integers(1, 6))
        q = min(q, Xstar.shape[0])
        batch = maximin_select(Xstar, Xn, q, space=UNIT2)
        expected = stagewise_oracle(Xstar, Xn, q)
        assert [p[0] for p in batch.provenance] == expected
        assert np.array_equal(batch.points, Xstar[expected])

    def test_prefix_property(self):
        rng = np.random.default_rng(99)
        Xstar = rng.uniform(size=(30, 3))
        Xn = rng.uniform(size=(10, 3))
        space = DesignSpace.unit_cube(3)
        big = maximin_select(Xstar, Xn, 5, space=space)
        for q in range(1, 5):
            small = maximin_select(Xstar, Xn, q, space=space)
            assert np.array_equal(small.points, big.points[:q])

    def test_q_clamped_with_warning(self):
        Xstar = np.array([[0.1, 0.1], [0.9, 0.9]])
        with pytest.warns(UserWarning, match="clamped"):
            batch = maximin_select(Xstar, np.array([[0.5, 0.5]]), 5, space=UNIT2)
        assert batch.points.shape == (2, 2)

    def test_tie_breaks_to_lowest_index(self):
        Xstar = np.array([[0.0, 0.4], [0.4, 0.0]])  # symmetric about the observation
        batch = maximin_select(Xstar, np.array([[0.0, 0.0]]), 1, space=UNIT2)
        assert batch.provenance[0][0] == 0

    def test_raw_distance_space(self):
        # anisotropic domain: unit scaling changes which point is farthest
        space = DesignSpace(np.array([0.0, 0.0]), np.array([1.0, 100.0]))
        Xn = np.array([[0.0, 0.0]])
        Xstar = np.array([[0.9, 10.0], [0.1, 30.0]])
        raw = maximin_select(Xstar, Xn, 1, space=space, distance_space="raw")
        unit = maximin_select(Xstar, Xn, 1, space=space, distance_space="unit")
        assert raw.provenance[0][0] == 1
        assert unit.provenance[0][0] == 0

    def test_empty_candidates(self):
        with pytest.raises(InvalidArgumentError):
            maximin_select(np.empty((0, 2)), np.array([[0.5, 0.5]]), 1, space=UNIT2)


def two_fitted_models(seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(15, 2))
    h = GPHyperparams(np.array([0.4, 0.4]), 1.0, 1e-4)
    m0 = GPModel.from_hyperparams(X, X[:, 0] + 0.05 * rng.normal(size=15), h)
    m1 = GPModel.from_hyperparams(X, 1 - X[:, 0] + 0.05 * rng.normal(size=15), h)
    return [m0, m1], X


class TestSolveInnerMOO:
    def test_returns_feasible_front(self):
        models, _ = two_fitted_models()
        arch = solve_inner_moo(models, UNIT2, EAConfig(pop_size=20, generations=5),
                               np.random.SeedSequence(0))
        assert arch.X.shape[0] >= 1
        assert UNIT2.contains(arch.X)

    def test_deterministic_in_seed_sequence(self):
        models, _ = two_fitted_models()
        a = solve_inner_moo(models, UNIT2, EAConfig(pop_size=20, generations=5),
                            np.random.SeedSequence(7))
        b = solve_inner_moo(models, UNIT2, EAConfig(pop_size=20, generations=5),
                            np.random.SeedSequence(7))
        assert np.array_equal(a.X, b.X)
        c = solve_inner_moo(models, UNIT2, EAConfig(pop_size=20, generations=5),
                            np.random.SeedSequence(8))
        assert not np.array_equal(a.X, c.X)


class TestLoop:
    def test_qpots_step_advances_state(self):
        cfg = small_cfg()
        bench = get_benchmark("branin-currin")
        state = make_initial_state(cfg, bench.space, bench,
                                   seed_seq=np.random.SeedSequence(1))
        n0 = state.evaluations
        qpots_step(state, 2, bench)
        assert state.evaluations == n0 + 2
        assert state.iteration == 1
        assert len(state.history.records) == 2  # seed entry + one step

    def test_archive_hv_monotone_over_run(self):
        cfg = small_cfg(budget=30)
        bench = get_benchmark("branin-currin")
        hist = run_qpots(cfg, bench, bench.space, seed_seq=np.random.SeedSequence(2))
        hv = hist.hypervolumes
        assert np.all(np.diff(hv) >= -1e-9)
        assert hist.records[-1].evaluations == 30

    def test_final_front_is_nondominated(self):
        cfg = small_cfg(budget=24)
        bench = get_benchmark("branin-currin")
        hist = run_qpots(cfg, bench, bench.space, seed_seq=np.random.SeedSequence(3))
        from paretots.pareto import nondominated_filter

        assert np.array_equal(nondominated_filter(hist.final_Y),
                              np.arange(hist.final_Y.shape[0]))

    def test_ingest_failed_rows_become_sentinels(self):
        cfg = small_cfg(budget=100)
        bench = get_benchmark("branin-currin")
        state = make_initial_state(cfg, bench.space, bench,
                                   seed_seq=np.random.SeedSequence(4))
        batch = propose(state, 2)
        Y = np.array([[1.0, 2.0], [np.inf, 3.0]])
        ingest(state, batch, Y)
        assert state.n_failures == 1
        assert np.all(np.isnan(state.data.Y[-1]))
        assert np.array_equal(state.data.Y[-2], [1.0, 2.0])

    def test_too_many_failures_abort(self):
        cfg = small_cfg(n_seed=6, budget=12)  # 10% of budget = 1.2 failures
        bench = get_benchmark("branin-currin")
        state = make_initial_state(cfg, bench.space, bench,
                                   seed_seq=np.random.SeedSequence(5))
        batch = propose(state, 2)
        with pytest.raises(RuntimeError, match="oracle failed"):
            ingest(state, batch, np.full((2, 2), np.nan))

    def test_deterministic_given_seed_sequence(self):
        cfg = small_cfg(budget=24)
        bench = get_benchmark("branin-currin")
        h1 = run_qpots(cfg, bench, bench.space, seed_seq=np.random.SeedSequence(6))
        h2 = run_qpots(cfg, bench, bench.space, seed_seq=np.random.SeedSequence(6))
        assert np.array_equal(h1.final_X, h2.final_X)
        assert np.array_equal(h1.hypervolumes, h2.hypervolumes)
