"""paretots: batch Pareto-optimal Thompson sampling for multiobjective
Bayesian optimization.

Gaussian-process surrogates per objective, consistent posterior sample
paths (exact or Nystrom square roots), an NSGA-II inner solver, greedy
maximin batch selection, synthetic benchmarks, baselines, and a seeded
experiment harness with an ask/tell protocol for external oracles.
"""

from .acquisition import (
    AcquisitionBatch,
    BOState,
    maximin_select,
    qpots_step,
    run_qpots,
    solve_inner_moo,
)
from .baselines import SobolStream, run_scalarized_ts, run_sobol, sobol_next
from .benchmarks import (
    BENCHMARK_NAMES,
    Benchmark,
    branin_currin,
    dtlz3,
    dtlz7,
    get_benchmark,
    observe,
    zdt3,
)
from .config import EAConfig, ExperimentConfig, PathConfig, RunHistory
from .errors import (
    CacheLimitError,
    ConfigError,
    IllConditionedError,
    InvalidArgumentError,
    ProtocolError,
)
from .gp import (
    Dataset,
    DesignSpace,
    GPHyperparams,
    GPModel,
    fit_gp,
    log_marginal_likelihood,
    matern52,
    matern52_matrix,
)
from .harness import (
    ask,
    checkpoint,
    load_config,
    resume,
    run_experiment,
    save_config,
    tell,
)
from .nsga2 import nsga2_run, polynomial_mutation, sbx_crossover
from .pareto import (
    ParetoArchive,
    crowding_distance,
    dominates,
    fast_nondominated_sort,
    hypervolume,
    igd,
    nondominated_filter,
)
from .paths import PathState, SqrtFactor, exact_sqrt, nystrom_sqrt, select_inducing

__version__ = "0.1.0"
