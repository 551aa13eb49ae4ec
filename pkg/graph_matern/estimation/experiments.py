"""Monte-Carlo consistency of the tau estimator and exact kriging-misspecification ratios."""

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from graph_matern.core.exceptions import InvalidParameterError, SingularSystemError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings
from graph_matern.estimation.mle import DEFAULT_KAPPA_BOUNDS, fit_profile_mle
from graph_matern.graph.locations import regular_locations, uniform_locations
from graph_matern.graph.metric_graph import MetricGraph
from graph_matern.inference.likelihood import location_covariance
from graph_matern.inference.simulation import simulate_field, simulate_observations
from graph_matern.models.params import ModelParams
from graph_matern.models.results import ConsistencyRow, MisspecificationRow

logger = get_logger(__name__)


def _replicate_tau2(
    graph: MetricGraph,
    params: ModelParams,
    n: int,
    seed: np.random.SeedSequence,
    kappa_bounds: tuple[float, float],
) -> float:
    rng = np.random.default_rng(seed)
    locations = uniform_locations(graph, n, rng)
    values = simulate_field(graph, params, locations, seed=int(rng.integers(2**63)))
    obs = simulate_observations(locations, values, 0.0)
    fit = fit_profile_mle(graph, obs, params.alpha, kappa_bounds, boundary=params.boundary)
    return fit.params.tau**2


def consistency_experiment(
    graph: MetricGraph,
    params: ModelParams,
    n_grid: Sequence[int],
    replicates: int,
    seed: int | None = None,
    kappa_bounds: tuple[float, float] = DEFAULT_KAPPA_BOUNDS,
) -> list[ConsistencyRow]:
    """Simulate direct observations, fit tau^2 by profile likelihood, summarize per n.

    sd(tau^2_hat) * sqrt(n) is reported next to its limit sqrt(2) tau^2.
    """
    if replicates < 2:
        raise InvalidParameterError("need at least 2 replicates", field="replicates", value=replicates)
    truth = params.with_values(sigma=0.0)
    children = np.random.SeedSequence(seed).spawn(len(n_grid) * replicates)
    tasks = [(n, children[i * replicates + r]) for i, n in enumerate(n_grid) for r in range(replicates)]

    with ThreadPoolExecutor(max_workers=settings.NUM_THREADS) as pool:
        estimates = list(pool.map(lambda task: _replicate_tau2(graph, truth, task[0], task[1], kappa_bounds), tasks))

    tau2 = truth.tau**2
    rows = []
    for i, n in enumerate(n_grid):
        sample = np.array(estimates[i * replicates : (i + 1) * replicates])
        sd = float(np.std(sample, ddof=1))
        rows.append(
            ConsistencyRow(
                n=n,
                replicates=replicates,
                mean_tau2=float(sample.mean()),
                bias=float(sample.mean() - tau2),
                sd=sd,
                sd_sqrt_n=sd * math.sqrt(n),
                reference=math.sqrt(2.0) * tau2,
            )
        )
        logger.info(f"Consistency n={n}: mean tau^2={sample.mean():.6g}, sd*sqrt(n)={sd * math.sqrt(n):.6g}")
    return rows


def _factor(matrix: np.ndarray, what: str):
    try:
        return cho_factor(matrix, lower=True)
    except LinAlgError as e:
        raise SingularSystemError(what, str(e)) from e


def kriging_mse_ratios(
    graph: MetricGraph,
    truth: ModelParams,
    working: ModelParams,
    n: int,
    targets: Sequence,
) -> np.ndarray:
    """MSE of the working-model predictor over the MSE of the true-model predictor, per target.

    Both predictors are linear in y, so their MSEs under the true model are exact.
    """
    locations = regular_locations(graph, n)
    joint = list(locations) + list(targets)

    true_cov = location_covariance(graph, truth, joint)
    work_cov = location_covariance(graph, working, joint)
    true_obs = true_cov[:n, :n] + truth.sigma**2 * np.eye(n)
    work_obs = work_cov[:n, :n] + working.sigma**2 * np.eye(n)
    true_cross = true_cov[:n, n:]
    prior = np.diag(true_cov)[n:]

    true_weights = cho_solve(_factor(true_obs, "true observation covariance"), true_cross)
    work_weights = cho_solve(_factor(work_obs, "working observation covariance"), work_cov[:n, n:])

    optimal = prior - np.einsum("ij,ij->j", true_cross, true_weights)
    spread = np.einsum("ij,ij->j", work_weights, true_obs @ work_weights)
    working_mse = prior - 2.0 * np.einsum("ij,ij->j", work_weights, true_cross) + spread
    return working_mse / optimal


def kriging_misspec_experiment(
    graph: MetricGraph,
    truth: ModelParams,
    working: ModelParams,
    n_grid: Sequence[int],
    n_targets: int = 50,
    seed: int | None = None,
) -> list[MisspecificationRow]:
    """Exact MSE ratios at random held-out targets for regular designs of growing size."""
    targets = uniform_locations(graph, n_targets, np.random.default_rng(seed))
    rows = []
    for n in n_grid:
        ratios = kriging_mse_ratios(graph, truth, working, n, targets)
        rows.append(MisspecificationRow(n=n, max_ratio=float(ratios.max()), mean_ratio=float(ratios.mean())))
        logger.info(f"Misspecification n={n}: max ratio {ratios.max():.6g}")
    return rows
