"""Maximum-likelihood estimation of (kappa, tau, sigma) for fixed alpha."""

import math
from collections.abc import Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from graph_matern.core.exceptions import InvalidObservationError, InvalidParameterError, NumericalError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings
from graph_matern.graph.metric_graph import MetricGraph
from graph_matern.inference.likelihood import loglik
from graph_matern.inference.observations import ObservationSet
from graph_matern.models.params import BoundaryMode, ModelParams
from graph_matern.models.results import FitResult, ProfilePoint

logger = get_logger(__name__)

DEFAULT_KAPPA_BOUNDS = (1e-2, 1e2)
LOG_LIMIT = 50.0
MIN_OBSERVATIONS = 3


def _check_bounds(bounds: tuple[float, float]) -> tuple[float, float]:
    low, high = float(bounds[0]), float(bounds[1])
    if not (0 < low < high and math.isfinite(high)):
        raise InvalidParameterError(f"invalid kappa bounds {bounds}", field="kappa_bounds", value=bounds)
    return low, high


def _initial_tau(alpha: int, kappa: float, variance: float) -> float:
    """tau giving the stationary variance `variance` at this kappa."""
    if alpha == 1:
        return math.sqrt(1.0 / (2.0 * kappa * variance))
    return math.sqrt(1.0 / (4.0 * kappa**3 * variance))


def fit_mle(
    graph: MetricGraph,
    obs: ObservationSet,
    alpha: int,
    kappa_bounds: tuple[float, float] = DEFAULT_KAPPA_BOUNDS,
    sigma: float | None = None,
    method: str = "auto",
    boundary: BoundaryMode = BoundaryMode.KIRCHHOFF,
    starts: int | None = None,
) -> FitResult:
    """Nelder-Mead on (log kappa, log tau[, log sigma]) from several kappa starts.

    sigma=None estimates the noise; a number pins it (0 for direct observations).
    """
    if obs.n < MIN_OBSERVATIONS:
        raise InvalidObservationError(
            f"need at least {MIN_OBSERVATIONS} observations to fit, got {obs.n}", field="values"
        )
    low, high = _check_bounds(kappa_bounds)
    template = ModelParams(alpha=alpha, kappa=1.0, tau=1.0, sigma=sigma or 0.0, boundary=boundary)
    estimate_sigma = sigma is None

    variance = float(np.var(obs.values)) or 1.0
    starts = starts or settings.MLE_STARTS
    kappa_starts = np.geomspace(low, high, starts + 2)[1:-1]

    def unpack(theta: np.ndarray) -> ModelParams:
        values = {"kappa": math.exp(theta[0]), "tau": math.exp(theta[1])}
        if estimate_sigma:
            values["sigma"] = math.exp(theta[2])
        return template.with_values(**values)

    def objective(theta: np.ndarray) -> float:
        try:
            return -loglik(graph, unpack(theta), obs, method)
        except NumericalError as e:
            logger.debug(f"Objective failed at {np.exp(theta)}: {e.message}")
            return math.inf

    free = (-LOG_LIMIT, LOG_LIMIT)
    bounds = [(math.log(low), math.log(high)), free] + ([free] if estimate_sigma else [])
    best = None
    for kappa0 in kappa_starts:
        theta0 = [math.log(kappa0), math.log(_initial_tau(alpha, kappa0, variance))]
        if estimate_sigma:
            theta0.append(math.log(0.1 * math.sqrt(variance)))
        result = minimize(
            objective,
            np.array(theta0),
            method="Nelder-Mead",
            bounds=bounds,
            options={"fatol": settings.MLE_FATOL, "xatol": settings.MLE_XATOL, "maxiter": settings.MLE_MAXITER},
        )
        logger.debug(f"Start kappa0={kappa0:.4g}: -loglik={result.fun:.10g}, success={result.success}")
        if best is None or result.fun < best.fun:
            best = result

    if not math.isfinite(best.fun):
        raise NumericalError("likelihood could not be evaluated at any start point", error_code="MLE_FAILED")
    converged = bool(best.success)
    if not converged:
        logger.warning(f"MLE did not converge: {best.message}")

    return FitResult(
        params=unpack(best.x),
        loglik=float(-best.fun),
        method="nelder-mead",
        iterations=int(best.nit),
        evaluations=int(best.nfev),
        converged=converged,
        message=str(best.message),
    )


# ============================================================================
# Profile likelihood in tau (direct observations)
# ============================================================================


def profile_point(
    graph: MetricGraph,
    obs: ObservationSet,
    alpha: int,
    kappa: float,
    method: str = "auto",
    boundary: BoundaryMode = BoundaryMode.KIRCHHOFF,
) -> ProfilePoint:
    """tau^2 maximizing the likelihood at fixed kappa, and the profile log-likelihood.

    With sigma = 0 the covariance is Gamma / tau^2, so the log-likelihood is
    a + (n/2) log s - s q / 2 in s = tau^2 with q = y^T Gamma^{-1} y. Evaluating at s = 1 and
    s = 2 recovers q and a; then tau^2 = n / q.
    """
    n = obs.n
    params = ModelParams(alpha=alpha, kappa=kappa, tau=1.0, sigma=0.0, boundary=boundary)
    at_one = loglik(graph, params, obs, method)
    at_two = loglik(graph, params.with_values(tau=math.sqrt(2.0)), obs, method)
    q = n * math.log(2.0) - 2.0 * (at_two - at_one)
    if not q > 0:
        raise NumericalError(f"non-positive quadratic form {q} in profile likelihood", error_code="PROFILE_FAILED")
    constant = at_one + 0.5 * q
    tau2 = n / q
    return ProfilePoint(kappa=kappa, tau2=tau2, loglik=constant + 0.5 * n * math.log(tau2) - 0.5 * n)


def profile_curve(
    graph: MetricGraph,
    obs: ObservationSet,
    alpha: int,
    kappas: Sequence[float],
    method: str = "auto",
    boundary: BoundaryMode = BoundaryMode.KIRCHHOFF,
) -> list[ProfilePoint]:
    return [profile_point(graph, obs, alpha, float(k), method, boundary) for k in kappas]


def fit_profile_mle(
    graph: MetricGraph,
    obs: ObservationSet,
    alpha: int,
    kappa_bounds: tuple[float, float] = DEFAULT_KAPPA_BOUNDS,
    method: str = "auto",
    boundary: BoundaryMode = BoundaryMode.KIRCHHOFF,
) -> FitResult:
    """Bounded scalar search over log kappa of the profile log-likelihood (sigma = 0)."""
    if obs.n < MIN_OBSERVATIONS:
        raise InvalidObservationError(
            f"need at least {MIN_OBSERVATIONS} observations to fit, got {obs.n}", field="values"
        )
    low, high = _check_bounds(kappa_bounds)
    trace: list[ProfilePoint] = []

    def objective(log_kappa: float) -> float:
        try:
            point = profile_point(graph, obs, alpha, math.exp(log_kappa), method, boundary)
        except NumericalError as e:
            logger.debug(f"Profile failed at kappa={math.exp(log_kappa):.4g}: {e.message}")
            return math.inf
        trace.append(point)
        return -point.loglik

    result = minimize_scalar(
        objective, bounds=(math.log(low), math.log(high)), method="bounded", options={"xatol": 1e-6}
    )
    if not trace:
        raise NumericalError("profile likelihood could not be evaluated", error_code="MLE_FAILED")
    best = min(trace, key=lambda p: -p.loglik)
    converged = bool(result.success)
    if not converged:
        logger.warning(f"Profile MLE did not converge: {result.message}")

    return FitResult(
        params=ModelParams(alpha=alpha, kappa=best.kappa, tau=math.sqrt(best.tau2), sigma=0.0, boundary=boundary),
        loglik=best.loglik,
        method="profile-bounded",
        iterations=int(getattr(result, "nit", 0)),
        evaluations=int(result.nfev),
        converged=converged,
        message=str(getattr(result, "message", "")),
        profile=sorted(trace, key=lambda p: p.kappa),
    )
