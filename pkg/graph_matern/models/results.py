"""Pydantic models for predictions, fits, scores and experiment tables."""

import math

from pydantic import BaseModel, ConfigDict, Field

from graph_matern.models.params import ModelParams

# ============================================================================
# Prediction
# ============================================================================


class GaussianPredictive(BaseModel):
    """Gaussian predictive distribution at one graph location."""

    edge: str
    t: float
    mean: float
    var: float = Field(..., ge=0)
    includes_noise: bool = False

    model_config = ConfigDict(frozen=True)

    @property
    def sd(self) -> float:
        return math.sqrt(self.var)


class VariancePoint(BaseModel):
    """Marginal variance of the latent field at a grid location."""

    edge: str
    t: float
    var: float


# ============================================================================
# Estimation
# ============================================================================


class ProfilePoint(BaseModel):
    """Profile likelihood at a fixed kappa."""

    kappa: float
    tau2: float
    loglik: float


class FitResult(BaseModel):
    """Outcome of a maximum-likelihood fit."""

    params: ModelParams
    loglik: float
    method: str
    iterations: int = 0
    evaluations: int = 0
    converged: bool
    message: str = ""
    profile: list[ProfilePoint] | None = None

    def to_row(self) -> "FitRow":
        return FitRow(
            alpha=self.params.alpha,
            kappa=self.params.kappa,
            tau=self.params.tau,
            sigma=self.params.sigma,
            loglik=self.loglik,
            converged=self.converged,
            iterations=self.iterations,
            evaluations=self.evaluations,
            method=self.method,
        )


class FitRow(BaseModel):
    """Flat CSV layout of a fit."""

    alpha: int
    kappa: float
    tau: float
    sigma: float
    loglik: float
    converged: bool
    iterations: int
    evaluations: int
    method: str


class ScoreSummary(BaseModel):
    """Mean scores over a set of predictions; lower is better for all."""

    rmse: float
    mae: float
    ls: float
    crps: float
    scrps: float


class CrossValidationRow(ScoreSummary):
    """One model's cross-validation scores plus its full-data fit."""

    model: str
    negloglik: float


class ConsistencyRow(BaseModel):
    """Monte-Carlo summary of the tau^2 estimator at one sample size."""

    n: int
    replicates: int
    mean_tau2: float
    bias: float
    sd: float
    sd_sqrt_n: float
    reference: float


class MisspecificationRow(BaseModel):
    """Exact kriging MSE ratio (misspecified / true) at one sample size."""

    n: int
    max_ratio: float
    mean_ratio: float


class SubdivisionRow(BaseModel):
    """Max covariance discrepancy of the graph-Laplacian model at mesh width h."""

    h: float
    max_abs_error: float


class KappaLimitRow(BaseModel):
    """Max elementwise |2 kappa Q - L_w| at one kappa."""

    kappa: float
    max_abs_error: float


class BenchmarkRow(BaseModel):
    """Timings of one likelihood method at one observation count."""

    method: str
    n: int
    repeats: int
    mean_seconds: float
    median_seconds: float
