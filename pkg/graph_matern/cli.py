from pathlib import Path

import typer
from rich.console import Console
from rich.table import Table

from graph_matern.baseline.laplacian import kappa_zero_limit_check, subdivision_convergence
from graph_matern.core.exception_filter import CliExceptionFilter
from graph_matern.core.exceptions import ConvergenceError, InvalidParameterError
from graph_matern.core.logging_config import setup_logging
from graph_matern.core.settings import settings
from graph_matern.estimation.cross_validation import cross_validate
from graph_matern.estimation.mle import fit_mle
from graph_matern.inference.kriging import krig, variance_map
from graph_matern.inference.likelihood import METHODS, loglik
from graph_matern.inference.simulation import simulate_field, simulate_observations
from graph_matern.models.params import BoundaryMode, CandidateModel, ModelParams
from graph_matern.repositories.graph_repository import GraphRepository
from graph_matern.repositories.observation_repository import ObservationRepository
from graph_matern.repositories.table_repository import write_table
from graph_matern.services.benchmark_service import BenchmarkService, lattice_graph
from graph_matern.version import get_version_info

app = typer.Typer(help="Exact Gaussian inference for Whittle-Matérn fields on metric graphs.")
console = Console()

GRAPH_OPTION = typer.Option(..., "--graph", "-g", exists=True, dir_okay=False, help="Graph JSON file")
OBS_OPTION = typer.Option(..., "--obs", exists=True, dir_okay=False, help="CSV with edge_id,t,value")


def _params(
    alpha: int,
    kappa: float,
    tau: float,
    sigma: float,
    boundary: BoundaryMode,
    stationary: list[str] | None,
) -> ModelParams:
    overrides = {vertex: BoundaryMode.STATIONARY for vertex in stationary or []}
    return ModelParams(
        alpha=alpha, kappa=kappa, tau=tau, sigma=sigma, boundary=boundary, boundary_overrides=overrides
    )


def _floats(text: str, name: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InvalidParameterError(f"{name} must be a comma-separated list of numbers", field=name) from e
    if not values:
        raise InvalidParameterError(f"{name} is empty", field=name)
    return values


def _summary(title: str, values: dict[str, object]) -> None:
    table = Table(title=title, show_header=False)
    table.add_column("name", style="cyan")
    table.add_column("value")
    for name, value in values.items():
        text = f"{value:.{settings.SUMMARY_DIGITS}g}" if isinstance(value, float) else str(value)
        table.add_row(name, text)
    console.print(table)


@app.callback()
def main(
    log_level: str | None = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR"),
    log_file: Path | None = typer.Option(
        None, "--log-file", dir_okay=False, help="Also write log records to this file"
    ),
):
    """Configure logging before any command runs."""
    setup_logging(log_level, log_file)


@app.command()
def simulate(
    graph: Path = GRAPH_OPTION,
    locations: Path = typer.Option(..., "--locations", exists=True, dir_okay=False, help="CSV with edge_id,t"),
    out: Path = typer.Option(..., "--out", "-o", help="Output CSV (edge_id,t,value)"),
    alpha: int = typer.Option(1, "--alpha"),
    kappa: float = typer.Option(..., "--kappa"),
    tau: float = typer.Option(1.0, "--tau"),
    sigma: float = typer.Option(0.0, "--sigma"),
    boundary: BoundaryMode = typer.Option(BoundaryMode.KIRCHHOFF, "--boundary"),
    stationary: list[str] | None = typer.Option(None, "--stationary-vertex"),
    seed: int | None = typer.Option(None, "--seed"),
):
    """Simulate (noisy) observations of the field at given locations."""
    with CliExceptionFilter().guard():
        params = _params(alpha, kappa, tau, sigma, boundary, stationary)
        metric_graph = GraphRepository().load(graph)
        repository = ObservationRepository()
        targets = repository.load_locations(locations)
        field_seed, noise_seed = (None, None) if seed is None else (seed, seed + 1)
        values = simulate_field(metric_graph, params, targets, seed=field_seed)
        obs = simulate_observations(targets, values, sigma, seed=noise_seed)
        count = repository.write_observations(out, obs)
        console.print(f"Wrote {count} simulated observations to {out}", style="green")


@app.command(name="loglik")
def loglik_command(
    graph: Path = GRAPH_OPTION,
    obs: Path = OBS_OPTION,
    alpha: int = typer.Option(1, "--alpha"),
    kappa: float = typer.Option(..., "--kappa"),
    tau: float = typer.Option(1.0, "--tau"),
    sigma: float = typer.Option(0.0, "--sigma"),
    boundary: BoundaryMode = typer.Option(BoundaryMode.KIRCHHOFF, "--boundary"),
    stationary: list[str] | None = typer.Option(None, "--stationary-vertex"),
    method: str = typer.Option("auto", "--method", help=f"auto, {', '.join(METHODS)}"),
):
    """Print the log-likelihood to 12 significant digits."""
    with CliExceptionFilter().guard():
        params = _params(alpha, kappa, tau, sigma, boundary, stationary)
        value = loglik(GraphRepository().load(graph), params, ObservationRepository().load_observations(obs), method)
        typer.echo(f"{value:.12g}")


@app.command()
def fit(
    graph: Path = GRAPH_OPTION,
    obs: Path = OBS_OPTION,
    alpha: int = typer.Option(1, "--alpha"),
    kappa_min: float = typer.Option(1e-2, "--kappa-min"),
    kappa_max: float = typer.Option(1e2, "--kappa-max"),
    sigma: float | None = typer.Option(None, "--sigma", help="Pin the noise level (0 = direct observations)"),
    boundary: BoundaryMode = typer.Option(BoundaryMode.KIRCHHOFF, "--boundary"),
    method: str = typer.Option("auto", "--method"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output CSV for the fit"),
):
    """Maximum-likelihood fit of kappa, tau (and sigma unless pinned)."""
    with CliExceptionFilter().guard():
        result = fit_mle(
            GraphRepository().load(graph),
            ObservationRepository().load_observations(obs),
            alpha,
            (kappa_min, kappa_max),
            sigma=sigma,
            method=method,
            boundary=boundary,
        )
        if out is not None:
            write_table(out, [result.to_row()])
        _summary("Maximum-likelihood fit", result.to_row().model_dump())
        if not result.converged:
            raise ConvergenceError(f"optimizer did not converge: {result.message}", context={"fit": str(out)})


@app.command()
def predict(
    graph: Path = GRAPH_OPTION,
    obs: Path = OBS_OPTION,
    targets: Path = typer.Option(..., "--targets", exists=True, dir_okay=False, help="CSV with edge_id,t"),
    out: Path = typer.Option(..., "--out", "-o", help="Output CSV (edge_id,t,mean,var)"),
    alpha: int = typer.Option(1, "--alpha"),
    kappa: float = typer.Option(..., "--kappa"),
    tau: float = typer.Option(1.0, "--tau"),
    sigma: float = typer.Option(0.0, "--sigma"),
    boundary: BoundaryMode = typer.Option(BoundaryMode.KIRCHHOFF, "--boundary"),
    stationary: list[str] | None = typer.Option(None, "--stationary-vertex"),
    predictive: str = typer.Option("latent", "--predictive", help="latent or obs"),
):
    """Kriging mean and variance at target locations."""
    with CliExceptionFilter().guard():
        if predictive not in ("latent", "obs"):
            raise InvalidParameterError("--predictive must be 'latent' or 'obs'", field="predictive")
        params = _params(alpha, kappa, tau, sigma, boundary, stationary)
        repository = ObservationRepository()
        results = krig(
            GraphRepository().load(graph),
            params,
            repository.load_observations(obs),
            repository.load_locations(targets),
            predictive=predictive == "obs",
        )
        count = repository.write_predictions(out, results)
        console.print(f"Wrote {count} predictions to {out}", style="green")


@app.command()
def varmap(
    graph: Path = GRAPH_OPTION,
    out: Path = typer.Option(..., "--out", "-o", help="Output CSV (edge_id,t,var)"),
    resolution: float = typer.Option(20.0, "--resolution", help="Grid points per unit length"),
    alpha: int = typer.Option(1, "--alpha"),
    kappa: float = typer.Option(..., "--kappa"),
    tau: float = typer.Option(1.0, "--tau"),
    boundary: BoundaryMode = typer.Option(BoundaryMode.KIRCHHOFF, "--boundary"),
    stationary: list[str] | None = typer.Option(None, "--stationary-vertex"),
):
    """Marginal variance of the field on a per-edge grid."""
    with CliExceptionFilter().guard():
        params = _params(alpha, kappa, tau, 0.0, boundary, stationary)
        points = variance_map(GraphRepository().load(graph), params, resolution)
        count = ObservationRepository().write_variance_map(out, points)
        console.print(f"Wrote {count} grid points to {out}", style="green")


@app.command()
def benchmark(
    out: Path = typer.Option(..., "--out", "-o", help="Output CSV of timings"),
    n_grid: str = typer.Option("250,500,1000,2000", "--n-grid"),
    repeats: int = typer.Option(5, "--repeats"),
    rows: int = typer.Option(4, "--rows", help="Lattice rows"),
    cols: int = typer.Option(4, "--cols", help="Lattice columns"),
    h: float | None = typer.Option(0.25, "--h", help="Subdivision mesh width of the lattice"),
    graph: Path | None = typer.Option(None, "--graph", exists=True, dir_okay=False, help="Use this graph instead"),
    kappa: float = typer.Option(2.0, "--kappa"),
    tau: float = typer.Option(1.0, "--tau"),
    sigma: float = typer.Option(0.1, "--sigma"),
    seed: int | None = typer.Option(None, "--seed"),
):
    """Time the dense, extended-graph and bridge likelihood evaluators."""
    with CliExceptionFilter().guard():
        metric_graph = GraphRepository().load(graph) if graph else lattice_graph(rows, cols, h=h)
        params = ModelParams(alpha=1, kappa=kappa, tau=tau, sigma=sigma)
        grid = [int(n) for n in _floats(n_grid, "n_grid")]
        results = BenchmarkService(metric_graph, params, seed).run(grid, repeats)
        write_table(out, results)
        console.print(f"Wrote {len(results)} timings to {out}", style="green")


@app.command()
def cv(
    graph: Path = GRAPH_OPTION,
    obs: Path = OBS_OPTION,
    out: Path = typer.Option(..., "--out", "-o", help="Output CSV of scores"),
    folds: int = typer.Option(5, "--folds"),
    models: str = typer.Option("1,2", "--models", help="Comma-separated alphas"),
    seed: int | None = typer.Option(None, "--seed"),
    kappa_min: float = typer.Option(1e-2, "--kappa-min"),
    kappa_max: float = typer.Option(1e2, "--kappa-max"),
):
    """Pseudo cross-validation scores of the candidate models."""
    with CliExceptionFilter().guard():
        candidates = [CandidateModel(name=f"alpha={int(a)}", alpha=int(a)) for a in _floats(models, "models")]
        rows = cross_validate(
            GraphRepository().load(graph),
            ObservationRepository().load_observations(obs),
            candidates,
            folds,
            seed,
            (kappa_min, kappa_max),
        )
        write_table(out, rows, columns=["model", "rmse", "mae", "ls", "crps", "scrps", "negloglik"])
        console.print(f"Wrote scores of {len(rows)} models to {out}", style="green")


@app.command(name="laplacian-compare")
def laplacian_compare(
    graph: Path = GRAPH_OPTION,
    out: Path = typer.Option(..., "--out", "-o", help="Output CSV of subdivision errors"),
    kappa: float = typer.Option(..., "--kappa"),
    tau: float = typer.Option(1.0, "--tau"),
    h_grid: str = typer.Option("1,0.5,0.25,0.125", "--h-grid"),
    limit_out: Path | None = typer.Option(None, "--limit-out", help="Also write the kappa -> 0 table"),
    kappa_grid: str = typer.Option("1e-2,1e-4,1e-6", "--kappa-grid"),
):
    """Compare the graph-Laplacian model with the exact alpha = 1 field."""
    with CliExceptionFilter().guard():
        metric_graph = GraphRepository().load(graph)
        params = ModelParams(alpha=1, kappa=kappa, tau=tau)
        write_table(out, subdivision_convergence(metric_graph, params, _floats(h_grid, "h_grid")))
        if limit_out is not None:
            write_table(limit_out, kappa_zero_limit_check(metric_graph, _floats(kappa_grid, "kappa_grid")))
        console.print(f"Wrote Laplacian comparison to {out}", style="green")


@app.command()
def version():
    """Show version information."""
    info = get_version_info()
    console.print(f"{settings.APP_NAME} {info['version']} ({info['release_name']}, {info['release_date']})")


if __name__ == "__main__":
    app()
