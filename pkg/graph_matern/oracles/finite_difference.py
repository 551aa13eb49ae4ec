"""Finite-difference covariance of the field on a mesh of the graph."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from graph_matern.core.exceptions import InvalidParameterError, ResourceLimitError
from graph_matern.core.settings import settings
from graph_matern.graph.metric_graph import START, Location, MetricGraph
from graph_matern.graph.surgery import subdivide
from graph_matern.models.params import ModelParams


@dataclass(frozen=True, eq=False)
class MeshCovariance:
    mesh: MetricGraph
    covariance: np.ndarray

    def locations(self) -> list[Location]:
        """Position of every mesh node on the edges of the original graph."""
        out = []
        for halves in self.mesh.incidence:
            edge = self.mesh.edges[halves[0].edge]
            t = 0.0 if halves[0].side == START else edge.length
            out.append(Location(edge.origin, edge.offset + t))
        return out


def fd_graph_cov(graph: MetricGraph, params: ModelParams, h: float) -> MeshCovariance:
    """tau^-2 K^-1 (M K^-1)^(alpha - 1) with lumped mass M = h d / 2 and K = kappa^2 M + (D - W) / h.

    Kirchhoff conditions are the natural conditions of the stiffness matrix.
    """
    mesh = subdivide(graph, h)
    if mesh.n_vertices > settings.FD_MAX_NODES:
        raise ResourceLimitError("finite-difference mesh", mesh.n_vertices, settings.FD_MAX_NODES)
    if mesh.has_loops:
        raise InvalidParameterError("mesh width must be smaller than every loop", field="h", value=h)

    n = mesh.n_vertices
    adjacency = np.zeros((n, n))
    for edge in mesh.edges:
        adjacency[edge.start, edge.end] += 1.0
        adjacency[edge.end, edge.start] += 1.0
    degree = adjacency.sum(axis=1)
    mass = np.diag(h * degree / 2.0)
    stiffness = (np.diag(degree) - adjacency) / h
    factor = cho_factor(params.kappa**2 * mass + stiffness, lower=True)

    covariance = cho_solve(factor, np.eye(n))
    for _ in range(params.alpha - 1):
        covariance = cho_solve(factor, mass @ covariance)
    covariance = 0.5 * (covariance + covariance.T) / params.tau**2
    return MeshCovariance(mesh, covariance)
