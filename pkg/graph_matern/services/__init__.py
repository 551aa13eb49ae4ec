from graph_matern.services.benchmark_service import BenchmarkService, lattice_graph

__all__ = ["BenchmarkService", "lattice_graph"]
