from graph_matern.repositories.base import CsvRepository, format_value
from graph_matern.repositories.graph_repository import GraphRepository
from graph_matern.repositories.observation_repository import ObservationRepository
from graph_matern.repositories.table_repository import write_table

__all__ = ["CsvRepository", "GraphRepository", "ObservationRepository", "format_value", "write_table"]
