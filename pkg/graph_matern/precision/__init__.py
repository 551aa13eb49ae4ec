from graph_matern.precision.assembly import (
    BlockPrecision,
    DofIndex,
    alpha1_vertex_precision,
    assemble_block_precision,
    edge_precision,
    stationary_vertices,
)
from graph_matern.precision.constraints import (
    ChangeOfBasis,
    ConstraintSystem,
    LocalConstraints,
    build_constraints,
    cached_constraints,
    change_of_basis,
    clear_constraint_cache,
)
from graph_matern.precision.factor import SparseCholesky, SparseSymMatrix

__all__ = [
    "BlockPrecision",
    "ChangeOfBasis",
    "ConstraintSystem",
    "DofIndex",
    "LocalConstraints",
    "SparseCholesky",
    "SparseSymMatrix",
    "alpha1_vertex_precision",
    "assemble_block_precision",
    "build_constraints",
    "cached_constraints",
    "change_of_basis",
    "clear_constraint_cache",
    "edge_precision",
    "stationary_vertices",
]
