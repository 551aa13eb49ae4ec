from graph_matern.baseline.laplacian import (
    defect_closed_form,
    graph_laplacian_precision,
    kappa_zero_limit_check,
    laplacian,
    laplacian_defect,
    matched_constants,
    sherman_morrison_gap,
    subdivision_convergence,
)

__all__ = [
    "defect_closed_form",
    "graph_laplacian_precision",
    "kappa_zero_limit_check",
    "laplacian",
    "laplacian_defect",
    "matched_constants",
    "sherman_morrison_gap",
    "subdivision_convergence",
]
