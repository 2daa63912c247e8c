"""Bayesian function-on-scalar regression with selection, clustering and smoothing priors."""

from ._core import (
    ChainError,
    ChainOutput,
    GammaPrior,
    NumericalError,
    PriorConfig,
    SchemaError,
    SimulationSpec,
    Variant,
    adjusted_rand_index,
    bootstrap_se,
    bspline_design,
    coclustering_matrix,
    curve_summary,
    dendrogram,
    least_squares_draw,
    make_design,
    marginal_loglik,
    parse_variant,
    percent_zero,
    pointwise_mse,
    pspline_penalty,
    quantile,
    rand_index,
    run_chain,
    run_cli,
    select_nonzero,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
