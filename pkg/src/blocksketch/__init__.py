"""Block-structured randomized sketching and low-rank approximation toolkit."""

from .hadamard import dense_hadamard, fwht_columns, fwht_inplace
from .kernels import QRFactors, TruncatedSVD, cholesky_psd, pinv_apply, tri_solve, truncated_svd, tsqr
from .lowrank import (LowRankPSD, LowRankSVD, error_norm, load_factorization,
                      nystrom, nystrom_closed_form, psd_trace_error, rsvd,
                      save_factorization, single_view)
from .ose import DistortionReport, ose_monte_carlo, random_subspace, subspace_distortion
from .partition import (DistMatrix, Grid, RowBlocks, cost_report, distribute,
                        sketch_grid_right, sketch_rowwise, tree_reduce)
from .sketch import (SketchOperator, apply_block_local, apply_dense,
                     assemble_dense, make_operator, min_rows_srht,
                     min_rows_theorem1, next_pow2)

__all__ = [
    "DistMatrix", "DistortionReport", "Grid", "LowRankPSD", "LowRankSVD",
    "QRFactors", "RowBlocks", "SketchOperator", "TruncatedSVD",
    "apply_block_local", "apply_dense", "assemble_dense", "cholesky_psd",
    "cost_report", "dense_hadamard", "distribute", "error_norm",
    "fwht_columns", "fwht_inplace", "load_factorization", "make_operator",
    "min_rows_srht", "min_rows_theorem1", "next_pow2", "nystrom",
    "nystrom_closed_form", "ose_monte_carlo", "pinv_apply", "psd_trace_error",
    "random_subspace", "rsvd", "save_factorization", "single_view",
    "sketch_grid_right", "sketch_rowwise", "subspace_distortion",
    "tree_reduce", "tri_solve", "truncated_svd", "tsqr",
]

__version__ = "0.1.0"
