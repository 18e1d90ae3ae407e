"""Distributed block-diagonal approximation solvers for dual linear ERM."""
from __future__ import annotations

__version__ = "0.1.0"

from .cluster import Cluster, CommStats, ContractError, simulated_time
from .dataio import (
    ParseError,
    Partition,
    SparseColumnMatrix,
    load_libsvm,
    make_synthetic,
    parse_libsvm,
    partition_by_nnz,
    save_libsvm,
    serialize_libsvm,
    spectral_norm_sq,
)
from .engine import (
    ConfigError,
    LineSearchError,
    SolveResult,
    Solver,
    SolverConfig,
    UnsupportedLossError,
    baseline_config,
    solve,
    write_trace_csv,
)
from .model import LossSpec, conjugate, coordinate_solve, dual_interval, primal_loss
from .oracle import brute_force_dual, finite_diff_grad, reference_optimum

__all__ = [
    "Cluster", "CommStats", "ConfigError", "ContractError", "LineSearchError", "LossSpec",
    "ParseError", "Partition", "SolveResult", "Solver", "SolverConfig", "SparseColumnMatrix",
    "UnsupportedLossError", "baseline_config", "brute_force_dual", "conjugate", "coordinate_solve",
    "dual_interval", "finite_diff_grad", "load_libsvm", "make_synthetic", "parse_libsvm",
    "partition_by_nnz", "primal_loss", "reference_optimum", "save_libsvm", "serialize_libsvm",
    "simulated_time", "solve", "spectral_norm_sq", "write_trace_csv",
]
