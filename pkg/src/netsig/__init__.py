"""Significance testing for meso-scale structure in undirected networks.

Fit a maximum-entropy null model, maximise a block z-score statistic over
node labelings, and calibrate the maximum against replicas drawn from the
null.
"""
from __future__ import annotations

from importlib import resources

__version__ = "0.1.0"

from .graph import Graph, load_edge_list, read_edge_list, load_coords  # noqa: E402
from .spectral import EigenBasis, top_eigenpairs  # noqa: E402
from .nullmodels import (  # noqa: E402
    BinSpec, FitError, FitOptions, NullModel, NullSpec, fit, sample,
)
from .blocks import BlockMatrix, assortative, named_pattern, parse_block_matrix  # noqa: E402
from .zstat import block_stats, z_blocks, z_score, z_total  # noqa: E402
from .anneal import AnnealConfig, OptimumReport, maximize_z  # noqa: E402
from .pipeline import (  # noqa: E402
    ExperimentSpec, TestConfig, TestResult, kesten_stigum_boundary, run_left_tail_test,
    run_test, sweep,
)


def karate() -> Graph:
    """The bundled 34-node karate-club network."""
    return read_edge_list(resources.files(__name__) / "data" / "karate.txt")


def experiment_path(name: str):
    """Path of a bundled experiment spec, e.g. ``experiment_path("fig1a")``."""
    p = resources.files(__name__) / "data" / "experiments" / f"{name}.json"
    if not p.is_file():
        raise FileNotFoundError(f"no bundled experiment named {name!r}")
    return p


__all__ = [
    "__version__", "Graph", "load_edge_list", "read_edge_list", "load_coords",
    "EigenBasis", "top_eigenpairs", "BinSpec", "FitError", "FitOptions", "NullModel",
    "NullSpec", "fit", "sample", "BlockMatrix", "assortative", "named_pattern",
    "parse_block_matrix", "block_stats", "z_blocks", "z_score", "z_total",
    "AnnealConfig", "OptimumReport", "maximize_z", "ExperimentSpec", "TestConfig",
    "TestResult", "kesten_stigum_boundary", "run_left_tail_test", "run_test", "sweep",
    "karate", "experiment_path",
]
