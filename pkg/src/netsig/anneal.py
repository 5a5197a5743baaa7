"""Maximise the block statistic over labelings by simulated annealing."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels as kern
from ._seeds import derive_rng
from .blocks import BlockMatrix
from .graph import Graph
from .nullmodels import NullModel
from .zstat import EPS_VAR, check_labels

__all__ = ["AnnealConfig", "OptimumReport", "DegenerateNullError",
           "maximize_z", "greedy_polish", "resolve_threads"]


class DegenerateNullError(ValueError):
    """Every pair is deterministic under the null, so Z is undefined."""


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing schedule.

    Each restart draws a uniform random labeling, runs ``sweeps`` passes of
    ``N`` single-node proposals (temperature multiplied by ``alpha`` after
    each pass, stopping early after ``stall_sweeps`` passes without a new
    best), then finishes with a greedy pass. ``swaps`` mixes in proposals that
    exchange the labels of two nodes.
    """

    t0: float = 1.0
    alpha: float = 0.995
    sweeps: int = 2000
    restarts: int = 8
    seed: int = 0
    stall_sweeps: int = 200
    swaps: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if self.restarts < 1 or self.sweeps < 1 or self.stall_sweeps < 1:
            raise ValueError("restarts, sweeps and stall_sweeps must be >= 1")

    def replace(self, **kw) -> "AnnealConfig":
        return AnnealConfig(**{**asdict(self), **kw})

    to_dict = asdict


@dataclass
class OptimumReport:
    labels: np.ndarray
    z: float
    restart_scores: list = field(default_factory=list)
    sweeps_used: list = field(default_factory=list)

    @property
    def best_labeling(self):
        return self.labels

    @property
    def best_z(self):
        return self.z


def resolve_threads(threads=None) -> int:
    if threads is None:
        threads = os.environ.get("NETSIG_THREADS", 1)
    return max(1, int(threads))


def _arrays(g, m, b):
    if isinstance(m, NullModel) and g.n != m.n:
        raise ValueError(f"graph has {g.n} nodes but the null model has {m.n}")
    a = np.ascontiguousarray(g.adjacency if isinstance(g, Graph) else g, dtype=float)
    p = np.array(m.P if isinstance(m, NullModel) else m, dtype=float)
    np.fill_diagonal(p, 0.0)
    bm = np.ascontiguousarray(b.entries if isinstance(b, BlockMatrix) else b, dtype=float)
    return a, p, p * p, bm


def check_nondegenerate(p):
    n = p.shape[0]
    off = p[~np.eye(n, dtype=bool)]
    if off.size == 0 or float(np.max(off * (1.0 - off))) <= EPS_VAR:
        raise DegenerateNullError("statistic undefined under this null: every block "
                                  "variance is zero")


def _restart(a, p, p2, bm, cfg: AnnealConfig, r: int):
    rng = derive_rng(cfg.seed, "restart", r)
    labels = rng.integers(0, bm.shape[0], size=a.shape[0]).astype(np.int64)
    best, _, used = kern.anneal(a, p, p2, bm, labels, cfg.t0, cfg.alpha, cfg.sweeps,
                                cfg.stall_sweeps, 0.5 if cfg.swaps else 0.0, rng, EPS_VAR)
    kern.greedy(a, p, p2, bm, best, EPS_VAR)
    return best, float(kern.exact_z(a, p, p2, bm, best, EPS_VAR)), int(used)


def maximize_z(g, m, b, cfg: AnnealConfig | None = None, threads=None) -> OptimumReport:
    """Best labeling over ``cfg.restarts`` independent annealing runs.

    Restart ``r`` is seeded from ``(cfg.seed, r)`` alone, so the result does
    not depend on ``threads``.
    """
    cfg = cfg or AnnealConfig()
    a, p, p2, bm = _arrays(g, m, b)
    check_nondegenerate(p)
    threads = resolve_threads(threads)
    if threads > 1 and cfg.restarts > 1:
        with ThreadPoolExecutor(min(threads, cfg.restarts)) as ex:
            runs = list(ex.map(lambda r: _restart(a, p, p2, bm, cfg, r), range(cfg.restarts)))
    else:
        runs = [_restart(a, p, p2, bm, cfg, r) for r in range(cfg.restarts)]
    scores = [z for _, z, _ in runs]
    best = int(np.argmax(scores))
    return OptimumReport(labels=runs[best][0], z=scores[best], restart_scores=scores,
                         sweeps_used=[u for _, _, u in runs])


def greedy_polish(g, m, b, labels) -> np.ndarray:
    """Apply the best improving single-node move until none is left."""
    a, p, p2, bm = _arrays(g, m, b)
    c = check_labels(labels, bm.shape[0], a.shape[0]).copy()
    kern.greedy(a, p, p2, bm, c, EPS_VAR)
    return c
