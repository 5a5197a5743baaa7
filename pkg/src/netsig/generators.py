"""Synthetic benchmark networks with a planted partition.

All generators take an explicit seed or ``numpy.random.Generator`` and
return ``(graph, labels)``, where ``labels`` is the planted group of each
node (for the planted clique: 0 = clique, 1 = background).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = [
    "PPMSpec",
    "DcPPMSpec",
    "PlantedCliqueSpec",
    "SpatialPPMSpec",
    "gen_ppm",
    "gen_dcppm",
    "gen_planted_clique",
    "gen_spatial_ppm",
    "block_normalise",
    "pareto_weights",
    "generate",
]


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class PPMSpec:
    sizes: tuple
    p_in: float
    p_out: float

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("sizes must be a nonempty list of positive counts")
        _check_prob("p_in", self.p_in)
        _check_prob("p_out", self.p_out)


@dataclass(frozen=True)
class DcPPMSpec:
    sizes: tuple
    omega_in: float
    omega_out: float
    gamma: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("sizes must be a nonempty list of positive counts")
        if self.omega_in < 0 or self.omega_out < 0:
            raise ValueError("omega rates must be nonnegative")
        if not self.gamma > 1:
            raise ValueError("Pareto exponent gamma must exceed 1")


@dataclass(frozen=True)
class PlantedCliqueSpec:
    n: int
    p: float
    n_clique: int

    def __post_init__(self):
        _check_prob("p", self.p)
        if not 0 <= self.n_clique <= self.n:
            raise ValueError("need 0 <= n_clique <= n")


@dataclass(frozen=True)
class SpatialPPMSpec:
    ppm: PPMSpec
    sigma: float
    mu_x: tuple = (0.0, 1.0)

    def __post_init__(self):
        if len(self.ppm.sizes) != 2 or len(self.mu_x) != 2:
            raise ValueError("spatial PPM has exactly two groups")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def _labels(sizes):
    return np.repeat(np.arange(len(sizes)), sizes)


def _bernoulli_graph(prob, rng, **kw) -> Graph:
    n = prob.shape[0]
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < prob[iu, ju]
    return Graph(n, np.column_stack([iu[keep], ju[keep]]), **kw)


def gen_ppm(spec: PPMSpec, rng):
    """Planted partition: ``p_in`` within groups, ``p_out`` between."""
    rng = np.random.default_rng(rng)
    c = _labels(spec.sizes)
    prob = np.where(c[:, None] == c[None, :], spec.p_in, spec.p_out)
    return _bernoulli_graph(prob, rng), c


def block_normalise(t, labels):
    """Divide each weight by the total weight of its own group."""
    t = np.asarray(t, dtype=float)
    totals = np.bincount(labels, weights=t)
    return t / totals[labels]


def pareto_weights(n: int, gamma: float, rng) -> np.ndarray:
    """``n`` draws with density proportional to ``t^-gamma`` on ``t >= 1``."""
    rng = np.random.default_rng(rng)
    # numpy's pareto is Lomax with tail index a; shifting by 1 gives density ~ t^-(a+1)
    return rng.pareto(gamma - 1.0, size=n) + 1.0


def gen_dcppm(spec: DcPPMSpec, rng):
    """Degree-corrected PPM with Pareto node weights and a Poisson edge rule.

    Weights ``t_i`` follow a Pareto law with density ``~ t^-gamma`` on
    ``t >= 1``; ``theta`` is ``t`` normalised within each group, and pair
    ``(i, j)`` is linked with probability ``1 - exp(-theta_i theta_j w)``
    where ``w`` is ``omega_in`` or ``omega_out``.
    """
    rng = np.random.default_rng(rng)
    c = _labels(spec.sizes)
    t = pareto_weights(len(c), spec.gamma, rng)
    theta = block_normalise(t, c)
    omega = np.where(c[:, None] == c[None, :], spec.omega_in, spec.omega_out)
    prob = -np.expm1(-np.outer(theta, theta) * omega)
    return _bernoulli_graph(prob, rng), c


def gen_planted_clique(spec: PlantedCliqueSpec, rng):
    """ER(n, p) with every pair among nodes ``0..n_clique-1`` forced present."""
    rng = np.random.default_rng(rng)
    prob = np.full((spec.n, spec.n), spec.p)
    prob[: spec.n_clique, : spec.n_clique] = 1.0
    c = np.ones(spec.n, dtype=np.int64)
    c[: spec.n_clique] = 0
    return _bernoulli_graph(prob, rng), c


def gen_spatial_ppm(spec: SpatialPPMSpec, rng):
    """Two-group PPM whose groups sit in Gaussian clouds offset along x."""
    rng = np.random.default_rng(rng)
    g, c = gen_ppm(spec.ppm, rng)
    mu = np.asarray(spec.mu_x, dtype=float)[c]
    xy = np.column_stack([rng.normal(mu, spec.sigma), rng.normal(0.0, spec.sigma, len(c))])
    return g.with_coords(xy), c


def generate(kind: str, params: dict, rng):
    """Dispatch on a generator name with a flat parameter dict.

    Used by experiment sweeps and the command line.
    """
    p = dict(params)
    if kind == "ppm":
        return gen_ppm(PPMSpec(p["sizes"], p["p_in"], p["p_out"]), rng)
    if kind == "dcppm":
        return gen_dcppm(DcPPMSpec(p["sizes"], p["omega_in"], p["omega_out"],
                                   p.get("gamma", 3.0)), rng)
    if kind == "planted_clique":
        return gen_planted_clique(PlantedCliqueSpec(int(p["n"]), p["p"], int(p["n_clique"])), rng)
    if kind == "spatial_ppm":
        ppm = PPMSpec(p.get("sizes", (30, 30)), p["p_in"], p["p_out"])
        return gen_spatial_ppm(SpatialPPMSpec(ppm, p["sigma"], tuple(p.get("mu_x", (0.0, 1.0)))), rng)
    raise ValueError(f"unknown generator {kind!r}")
