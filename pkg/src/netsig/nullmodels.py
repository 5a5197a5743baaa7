"""Maximum-entropy null models in the canonical ensemble.

Every model here has independent Bernoulli edges with

    P_ij = sigmoid(X_ij),    X = offset + L(theta),

where ``L`` is linear in the Lagrange multipliers ``theta``. The multipliers
maximise

    objective(theta) = theta . c_obs - sum_{i<j} log(1 + exp(X_ij))

whose gradient ``c_obs - L^T(P)`` is exactly the constraint residual. Here
``L^T`` (the adjoint of ``L`` over unordered pairs) maps a symmetric pair
matrix onto constraint space, and ``c_obs = L^T(A)``.

Four ensembles are provided: Erdos-Renyi (edge count), canonical
configuration (degrees), RDPG (edge count plus projections onto leading
adjacency eigenvectors) and gravity (degrees plus edge count per distance
bin).
"""
from __future__ import annotations

import json
import logging
import warnings
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.optimize as sopt
import scipy.sparse.linalg as spla
from scipy.special import expit

from .graph import Graph, distance_matrix
from .spectral import EigenBasis, top_eigenpairs

__all__ = [
    "FitOptions",
    "FitError",
    "BinSpec",
    "NullSpec",
    "NullModel",
    "fit",
    "fit_er",
    "fit_configuration",
    "fit_rdpg",
    "fit_gravity",
    "edge_probability",
    "sample",
    "log_likelihood",
]

log = logging.getLogger(__name__)

CLAMP = 30.0
# explicit Hessian + Cholesky up to this many parameters, CG beyond
DENSE_HESSIAN_LIMIT = 4000
KINDS = ("er", "configuration", "rdpg", "gravity")


class FitError(RuntimeError):
    """Multiplier fit did not satisfy the constraints."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class FitOptions:
    grad_tol: float = 1e-8
    constraint_tol: float = 1e-6
    max_iters: int = 500
    memory: int = 10

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not v > 0:
                raise ValueError(f"FitOptions.{k} must be positive, got {v}")


@dataclass(frozen=True)
class BinSpec:
    """Distance bins for the gravity null.

    ``mode`` is ``"quantile"`` (equal pair counts), ``"log"`` (log-spaced
    between the smallest positive and largest distance) or ``"explicit"``
    (``edges`` given; the last edge may be ``inf``).
    """

    mode: str = "quantile"
    count: int = 10
    edges: Optional[tuple] = None

    def __post_init__(self):
        if self.mode not in ("quantile", "log", "explicit"):
            raise ValueError(f"unknown bin mode {self.mode!r}")
        if self.mode == "explicit":
            if self.edges is None or len(self.edges) < 2:
                raise ValueError("explicit bins need at least two edges")
            e = np.asarray(self.edges, dtype=float)
            if np.any(np.diff(e) <= 0):
                raise ValueError("bin edges must be strictly increasing")
        elif self.count < 1:
            raise ValueError("bin count must be >= 1")

    def resolve(self, distances) -> np.ndarray:
        """Strictly increasing bin edges covering every given distance."""
        d = np.asarray(distances, dtype=float)
        dmax = float(d.max()) if d.size else 0.0
        if self.mode == "explicit":
            e = np.asarray(self.edges, dtype=float)
            if d.size and (d.min() < e[0] or dmax > e[-1]):
                raise ValueError("explicit bins do not cover all distances")
            return e
        if dmax <= 0.0:
            return np.array([0.0, np.inf])
        if self.mode == "quantile":
            e = np.quantile(d, np.linspace(0.0, 1.0, self.count + 1))
        else:
            pos = d[d > 0]
            e = np.concatenate([[0.0], np.geomspace(pos.min(), dmax, self.count)])
        e[0], e[-1] = 0.0, dmax
        return np.unique(e)

    @staticmethod
    def assign(distances, edges) -> np.ndarray:
        """Bin index of each distance; bins are ``[e_b, e_{b+1})``, last closed."""
        e = np.asarray(edges, dtype=float)
        b = np.searchsorted(e, distances, side="right") - 1
        return np.clip(b, 0, len(e) - 2)


# ---------------------------------------------------------------------------
# linear parameterisations of the logits


class _Design:
    kind = ""

    def __init__(self, n, active=None):
        self.n = n
        self.active = np.ones(n, bool) if active is None else np.asarray(active, bool)
        m = np.outer(self.active, self.active).astype(float)
        np.fill_diagonal(m, 0.0)
        self.mask = m
        self.offset = 0.0

    def linear(self, theta):
        raise NotImplementedError

    def adjoint(self, r):
        raise NotImplementedError

    def logits(self, theta):
        return self.offset + self.linear(theta)

    def probabilities(self, theta):
        return expit(self.logits(theta)) * self.mask

    def objective(self, theta, a):
        """Maximum-entropy objective, including the constant from fixed offsets."""
        x = self.logits(theta)
        soft = np.logaddexp(0.0, x) * self.mask
        const = 0.5 * float(np.sum(a * self.mask * self.offset)) if np.ndim(self.offset) else 0.0
        return float(theta @ self.adjoint(a * self.mask)) + const - 0.5 * float(soft.sum())

    def gradient(self, theta, a):
        return self.adjoint((a - self.probabilities(theta)) * self.mask)

    def hessp(self, theta, v):
        """Hessian-vector product of the negated objective (positive semidefinite)."""
        p = self.probabilities(theta)
        return self.adjoint(p * (1.0 - p) * self.linear(v) * self.mask)

    def weights(self, theta):
        p = self.probabilities(theta)
        return p * (1.0 - p) * self.mask

    def hessian(self, theta):
        """Dense Hessian of the negated objective."""
        n = self.n_params
        return np.column_stack([self.hessp(theta, e) for e in np.eye(n)])


class _ERDesign(_Design):
    kind = "er"
    n_params = 1

    def linear(self, theta):
        return np.full((self.n, self.n), theta[0])

    def adjoint(self, r):
        return np.array([0.5 * r.sum()])


class _ConfigDesign(_Design):
    """Degree constraints; parameters cover only the active (degree > 0) nodes."""

    kind = "configuration"

    def __init__(self, n, active=None):
        super().__init__(n, active)
        self._idx = np.flatnonzero(self.active)

    @property
    def n_params(self):
        return len(self._idx)

    def linear(self, theta):
        lam = np.zeros(self.n)
        lam[self._idx] = theta
        return lam[:, None] + lam[None, :]

    def adjoint(self, r):
        return r.sum(axis=1)[self._idx]

    def hessian(self, theta):
        w = self.weights(theta)
        h = w + np.diag(w.sum(axis=1))
        return h[np.ix_(self._idx, self._idx)]


class _RDPGDesign(_Design):
    kind = "rdpg"

    def __init__(self, n, vectors):
        super().__init__(n)
        self.vectors = np.asarray(vectors, dtype=float)
        self.d = self.vectors.shape[1]

    @property
    def n_params(self):
        return 1 + self.n * self.d

    def split(self, theta):
        return theta[0], theta[1:].reshape(self.n, self.d)

    def linear(self, theta):
        lam, rank = self.split(theta)
        m = rank @ self.vectors.T
        return lam + m + m.T

    def adjoint(self, r):
        return np.concatenate([[0.5 * r.sum()], (r @ self.vectors).ravel()])

    def hessian(self, theta):
        w = self.weights(theta)
        v = self.vectors
        n, d = self.n, self.d
        h = np.empty((1 + n * d, 1 + n * d))
        h[0, 0] = 0.5 * w.sum()
        wv = (w @ v).ravel()
        h[0, 1:] = wv
        h[1:, 0] = wv
        # pair (i, k), i != k: d2/dLam[i,m] dLam[k,l] = w_ik v_km v_il
        cross = np.einsum("ik,km,il->imkl", w, v, v).reshape(n * d, n * d)
        # same node: sum_j w_ij v_jm v_jl
        same = np.einsum("ij,jm,jl->iml", w, v, v)
        for i in range(n):
            cross[i * d:(i + 1) * d, i * d:(i + 1) * d] = same[i]
        h[1:, 1:] = cross
        return h


class _GravityDesign(_Design):
    kind = "gravity"

    def __init__(self, n, bin_index, n_bins, fixed=None):
        super().__init__(n)
        self.bin_index = bin_index
        self.n_bins = n_bins
        # bins with a pinned multiplier: {bin: value}
        self.fixed = dict(fixed or {})
        self.free_bins = np.array([b for b in range(n_bins) if b not in self.fixed], dtype=np.int64)
        iu = np.triu_indices(n, 1)
        self._iu = iu
        self._pair_bins = bin_index[iu]
        full = np.zeros(n_bins)
        for b, v in self.fixed.items():
            full[b] = v
        self.offset = full[bin_index] if self.fixed else 0.0
        # bin id -> position in theta (free bins only)
        self._slot = np.full(n_bins, -1, dtype=np.int64)
        self._slot[self.free_bins] = np.arange(len(self.free_bins))

    @property
    def n_params(self):
        return self.n + len(self.free_bins)

    def bin_values(self, theta):
        full = np.zeros(self.n_bins)
        full[self.free_bins] = theta[self.n:]
        for b, v in self.fixed.items():
            full[b] = v
        return full

    def linear(self, theta):
        lam = theta[: self.n]
        free = np.zeros(self.n_bins)
        free[self.free_bins] = theta[self.n:]
        return lam[:, None] + lam[None, :] + free[self.bin_index]

    def adjoint(self, r):
        per_bin = np.bincount(self._pair_bins, weights=r[self._iu], minlength=self.n_bins)
        return np.concatenate([r.sum(axis=1), per_bin[self.free_bins]])

    def hessian(self, theta):
        w = self.weights(theta)
        n, fb = self.n, self.free_bins
        h = np.zeros((self.n_params, self.n_params))
        h[:n, :n] = w + np.diag(w.sum(axis=1))
        node_bin = np.zeros((n, self.n_bins))
        for b in fb:
            node_bin[:, b] = np.where(self.bin_index == b, w, 0.0).sum(axis=1)
        h[:n, n:] = node_bin[:, fb]
        h[n:, :n] = node_bin[:, fb].T
        per_bin = np.bincount(self._pair_bins, weights=w[self._iu], minlength=self.n_bins)
        h[n:, n:] = np.diag(per_bin[fb])
        return h


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullSpec:
    """Which null to fit: ``kind`` in er/configuration/rdpg/gravity."""

    kind: str
    rank: Optional[int] = None
    bins: BinSpec = field(default_factory=BinSpec)
    options: FitOptions = field(default_factory=FitOptions)

    def __post_init__(self):
        kind = {"config": "configuration"}.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ValueError(f"unknown null kind {self.kind!r}")
        if kind == "rdpg" and (self.rank is None or self.rank < 1):
            raise ValueError("RDPG null needs rank >= 1")

    def to_dict(self):
        out = {"kind": self.kind, "options": asdict(self.options)}
        if self.kind == "rdpg":
            out["rank"] = self.rank
        if self.kind == "gravity":
            out["bins"] = {"mode": self.bins.mode, "count": self.bins.count,
                           "edges": None if self.bins.edges is None else list(self.bins.edges)}
        return out

    @classmethod
    def from_dict(cls, d):
        b = d.get("bins") or {}
        bins = BinSpec(mode=b.get("mode", "quantile"), count=b.get("count", 10),
                       edges=None if b.get("edges") is None else tuple(b["edges"]))
        return cls(kind=d["kind"], rank=d.get("rank"), bins=bins,
                   options=FitOptions(**d.get("options", {})))


class NullModel:
    """A fitted null: multipliers plus what is needed to rebuild ``P``.

    ``P`` is never stored; :attr:`P` recomputes it from the multipliers on
    first access and caches it (read-only).
    """

    def __init__(self, design: _Design, theta, diagnostics=None, options=None,
                 bin_edges=None, coords=None, p_er=None):
        self._design = design
        self.theta = np.asarray(theta, dtype=float)
        self.theta.setflags(write=False)
        self.diagnostics = dict(diagnostics or {})
        self.options = options or FitOptions()
        self.bin_edges = None if bin_edges is None else np.asarray(bin_edges, dtype=float)
        self.coords = coords
        self._p_er = p_er

    kind = property(lambda self: self._design.kind)
    n = property(lambda self: self._design.n)

    @property
    def active(self):
        return self._design.active

    @property
    def multipliers(self) -> dict:
        d = self._design
        th = self.theta
        if self.kind == "er":
            return {"global": float(th[0])}
        if self.kind == "configuration":
            node = np.full(self.n, -np.inf)
            node[d.active] = th
            return {"node": node}
        if self.kind == "rdpg":
            lam, rank = d.split(th)
            return {"global": float(lam), "rank": rank}
        return {"node": th[: self.n], "bin": d.bin_values(th)}

    @property
    def basis(self):
        return getattr(self._design, "vectors", None)

    @cached_property
    def P(self) -> np.ndarray:
        if self._p_er is not None:
            p = np.full((self.n, self.n), self._p_er)
            np.fill_diagonal(p, 0.0)
        else:
            p = self._design.probabilities(self.theta)
        p.setflags(write=False)
        return p

    @property
    def degenerate(self) -> bool:
        """True when every pair is (numerically) deterministic."""
        off = self.P[self._design.mask > 0]
        return off.size == 0 or float(np.max(off * (1.0 - off))) <= 1e-12

    def edge_probability(self, i, j) -> float:
        if i == j:
            raise ValueError("edge probability is undefined for i == j")
        return float(self.P[i, j])

    def sample(self, rng) -> Graph:
        return sample(self, rng)

    def objective(self, a) -> float:
        return self._design.objective(self.theta, np.asarray(a, dtype=float))

    def gradient(self, a) -> np.ndarray:
        return self._design.gradient(self.theta, np.asarray(a, dtype=float))

    def residuals(self, g: Graph) -> dict:
        return _residuals(self._design, self.theta, g.adjacency)

    # -- persistence ------------------------------------------------------

    def to_dict(self) -> dict:
        mult = {}
        for k, v in self.multipliers.items():
            if np.ndim(v):
                v = np.where(np.isfinite(v), v, np.nan)
                mult[k] = [None if np.isnan(x) else float(x) for x in np.ravel(v)]
                if np.ndim(v) == 2:
                    mult[k] = np.asarray(mult[k], dtype=object).reshape(v.shape).tolist()
            else:
                mult[k] = float(v) if np.isfinite(v) else None
        doc = {
            "kind": self.kind,
            "n": self.n,
            "multipliers": mult,
            "diagnostics": _jsonable(self.diagnostics),
            "fit_options": asdict(self.options),
        }
        if self.kind == "er":
            doc["p"] = float(self._p_er)
        if self.kind == "rdpg":
            doc["basis"] = self.basis.tolist()
        if self.kind == "gravity":
            doc["bin_edges"] = [float(x) if np.isfinite(x) else None for x in self.bin_edges]
            doc["coords"] = np.asarray(self.coords).tolist()
            doc["fixed_bins"] = {str(b): v for b, v in self._design.fixed.items()}
        return doc

    def to_json(self, path=None, **kw) -> str:
        text = json.dumps(self.to_dict(), indent=kw.pop("indent", 2), allow_nan=False, **kw)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @classmethod
    def from_dict(cls, doc) -> "NullModel":
        kind, n = doc["kind"], int(doc["n"])
        mult = doc["multipliers"]
        opts = FitOptions(**doc.get("fit_options", {}))
        diag = doc.get("diagnostics", {})
        if kind == "er":
            p = float(doc["p"])
            return cls(_ERDesign(n), [_logit(p)], diag, opts, p_er=p)
        if kind == "configuration":
            node = np.array([-np.inf if x is None else x for x in mult["node"]])
            active = np.isfinite(node)
            return _config_model(n, active, node[active], diag, opts)
        if kind == "rdpg":
            v = np.asarray(doc["basis"], dtype=float)
            theta = np.concatenate([[mult["global"]], np.asarray(mult["rank"], float).ravel()])
            return cls(_RDPGDesign(n, v), theta, diag, opts)
        if kind == "gravity":
            coords = np.asarray(doc["coords"], dtype=float)
            edges = np.array([np.inf if x is None else x for x in doc["bin_edges"]])
            fixed = {int(b): float(v) for b, v in doc.get("fixed_bins", {}).items()}
            design = _gravity_design(coords, edges, fixed)
            bins = np.asarray(mult["bin"], dtype=float)
            theta = np.concatenate([np.asarray(mult["node"], float), bins[design.free_bins]])
            return cls(design, theta, diag, opts, bin_edges=edges, coords=coords)
        raise ValueError(f"unknown null kind {kind!r}")

    @classmethod
    def from_json(cls, text_or_path) -> "NullModel":
        s = str(text_or_path)
        if s.lstrip().startswith("{"):
            return cls.from_dict(json.loads(s))
        with open(s) as fh:
            return cls.from_dict(json.load(fh))

    def summary(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        if self.kind == "er":
            out["p"] = float(self._p_er)
        if self.kind == "rdpg":
            out["rank"] = int(self._design.d)
        if self.kind == "gravity":
            out["bin_edges"] = [float(x) if np.isfinite(x) else None for x in self.bin_edges]
        out["diagnostics"] = _jsonable(self.diagnostics)
        return out

    def __repr__(self):
        return f"NullModel(kind={self.kind!r}, n={self.n})"


def _config_model(n, active, theta, diag, opts):
    return NullModel(_ConfigDesign(n, active), theta, diag, opts)


def _gravity_design(coords, edges, fixed):
    n = len(coords)
    g = Graph(n, np.empty((0, 2), dtype=np.int64), coords=coords)
    d = distance_matrix(g)
    idx = BinSpec.assign(d, edges)
    return _GravityDesign(n, idx, len(edges) - 1, fixed)


def _logit(p):
    if p <= 0.0:
        return -np.inf
    if p >= 1.0:
        return np.inf
    return float(np.log(p) - np.log1p(-p))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# fitting


def _residuals(design, theta, a) -> dict:
    """Constraint residuals, grouped and scaled per the model's tolerance rule."""
    g = design.gradient(theta, a)
    out = {}
    if design.kind == "er":
        out["edges"] = (np.abs(g), 1.0)
    elif design.kind == "configuration":
        out["degree"] = (np.abs(g), 1.0)
    elif design.kind == "rdpg":
        two_e = max(float(a.sum()), 1.0)
        # the edge-count component is sum_{i<j}; compare with the ordered-pair total
        out["edges"] = (np.abs(2.0 * g[:1]), two_e)
        scale = np.maximum(1.0, np.abs(design.vectors).max(axis=0))
        out["projection"] = (np.abs(g[1:].reshape(design.n, design.d)), scale[None, :])
    else:
        n = design.n
        out["degree"] = (np.abs(g[:n]), 1.0)
        iu = np.triu_indices(n, 1)
        obs = np.bincount(design.bin_index[iu], weights=a[iu], minlength=design.n_bins)
        scale = np.maximum(1.0, obs[design.free_bins])
        out["bin"] = (np.abs(g[n:]), scale)
    return out


def _max_scaled(res) -> float:
    vals = [float(np.max(r / s)) for r, s in res.values() if np.size(r)]
    return max(vals) if vals else 0.0


def _solve(design, a, theta0, opts: FitOptions, bounds=None):
    """Maximise the objective: L-BFGS-B, then Newton-CG polishing if needed.

    Each stage gets its own ``max_iters`` budget. Newton matters when the
    optimum sits at infinity (some P_ij -> 0 or 1): L-BFGS crawls there,
    while Newton steps shrink the gradient geometrically.
    """
    a = a * design.mask

    def negf(th):
        return -design.objective(th, a)

    def negg(th):
        return -design.gradient(th, a)

    res = sopt.minimize(
        negf, theta0, jac=negg, method="L-BFGS-B", bounds=bounds,
        options={"maxiter": opts.max_iters, "maxcor": opts.memory,
                 "gtol": opts.grad_tol, "ftol": 1e-300, "maxls": 50})
    theta = res.x
    iters = int(res.nit)
    lo = None if bounds is None else np.array([b[0] for b in bounds])
    hi = None if bounds is None else np.array([b[1] for b in bounds])

    def gnorm(th):
        gr = design.gradient(th, a)
        if lo is not None:
            # projected gradient: ignore components pushing into an active bound
            gr = np.where((th <= lo + 1e-12) & (gr < 0), 0.0, gr)
            gr = np.where((th >= hi - 1e-12) & (gr > 0), 0.0, gr)
        return float(np.max(np.abs(gr))) if gr.size else 0.0

    newton = 0
    history = []
    while gnorm(theta) > opts.grad_tol and newton < opts.max_iters:
        history.append(gnorm(theta))
        # optimum at infinity: progress is geometric but slow; stop once the
        # constraints are met and 20 steps no longer halve the gradient
        if (len(history) > 20 and history[-1] > 0.5 * history[-21]
                and _max_scaled(_residuals(design, theta, a)) <= opts.constraint_tol):
            break
        step = _newton_step(design, theta, design.gradient(theta, a))
        f0 = design.objective(theta, a)
        g0 = gnorm(theta)
        t = 1.0
        improved = False
        for _ in range(60):
            trial = theta + t * step
            if lo is not None:
                trial = np.clip(trial, lo, hi)
            f1 = design.objective(trial, a)
            if f1 > f0 or (f1 >= f0 - 1e-12 * max(1.0, abs(f0)) and gnorm(trial) < g0):
                theta, improved = trial, True
                break
            t *= 0.5
        newton += 1
        if not improved:
            break
    return theta, {"lbfgs_iterations": iters, "newton_iterations": newton,
                   "grad_norm": gnorm(theta), "lbfgs_message": str(res.message)}


def _newton_step(design, theta, grad):
    """Solve ``H step = grad`` (H may be singular along gauge directions)."""
    m = len(theta)
    if m <= DENSE_HESSIAN_LIMIT:
        h = design.hessian(theta)
        ridge = 1e-12 * max(float(np.max(np.diag(h))), 1e-300)
        try:
            c = sla.cho_factor(h + ridge * np.eye(m))
            return sla.cho_solve(c, grad)
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(h, grad, rcond=None)[0]
    op = spla.LinearOperator((m, m), dtype=float,
                             matvec=lambda v: design.hessp(theta, v) + 1e-12 * v)
    return spla.cg(op, grad, rtol=1e-12, maxiter=10 * m)[0]


def _finish(design, theta, a, opts, info, extra=None):
    res = _residuals(design, theta, a)
    worst = _max_scaled(res)
    diag = {
        "iterations": info["lbfgs_iterations"] + info["newton_iterations"],
        **info,
        "max_residual": worst,
        "residuals": {k: float(np.max(r)) if np.size(r) else 0.0 for k, (r, _) in res.items()},
        "clamped": int(np.sum(np.abs(theta) >= CLAMP - 1e-9)),
    }
    if extra:
        diag.update(extra)
    if worst > opts.constraint_tol:
        raise FitError(
            f"{design.kind} fit did not converge: worst constraint residual "
            f"{worst:.3g} > {opts.constraint_tol:g} after {diag['iterations']} iterations",
            diag)
    if info["grad_norm"] > opts.grad_tol:
        log.info("%s fit: gradient %.2e above grad_tol but constraints met",
                 design.kind, info["grad_norm"])
    return diag


def fit_er(g: Graph, options: FitOptions | None = None) -> NullModel:
    """Erdos-Renyi null: constant ``p = 2E / (N(N-1))``, exact."""
    opts = options or FitOptions()
    if g.n < 2:
        raise ValueError("need at least two nodes")
    p = 2.0 * g.n_edges / (g.n * (g.n - 1))
    diag = {"iterations": 0, "max_residual": 0.0, "degenerate": p in (0.0, 1.0)}
    if diag["degenerate"]:
        warnings.warn(f"degenerate ER null (p = {p:g}): every pair is deterministic",
                      RuntimeWarning, stacklevel=2)
    return NullModel(_ERDesign(g.n), [_logit(p)], diag, opts, p_er=p)


def fit_configuration(g: Graph, options: FitOptions | None = None) -> NullModel:
    """Canonical configuration model: ``P_ij = sigmoid(l_i + l_j)``.

    Degree-zero nodes are left out of the fit (their multiplier is -inf and
    their edge probabilities are exactly zero).
    """
    opts = options or FitOptions()
    if g.n < 2:
        raise ValueError("need at least two nodes")
    k = g.degrees.astype(float)
    active = k > 0
    if not active.all():
        warnings.warn(f"{int((~active).sum())} degree-zero node(s) excluded from the "
                      "configuration fit", RuntimeWarning, stacklevel=2)
    if active.sum() < 2:
        raise FitError("configuration null needs at least one edge")
    design = _ConfigDesign(g.n, active)
    theta0 = np.log(k[active] / np.sqrt(k.sum()))
    bounds = [(-CLAMP, CLAMP)] * len(theta0)
    theta, info = _solve(design, g.adjacency, np.clip(theta0, -CLAMP, CLAMP), opts, bounds)
    diag = _finish(design, theta, g.adjacency, opts, info,
                   {"excluded_nodes": np.flatnonzero(~active).tolist()})
    return _config_model(g.n, active, theta, diag, opts)


def fit_rdpg(g: Graph, basis: EigenBasis | np.ndarray | int,
             options: FitOptions | None = None) -> NullModel:
    """RDPG null constraining edge count and projections on ``basis`` columns.

    ``basis`` may be an :class:`EigenBasis`, an ``(N, d)`` array of
    constraint vectors, or an integer rank (leading eigenvectors of ``g``).
    """
    opts = options or FitOptions()
    if isinstance(basis, (int, np.integer)):
        basis = top_eigenpairs(g, int(basis))
    v = basis.vectors if isinstance(basis, EigenBasis) else np.asarray(basis, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != g.n:
        raise ValueError("basis rows must match node count")
    if g.n_edges == 0:
        raise FitError("RDPG null needs at least one edge")
    design = _RDPGDesign(g.n, v)
    dens = 2.0 * g.n_edges / (g.n * (g.n - 1))
    theta0 = np.zeros(design.n_params)
    theta0[0] = _logit(min(max(dens, 1e-12), 1 - 1e-12))
    theta, info = _solve(design, g.adjacency, theta0, opts)
    diag = _finish(design, theta, g.adjacency, opts, info, {"rank": int(v.shape[1])})
    return NullModel(design, theta, diag, opts)


def fit_gravity(g: Graph, bins: BinSpec | None = None,
                options: FitOptions | None = None) -> NullModel:
    """Gravity null: degrees plus edge count per distance bin.

    ``P_ij = sigmoid(l_i + l_j + l_bin(d_ij))``. Bins holding no observed
    edge (or only edges) get their multiplier pinned at -30 (+30).
    """
    opts = options or FitOptions()
    bins = bins or BinSpec()
    if g.coords is None:
        raise ValueError("gravity null needs node coordinates")
    if g.n < 2:
        raise ValueError("need at least two nodes")
    if not (g.degrees > 0).all():
        raise FitError("gravity null needs every node to have degree >= 1")
    d = distance_matrix(g)
    iu = np.triu_indices(g.n, 1)
    edges = bins.resolve(d[iu])
    idx = BinSpec.assign(d, edges)
    nb = len(edges) - 1
    a = g.adjacency
    pairs = np.bincount(idx[iu], minlength=nb)
    obs = np.bincount(idx[iu], weights=a[iu], minlength=nb)
    fixed = {}
    for b in range(nb):
        if pairs[b] == 0:
            fixed[b] = 0.0
        elif obs[b] == 0:
            fixed[b] = -CLAMP
            warnings.warn(f"distance bin {b} has no observed edges; multiplier pinned at "
                          f"-{CLAMP:g}", RuntimeWarning, stacklevel=2)
        elif obs[b] == pairs[b]:
            fixed[b] = CLAMP
            warnings.warn(f"distance bin {b} is fully linked; multiplier pinned at "
                          f"+{CLAMP:g}", RuntimeWarning, stacklevel=2)
    design = _GravityDesign(g.n, idx, nb, fixed)
    k = g.degrees.astype(float)
    theta0 = np.concatenate([np.log(k / np.sqrt(k.sum())), np.zeros(len(design.free_bins))])
    bounds = [(-CLAMP, CLAMP)] * len(theta0)
    theta, info = _solve(design, a, theta0, opts, bounds)
    diag = _finish(design, theta, a, opts, info,
                   {"bin_pairs": pairs.tolist(), "bin_edges_observed": obs.tolist(),
                    "pinned_bins": {str(b): v for b, v in fixed.items()}})
    return NullModel(design, theta, diag, opts, bin_edges=edges, coords=np.array(g.coords))


def fit(g: Graph, spec: NullSpec) -> NullModel:
    if spec.kind == "er":
        return fit_er(g, spec.options)
    if spec.kind == "configuration":
        return fit_configuration(g, spec.options)
    if spec.kind == "rdpg":
        return fit_rdpg(g, top_eigenpairs(g, spec.rank), spec.options)
    return fit_gravity(g, spec.bins, spec.options)


def edge_probability(m: NullModel, i: int, j: int) -> float:
    return m.edge_probability(i, j)


def sample(m: NullModel, rng) -> Graph:
    """Draw one graph: each unordered pair independently with probability ``P_ij``."""
    rng = np.random.default_rng(rng)
    iu, ju = np.triu_indices(m.n, 1)
    keep = rng.random(len(iu)) < m.P[iu, ju]
    return Graph(m.n, np.column_stack([iu[keep], ju[keep]]))


def log_likelihood(m: NullModel, g: Graph) -> float:
    """Bernoulli log-likelihood of ``g`` under ``m`` (sum over unordered pairs)."""
    x = m._design.logits(m.theta) if m._p_er is None else np.full((m.n, m.n), _logit(m._p_er))
    a = g.adjacency
    iu = np.triu_indices(m.n, 1)
    mask = m._design.mask[iu] > 0
    xv, av = x[iu][mask], a[iu][mask]
    # log sigma(x) = x - log(1+e^x), log(1 - sigma(x)) = -log(1+e^x)
    return float(np.sum(av * xv - np.logaddexp(0.0, xv)))
