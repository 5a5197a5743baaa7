"""Monte-Carlo hypothesis test for meso-scale structure, and parameter sweeps.

The test fits a null once on the observed graph, maximises Z on it, then
maximises Z on ``replicas`` graphs sampled from the null with the same
annealing schedule. The pseudo p-value is ``(1 + #{tail hits}) / (1 + R)``,
with ties counted as hits.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from ._seeds import derive_rng, derive_seed
from .anneal import AnnealConfig, check_nondegenerate, maximize_z, resolve_threads
from .blocks import BlockMatrix, named_pattern, parse_block_matrix
from .generators import generate
from .graph import Graph
from .nullmodels import NullModel, NullSpec, fit, sample

__all__ = [
    "TestConfig",
    "TestResult",
    "ReplicaError",
    "pseudo_p_value",
    "run_test",
    "run_left_tail_test",
    "kesten_stigum_boundary",
    "ExperimentSpec",
    "SweepResult",
    "sweep",
]

log = logging.getLogger(__name__)

MAX_REDRAWS = 3


class ReplicaError(RuntimeError):
    """A null replica kept coming out with no edges."""


@dataclass(frozen=True)
class TestConfig:
    replicas: int = 100
    alpha: float = 0.01
    seed: int = 0
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    tail: str = "right"

    # not a pytest test class
    __test__ = False

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("need at least one replica")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.tail not in ("right", "left"):
            raise ValueError("tail must be 'right' or 'left'")

    def to_dict(self):
        d = asdict(self)
        d["anneal"] = asdict(self.anneal)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        ann = AnnealConfig(**d.pop("anneal", {}))
        return cls(anneal=ann, **d)


@dataclass
class TestResult:
    z_observed: float
    labels: np.ndarray
    z_null: np.ndarray
    p_value: float
    reject: bool
    tail: str
    alpha: float
    provenance: dict = field(default_factory=dict)

    __test__ = False

    def to_dict(self) -> dict:
        prov = dict(self.provenance)
        return {
            "z_observed": float(self.z_observed),
            "labels": [int(x) for x in self.labels],
            "z_null": [float(x) for x in self.z_null],
            "p_value": float(self.p_value),
            "reject": bool(self.reject),
            "tail": self.tail,
            "alpha": float(self.alpha),
            "null": prov.pop("null", None),
            "block_matrix": prov.pop("block_matrix", None),
            "seeds": prov.pop("seeds", None),
            "config": prov.pop("config", None),
            "version": prov.pop("version", __version__),
            **prov,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, allow_nan=False)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def pseudo_p_value(z_obs: float, z_null, tail: str = "right") -> float:
    """Add-one Monte-Carlo p-value; ties count toward the tail.

    >>> pseudo_p_value(5.0, [1, 2, 3])
    0.25
    >>> pseudo_p_value(2.0, [1, 2, 3])
    0.75
    """
    z_null = np.asarray(z_null, dtype=float)
    if tail == "right":
        hits = int(np.sum(z_null >= z_obs))
    elif tail == "left":
        hits = int(np.sum(z_null <= z_obs))
    else:
        raise ValueError("tail must be 'right' or 'left'")
    return (1 + hits) / (len(z_null) + 1)


def _replica(model, b, cfg: TestConfig, r: int):
    for attempt in range(MAX_REDRAWS + 1):
        gr = sample(model, derive_rng(cfg.seed, "replica", r, "sample", attempt))
        if gr.n_edges > 0:
            break
        log.warning("replica %d drew an empty graph (attempt %d)", r, attempt + 1)
    else:
        raise ReplicaError(f"replica {r}: empty graph after {MAX_REDRAWS} redraws")
    ann = cfg.anneal.replace(seed=derive_seed(cfg.seed, "replica", r, "anneal"))
    return maximize_z(gr, model, b, ann, threads=1).z, attempt


def run_test(g: Graph, spec: NullSpec | NullModel, b: BlockMatrix, cfg: TestConfig | None = None,
             threads=None) -> TestResult:
    """Fit the null (unless a fitted model is given), optimise and compare.

    Replica ``r`` draws its graph and annealing seed from ``(cfg.seed, r)``
    only, so results are identical for any ``threads`` and a run with more
    replicas extends, rather than changes, a shorter one.
    """
    cfg = cfg or TestConfig()
    model = spec if isinstance(spec, NullModel) else fit(g, spec)
    check_nondegenerate(model.P)
    obs_seed = derive_seed(cfg.seed, "observed")
    opt = maximize_z(g, model, b, cfg.anneal.replace(seed=obs_seed), threads=threads)

    threads = resolve_threads(threads)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            out = list(ex.map(lambda r: _replica(model, b, cfg, r), range(cfg.replicas)))
    else:
        out = [_replica(model, b, cfg, r) for r in range(cfg.replicas)]
    z_null = np.array([z for z, _ in out])
    p = pseudo_p_value(opt.z, z_null, cfg.tail)
    prov = {
        "null": model.summary(),
        "block_matrix": b.to_dict(),
        "seeds": {"master": cfg.seed, "observed_anneal": obs_seed,
                  "redraws": int(sum(a for _, a in out))},
        "config": cfg.to_dict(),
        "restart_scores": opt.restart_scores,
    }
    return TestResult(z_observed=opt.z, labels=opt.labels, z_null=z_null, p_value=p,
                      reject=p <= cfg.alpha, tail=cfg.tail, alpha=cfg.alpha, provenance=prov)


def run_left_tail_test(g, spec, b, cfg: TestConfig | None = None, threads=None) -> TestResult:
    """As :func:`run_test`, asking whether the observed maximum is unusually small."""
    cfg = cfg or TestConfig()
    cfg = TestConfig(replicas=cfg.replicas, alpha=cfg.alpha, seed=cfg.seed,
                     anneal=cfg.anneal, tail="left")
    return run_test(g, spec, b, cfg, threads)


def kesten_stigum_boundary(c: int, n: int, p_in: float) -> Optional[float]:
    """Smaller root ``p_out`` of ``(p_in - p_out)^2 = (C p_in + C(C-1) p_out) / N``.

    >>> round(kesten_stigum_boundary(3, 60, 0.8), 12)
    0.5
    """
    if c < 2 or not 0.0 < p_in <= 1.0 or n <= 0:
        raise ValueError("need c >= 2, n > 0 and 0 < p_in <= 1")
    beta = 2.0 * p_in + c * (c - 1) / n
    gamma = p_in * p_in - c * p_in / n
    disc = beta * beta - 4.0 * gamma
    if disc < 0:
        return None
    roots = sorted(((beta - math.sqrt(disc)) / 2.0, (beta + math.sqrt(disc)) / 2.0))
    for x in roots:
        if 0.0 <= x <= p_in:
            return x
    return None


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class ExperimentSpec:
    """A grid experiment: one swept parameter, ``networks`` graphs per point.

    ``target`` says whether ``param`` belongs to the generator (new graphs
    per grid point) or to the null spec (e.g. the RDPG rank; the same graphs
    are reused at every grid point).
    """

    generator: str
    generator_params: dict
    null: dict
    pattern: dict
    param: str
    values: list
    target: str = "generator"
    networks: int = 20
    test: dict = field(default_factory=dict)
    name: str = ""

    @classmethod
    def from_dict(cls, d) -> "ExperimentSpec":
        gen = d["generator"]
        sw = d["sweep"]
        return cls(generator=gen["kind"], generator_params=dict(gen.get("params", {})),
                   null=dict(d["null"]), pattern=dict(d["pattern"]), param=sw["param"],
                   values=list(sw["values"]), target=sw.get("target", "generator"),
                   networks=int(d.get("networks", 20)), test=dict(d.get("test", {})),
                   name=d.get("name", ""))

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"name": self.name,
                "generator": {"kind": self.generator, "params": self.generator_params},
                "null": self.null, "pattern": self.pattern,
                "sweep": {"param": self.param, "values": self.values, "target": self.target},
                "networks": self.networks, "test": self.test}

    def block_matrix(self) -> BlockMatrix:
        pat = self.pattern
        if "entries" in pat:
            return parse_block_matrix(pat)
        return named_pattern(pat.get("name", "assortative"), pat.get("groups"),
                             bool(pat.get("unassigned", False)))

    def test_config(self) -> TestConfig:
        return TestConfig.from_dict(self.test)

    def point(self, value):
        """Generator params and null spec at one grid value."""
        gp, nd = dict(self.generator_params), dict(self.null)
        if self.target == "generator":
            gp[self.param] = value
        elif self.target == "null":
            nd[self.param] = value
        else:
            raise ValueError(f"unknown sweep target {self.target!r}")
        return gp, NullSpec.from_dict(nd)


@dataclass
class SweepResult:
    param: str
    rows: list
    cells: list
    boundary: Optional[float] = None

    COLUMNS = ("mean_p", "median_p", "reject_frac", "mean_z_obs", "n_networks", "n_failures")

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.param, *self.COLUMNS])
        for row in self.rows:
            w.writerow([row[self.param], *(_fmt(row[c]) for c in self.COLUMNS)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _fmt(x):
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return x


def _cell(exp: ExperimentSpec, b, cfg: TestConfig, value, ni: int):
    gp, nspec = exp.point(value)
    # seeds follow the grid value, not its position, so sub-grids reproduce cells
    tag = json.dumps(value)
    key = ("network", ni) if exp.target == "null" else ("network", tag, ni)
    g, planted = generate(exp.generator, gp, derive_rng(cfg.seed, *key))
    cell_cfg = TestConfig(replicas=cfg.replicas, alpha=cfg.alpha, tail=cfg.tail,
                          anneal=cfg.anneal, seed=derive_seed(cfg.seed, "test", tag, ni))
    out = {"value": value, "network": ni, "planted": planted.tolist()}
    try:
        res = run_test(g, nspec, b, cell_cfg, threads=1)
    except Exception as exc:  # per-cell failures are data, the sweep goes on
        log.warning("cell %s=%r network %d failed: %s", exp.param, value, ni, exc)
        out.update(failed=True, error=f"{type(exc).__name__}: {exc}")
        return out
    out.update(failed=False, p_value=res.p_value, reject=res.reject,
               z_observed=res.z_observed, labels=res.labels.tolist(),
               z_null=res.z_null.tolist())
    return out


def sweep(exp: ExperimentSpec | dict, threads=None, networks=None, replicas=None) -> SweepResult:
    """Run an experiment grid; ``networks``/``replicas`` override the spec."""
    if isinstance(exp, dict):
        exp = ExperimentSpec.from_dict(exp)
    if networks is not None:
        exp.networks = int(networks)
    cfg = exp.test_config()
    if replicas is not None:
        cfg = TestConfig(replicas=int(replicas), alpha=cfg.alpha, seed=cfg.seed,
                         anneal=cfg.anneal, tail=cfg.tail)
    b = exp.block_matrix()
    jobs = [(v, ni) for v in exp.values for ni in range(exp.networks)]
    threads = resolve_threads(threads)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            cells = list(ex.map(lambda j: _cell(exp, b, cfg, *j), jobs))
    else:
        cells = [_cell(exp, b, cfg, *j) for j in jobs]

    rows = []
    for v in exp.values:
        mine = [c for c in cells if c["value"] == v and not c["failed"]]
        ps = np.array([c["p_value"] for c in mine])
        zs = np.array([c["z_observed"] for c in mine])
        rows.append({
            exp.param: v,
            "mean_p": float(ps.mean()) if len(ps) else float("nan"),
            "median_p": float(np.median(ps)) if len(ps) else float("nan"),
            "reject_frac": float(np.mean(ps <= cfg.alpha)) if len(ps) else float("nan"),
            "mean_z_obs": float(zs.mean()) if len(zs) else float("nan"),
            "n_networks": len(mine),
            "n_failures": exp.networks - len(mine),
        })
    boundary = None
    gp = exp.generator_params
    if exp.generator == "ppm" and exp.param == "p_out" and "sizes" in gp:
        sizes = gp["sizes"]
        if len(set(sizes)) == 1 and len(sizes) >= 2:
            boundary = kesten_stigum_boundary(len(sizes), int(sum(sizes)), gp["p_in"])
    return SweepResult(param=exp.param, rows=rows, cells=cells, boundary=boundary)
