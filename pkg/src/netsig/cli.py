"""Command-line interface: ``netsig {fit,detect,test,generate,sweep,eigen}``.

Every JSON output embeds the resolved configuration and seeds, and repeated
invocations with the same arguments write byte-identical files. Exit codes:
0 on success (including non-significant tests), 1 on operational failure,
2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .anneal import AnnealConfig, DegenerateNullError, maximize_z, resolve_threads
from .blocks import BlockMatrixError, named_pattern, parse_block_matrix
from .generators import generate
from .graph import EdgeListError, read_edge_list, write_coords, write_edge_list
from .nullmodels import BinSpec, FitError, NullModel, NullSpec, fit
from .pipeline import ExperimentSpec, ReplicaError, TestConfig, run_test, sweep
from .spectral import top_eigenpairs

log = logging.getLogger("netsig")

SWEEP_MIN_SUCCESS = 0.9


class UsageError(Exception):
    pass


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2, allow_nan=False) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# shared argument groups


def _add_graph(p):
    p.add_argument("--graph", required=True, help="edge list file ('u v' per line)")
    p.add_argument("--coords", help="CSV of id,x,y node coordinates")


def _add_null(p):
    p.add_argument("--null", choices=["er", "config", "configuration", "rdpg", "gravity"],
                   help="null model kind")
    p.add_argument("--model", help="previously fitted null model JSON (instead of --null)")
    p.add_argument("--rank", type=int, help="RDPG eigenvector count d")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--bins", type=int, help="number of gravity distance bins")
    grp.add_argument("--bin-edges", help="comma-separated gravity bin edges")
    p.add_argument("--bin-mode", choices=["quantile", "log"], default="quantile")


def _add_pattern(p):
    p.add_argument("--pattern", default="assortative",
                   help="assortative, bipartite, repulsive or double_core_periphery")
    p.add_argument("--pattern-file", help="block matrix JSON {size, entries, unassigned}")
    p.add_argument("--groups", type=int, help="group count for the assortative pattern")
    p.add_argument("--unassigned", action="store_true", help="append an unassigned group")


def _add_anneal(p):
    d = AnnealConfig()
    p.add_argument("--t0", type=float, default=d.t0, help="initial temperature")
    p.add_argument("--cooling", type=float, default=d.alpha, help="cooling factor per sweep")
    p.add_argument("--sweeps", type=int, default=d.sweeps)
    p.add_argument("--restarts", type=int, default=d.restarts)
    p.add_argument("--stall-sweeps", type=int, default=d.stall_sweeps)
    p.add_argument("--swaps", action="store_true", help="also propose label swaps")


def _common(p):
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--threads", type=int, help="worker threads (default $NETSIG_THREADS or 1)")
    p.add_argument("-v", "--verbose", action="store_true")


def _load_graph(args):
    try:
        return read_edge_list(args.graph, coords=getattr(args, "coords", None))
    except (OSError, EdgeListError) as exc:
        raise UsageError(f"cannot read graph: {exc}") from exc


def _null_spec(args, g) -> NullSpec:
    if args.null is None:
        raise UsageError("one of --null or --model is required")
    kind = args.null
    if kind == "rdpg" and args.rank is None:
        raise UsageError("--null rdpg needs --rank")
    if kind == "gravity":
        if g.coords is None:
            raise UsageError("--null gravity needs node coordinates (--coords)")
        if args.bin_edges:
            edges = tuple(float(x) for x in args.bin_edges.split(","))
            bins = BinSpec(mode="explicit", edges=edges)
        else:
            bins = BinSpec(mode=args.bin_mode, count=args.bins or 10)
    else:
        bins = BinSpec()
    try:
        return NullSpec(kind=kind, rank=args.rank, bins=bins)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _null(args, g):
    """Fitted model (from --model) or a spec to fit."""
    if args.model:
        m = NullModel.from_json(args.model)
        if m.n != g.n:
            raise UsageError(f"model has {m.n} nodes, graph has {g.n}")
        return m
    return _null_spec(args, g)


def _block_matrix(args):
    try:
        if args.pattern_file:
            b = parse_block_matrix(Path(args.pattern_file).read_text())
            return b.with_unassigned() if args.unassigned else b
        groups = args.groups
        if groups is None and args.pattern in ("assortative", "community"):
            groups = 2
        return named_pattern(args.pattern, groups, args.unassigned)
    except (OSError, BlockMatrixError, ValueError) as exc:
        raise UsageError(f"bad block matrix: {exc}") from exc


def _anneal(args) -> AnnealConfig:
    try:
        return AnnealConfig(t0=args.t0, alpha=args.cooling, sweeps=args.sweeps,
                            restarts=args.restarts, seed=args.seed,
                            stall_sweeps=args.stall_sweeps, swaps=args.swaps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_fit(args) -> int:
    g = _load_graph(args)
    spec = _null_spec(args, g)
    m = fit(g, spec)
    doc = m.to_dict()
    doc["config"] = {"graph": str(args.graph), "null": spec.to_dict(), "version": __version__}
    _dump(doc, args.out)
    d = m.diagnostics
    # diagnostics go to stderr so stdout stays a clean model document
    print(json.dumps({"kind": m.kind, "iterations": d.get("iterations"),
                      "max_residual": d.get("max_residual"),
                      "grad_norm": d.get("grad_norm")}), file=sys.stderr)
    return 0


def cmd_detect(args) -> int:
    g = _load_graph(args)
    spec = _null(args, g)
    m = spec if isinstance(spec, NullModel) else fit(g, spec)
    b = _block_matrix(args)
    cfg = _anneal(args)
    opt = maximize_z(g, m, b, cfg, threads=args.threads)
    names = g.names or [str(i) for i in range(g.n)]
    _dump({"z": opt.z, "labels": [int(x) for x in opt.labels],
           "nodes": list(names),
           "restart_scores": opt.restart_scores, "sweeps_used": opt.sweeps_used,
           "null": m.summary(), "block_matrix": b.to_dict(),
           "config": {"graph": str(args.graph), "anneal": cfg.to_dict(),
                      "null": spec.to_dict() if isinstance(spec, NullSpec) else str(args.model)},
           "version": __version__}, args.out)
    return 0


def cmd_test(args) -> int:
    g = _load_graph(args)
    spec = _null(args, g)
    b = _block_matrix(args)
    try:
        cfg = TestConfig(replicas=args.replicas, alpha=args.alpha, seed=args.seed,
                         anneal=_anneal(args), tail=args.tail)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = run_test(g, spec, b, cfg, threads=args.threads)
    doc = res.to_dict()
    doc["config"]["graph"] = str(args.graph)
    if isinstance(spec, NullSpec):
        doc["config"]["null"] = spec.to_dict()
    doc["nodes"] = list(g.names or [str(i) for i in range(g.n)])
    _dump(doc, args.out)
    log.info("Z = %.6g, p = %.6g (%s tail)", res.z_observed, res.p_value, res.tail)
    return 0


def _parse_value(v: str):
    if "," in v:
        return [_parse_value(x) for x in v.split(",") if x]
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def cmd_generate(args) -> int:
    params = {}
    for item in args.params:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = _parse_value(v.strip())
    if args.kind == "ppm" and "sizes" in params and not isinstance(params["sizes"], list):
        params["sizes"] = [params["sizes"]]
    from ._seeds import derive_rng
    try:
        g, labels = generate(args.kind, params, derive_rng(args.seed, "generate"))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad generator parameters: {exc}") from exc
    out = Path(args.out)
    header = f"# generated by netsig {__version__}: {args.kind} " + json.dumps(
        {"params": params, "seed": args.seed}, sort_keys=True) + "\n"
    out.write_text(header + write_edge_list(g))
    if args.labels_out:
        Path(args.labels_out).write_text("".join(f"{i},{int(c)}\n" for i, c in enumerate(labels)))
    if g.coords is not None:
        write_coords(g, args.coords_out or str(out) + ".coords.csv")
    return 0


def _experiment(ref: str) -> ExperimentSpec:
    p = Path(ref)
    if not p.is_file():
        from . import experiment_path
        try:
            p = experiment_path(ref)
        except FileNotFoundError as exc:
            raise UsageError(f"no experiment file or bundled spec {ref!r}") from exc
    try:
        return ExperimentSpec.from_dict(json.loads(Path(p).read_text()))
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"invalid experiment spec: {exc}") from exc


def cmd_sweep(args) -> int:
    exp = _experiment(args.experiment)
    res = sweep(exp, threads=args.threads, networks=args.networks, replicas=args.replicas)
    res.to_csv(args.out)
    if args.cells_out:
        _dump({"experiment": exp.to_dict(), "boundary": res.boundary, "cells": res.cells,
               "version": __version__}, args.cells_out)
    if res.boundary is not None:
        log.info("Kesten-Stigum boundary %s = %.6g", res.param, res.boundary)
    total = len(res.cells)
    ok = sum(not c["failed"] for c in res.cells)
    if total and ok / total < SWEEP_MIN_SUCCESS:
        print(json.dumps({"error": "too many failed cells", "succeeded": ok, "total": total}),
              file=sys.stderr)
        return 1
    return 0


def cmd_eigen(args) -> int:
    g = _load_graph(args)
    try:
        basis = top_eigenpairs(g, args.rank)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    names = g.names or [str(i) for i in range(g.n)]
    lines = ["# eigenvalues: " + ",".join(repr(float(x)) for x in basis.values),
             "node," + ",".join(f"v{m + 1}" for m in range(basis.d))]
    lines += [nm + "," + ",".join(repr(float(x)) for x in row)
              for nm, row in zip(names, basis.vectors)]
    text = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="netsig", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"netsig {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a null model")
    _add_graph(p)
    _add_null(p)
    _common(p)
    p.add_argument("--out", default="-", help="model JSON (default stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("detect", help="maximise Z over labelings")
    _add_graph(p)
    _add_null(p)
    _add_pattern(p)
    _add_anneal(p)
    _common(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("test", help="Monte-Carlo significance test")
    _add_graph(p)
    _add_null(p)
    _add_pattern(p)
    _add_anneal(p)
    _common(p)
    p.add_argument("--replicas", type=int, default=TestConfig.replicas)
    p.add_argument("--alpha", type=float, default=TestConfig.alpha, help="significance level")
    p.add_argument("--tail", choices=["right", "left"], default="right")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("generate", help="sample a benchmark network")
    p.add_argument("kind", choices=["ppm", "dcppm", "planted_clique", "spatial_ppm"])
    p.add_argument("params", nargs="*", help="key=value generator parameters")
    p.add_argument("--out", required=True, help="edge list path")
    p.add_argument("--labels-out", help="planted labels CSV (node,label)")
    p.add_argument("--coords-out", help="coordinates CSV (spatial generators)")
    _common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="run an experiment grid")
    p.add_argument("--experiment", required=True, help="spec JSON path or bundled name")
    p.add_argument("--out", default="-", help="CSV path")
    p.add_argument("--cells-out", help="per-cell results JSON")
    p.add_argument("--networks", type=int, help="override networks per grid point")
    p.add_argument("--replicas", type=int, help="override null replicas per test")
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eigen", help="top eigenvectors of the adjacency matrix")
    _add_graph(p)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--out", default="-")
    _common(p)
    p.set_defaults(func=cmd_eigen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", None) is not None:
        args.threads = resolve_threads(args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.error(str(exc))  # exits 2
    except FitError as exc:
        print(json.dumps({"error": "fit_failed", "message": str(exc),
                          "diagnostics": _safe(exc.diagnostics)}), file=sys.stdout)
        return 1
    except (DegenerateNullError, ReplicaError, OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stdout)
        return 1


def _safe(obj):
    try:
        return json.loads(json.dumps(obj, default=lambda x: np.asarray(x).tolist(),
                                     allow_nan=False))
    except (TypeError, ValueError):
        return None


if __name__ == "__main__":
    sys.exit(main())
