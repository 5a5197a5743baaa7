"""Simple undirected graphs, edge-list I/O and node coordinates.

Graphs here are always binary, undirected and simple. Input with self-loops
or repeated edges is cleaned on load (and the drops are counted); anything
weighted or directed is rejected rather than coerced.
"""
from __future__ import annotations

import io
import logging
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Graph",
    "LoadStats",
    "EdgeListError",
    "load_edge_list",
    "read_edge_list",
    "write_edge_list",
    "write_coords",
    "load_coords",
    "degrees",
    "distance_matrix",
]

log = logging.getLogger(__name__)


class EdgeListError(ValueError):
    """Malformed edge-list or coordinate input."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class LoadStats:
    duplicates: int = 0
    self_loops: int = 0


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class Graph:
    """Immutable simple undirected graph on nodes ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : array_like, shape (E, 2)
        Unordered node pairs. Self-loops and duplicates raise; use
        :meth:`from_edges` with ``clean=True`` to drop them instead.
    names : sequence of str, optional
        External id of every node.
    coords : array_like, shape (n, 2), optional
        Planar position of every node.
    """

    __slots__ = ("n", "edges", "names", "coords", "__dict__")

    def __init__(self, n, edges, names=None, coords=None):
        n = int(n)
        if n < 0:
            raise ValueError("node count must be nonnegative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        order = np.lexsort((e[:, 1], e[:, 0]))
        e = e[order]
        if len(e) > 1 and np.any(np.all(e[1:] == e[:-1], axis=1)):
            raise ValueError("duplicate edges are not allowed")
        self.n = n
        self.edges = _readonly(e)
        if names is not None:
            names = tuple(str(x) for x in names)
            if len(names) != n:
                raise ValueError("need exactly one name per node")
            if len(set(names)) != n:
                raise ValueError("node names must be unique")
        self.names = names
        if coords is not None:
            c = np.asarray(coords, dtype=float)
            if c.shape != (n, 2):
                raise ValueError(f"coords must have shape ({n}, 2), got {c.shape}")
            coords = _readonly(c)
        self.coords = coords

    @classmethod
    def from_edges(cls, n, pairs, names=None, coords=None, clean=False):
        """Build a graph, optionally dropping self-loops and repeats.

        Returns ``(graph, LoadStats)`` when ``clean`` is true, else the graph.
        """
        e = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                       dtype=np.int64).reshape(-1, 2)
        if not clean:
            return cls(n, e, names=names, coords=coords)
        loops = e[:, 0] == e[:, 1]
        e = np.sort(e[~loops], axis=1)
        uniq = np.unique(e, axis=0) if len(e) else e
        stats = LoadStats(duplicates=len(e) - len(uniq), self_loops=int(loops.sum()))
        return cls(n, uniq, names=names, coords=coords), stats

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        k = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        k.setflags(write=False)
        return k

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency matrix (float64, zero diagonal)."""
        a = np.zeros((self.n, self.n))
        a[self.edges[:, 0], self.edges[:, 1]] = 1.0
        a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        a.setflags(write=False)
        return a

    @property
    def isolated(self) -> np.ndarray:
        """Indices of degree-zero nodes."""
        return np.flatnonzero(self.degrees == 0)

    def index_of(self, name) -> int:
        if self.names is None:
            return int(name)
        try:
            return self._name_index[str(name)]
        except KeyError:
            raise KeyError(f"no node named {name!r}") from None

    @cached_property
    def _name_index(self):
        return {s: i for i, s in enumerate(self.names)}

    def with_coords(self, coords) -> "Graph":
        return Graph(self.n, self.edges, names=self.names, coords=coords)

    def edge_set(self) -> set:
        return {(int(i), int(j)) for i, j in self.edges}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.edges, other.edges)
                and self.names == other.names)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes(), self.names))

    def __repr__(self):
        extra = ", coords" if self.coords is not None else ""
        return f"Graph(n={self.n}, E={self.n_edges}{extra})"


def _as_text_stream(source):
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, io.BufferedIOBase) or (
            hasattr(source, "read") and "b" in getattr(source, "mode", "")):
        return io.TextIOWrapper(source, encoding="utf-8")
    return source


def load_edge_list(source, *, return_stats=False):
    """Parse a whitespace-separated edge list.

    Blank lines and lines starting with ``#`` are ignored. Node ids may be
    any token; nodes are numbered densely in first-seen order and the
    original tokens kept as ``Graph.names``. Self-loops and duplicate edges
    are dropped (the counts are logged, and returned when
    ``return_stats=True``).

    >>> load_edge_list("0 1\\n1 2\\n").degrees.tolist()
    [1, 2, 1]
    """
    stream = _as_text_stream(source)
    index: dict[str, int] = {}
    pairs = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        if len(tok) != 2:
            raise EdgeListError(
                f"expected 2 node ids, got {len(tok)} (weighted or malformed input?)",
                lineno)
        ij = []
        for t in tok:
            if t not in index:
                index[t] = len(index)
            ij.append(index[t])
        pairs.append(ij)
    names = list(index)
    g, stats = Graph.from_edges(len(names), np.array(pairs, dtype=np.int64).reshape(-1, 2),
                                names=names, clean=True)
    if stats.duplicates or stats.self_loops:
        log.warning("dropped %d duplicate edge(s) and %d self-loop(s)",
                    stats.duplicates, stats.self_loops)
    if len(g.isolated):
        log.info("%d isolated node(s)", len(g.isolated))
    return (g, stats) if return_stats else g


def read_edge_list(path, coords=None, **kw):
    """Read an edge list from ``path``; optionally attach a coordinate file."""
    with open(path, "rb") as fh:
        out = load_edge_list(fh, **kw)
    if coords is None:
        return out
    g, rest = (out[0], out[1:]) if isinstance(out, tuple) else (out, ())
    with open(coords, "rb") as fh:
        g = load_coords(fh, g)
    return (g, *rest) if rest else g


def write_edge_list(g: Graph, dest=None) -> str:
    """Serialise ``g`` as an edge list using node names when present."""
    names = g.names or [str(i) for i in range(g.n)]
    lines = [f"{names[i]} {names[j]}" for i, j in g.edges]
    text = "\n".join(lines) + ("\n" if lines else "")
    if dest is not None:
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w") as fh:
                fh.write(text)
        else:
            dest.write(text)
    return text


def load_coords(source, g: Graph) -> Graph:
    """Attach ``id,x,y`` coordinates (header line optional) to ``g``."""
    stream = _as_text_stream(source)
    pos = {}
    first = True
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = [t.strip() for t in s.split(",")]
        if len(tok) != 3:
            raise EdgeListError("expected 'id,x,y'", lineno)
        header, first = first, False
        try:
            xy = (float(tok[1]), float(tok[2]))
        except ValueError:
            if header:
                continue
            raise EdgeListError("non-numeric coordinate", lineno) from None
        pos[tok[0]] = xy
    try:
        c = [pos[name] for name in (g.names or [str(i) for i in range(g.n)])]
    except KeyError as exc:
        raise EdgeListError(f"no coordinates for node {exc.args[0]!r}") from None
    return g.with_coords(c)


def write_coords(g: Graph, dest) -> str:
    names = g.names or [str(i) for i in range(g.n)]
    text = "id,x,y\n" + "".join(
        f"{nm},{float(x)!r},{float(y)!r}\n" for nm, (x, y) in zip(names, g.coords))
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w") as fh:
            fh.write(text)
    elif dest is not None:
        dest.write(text)
    return text


def degrees(g: Graph) -> np.ndarray:
    return g.degrees


def distance_matrix(g: Graph) -> np.ndarray:
    """Pairwise Euclidean distances between node coordinates."""
    if g.coords is None:
        raise ValueError("graph has no node coordinates")
    diff = g.coords[:, None, :] - g.coords[None, :, :]
    d = np.sqrt((diff ** 2).sum(-1))
    np.fill_diagonal(d, 0.0)
    d.setflags(write=False)
    return d
