"""Block z-scores and the combined statistic for a node labeling.

For groups ``a, b`` and ordered node pairs ``i in a, j in b, i != j``::

    S_ab = sum A_ij        T_ab = sum P_ij        U_ab = sum P_ij^2
    Z_ab = (S_ab - T_ab) / sqrt(T_ab - U_ab)
    Z    = (1/K) sum_ab B_ab Z_ab

Blocks whose variance ``T - U`` is below ``eps`` (empty or deterministic)
score zero.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .blocks import BlockMatrix
from .graph import Graph
from .nullmodels import NullModel

__all__ = [
    "BlockStats",
    "BlockState",
    "EPS_VAR",
    "check_labels",
    "block_stats",
    "z_blocks",
    "z_total",
    "z_score",
    "move_delta",
]

EPS_VAR = kern.EPS_VAR


def check_labels(labels, k: int, n: int | None = None) -> np.ndarray:
    c = np.asarray(labels)
    if c.ndim != 1 or (n is not None and len(c) != n):
        raise ValueError("labeling must assign exactly one group to every node")
    if not np.issubdtype(c.dtype, np.integer):
        if not np.all(np.equal(np.mod(c, 1), 0)):
            raise ValueError("group labels must be integers")
    c = c.astype(np.int64)
    if c.size and (c.min() < 0 or c.max() >= k):
        raise ValueError(f"group labels must lie in [0, {k})")
    return c


@dataclass(frozen=True)
class BlockStats:
    """Observed (``s``), expected (``t``) and squared-probability (``u``) block sums."""

    s: np.ndarray
    t: np.ndarray
    u: np.ndarray

    @property
    def var(self) -> np.ndarray:
        return self.t - self.u

    @property
    def q(self) -> np.ndarray:
        """Modularity-style excess ``S - T`` per block."""
        return self.s - self.t


def _as_arrays(g, m):
    a = g.adjacency if isinstance(g, Graph) else np.asarray(g, dtype=float)
    p = m.P if isinstance(m, NullModel) else np.asarray(m, dtype=float)
    if a.shape != p.shape:
        raise ValueError(f"graph has {a.shape[0]} nodes but the null model has {p.shape[0]}")
    return a, p


def block_stats(g, m, labels, k: int) -> BlockStats:
    """Batch block sums. ``g``/``m`` may also be raw ``A``/``P`` matrices."""
    a, p = _as_arrays(g, m)
    c = check_labels(labels, k, a.shape[0])
    onehot = np.zeros((len(c), k))
    onehot[np.arange(len(c)), c] = 1.0
    p = p - np.diag(np.diag(p))
    return BlockStats(s=onehot.T @ a @ onehot,
                      t=onehot.T @ p @ onehot,
                      u=onehot.T @ (p * p) @ onehot)


def z_blocks(stats: BlockStats, eps: float = EPS_VAR) -> np.ndarray:
    var = stats.var
    ok = var > eps
    z = np.zeros_like(stats.s)
    z[ok] = (stats.s[ok] - stats.t[ok]) / np.sqrt(var[ok])
    return z


def z_total(zb, b) -> float:
    """Stouffer-style combination ``(1/K) sum_ab B_ab Z_ab``."""
    bm = b.entries if isinstance(b, BlockMatrix) else np.asarray(b, dtype=float)
    zb = np.asarray(zb, dtype=float)
    if zb.shape != bm.shape:
        raise ValueError(f"z-block shape {zb.shape} does not match block matrix {bm.shape}")
    # fsum is correctly rounded, so relabeling groups cannot change the result
    return math.fsum((bm * zb).ravel()) / bm.shape[0]


def z_score(g, m, b, labels) -> float:
    """``Z(G, P, B, c)`` computed from scratch."""
    bm = b.entries if isinstance(b, BlockMatrix) else np.asarray(b, dtype=float)
    stats = block_stats(g, m, labels, bm.shape[0])
    if np.all(stats.var <= EPS_VAR):
        warnings.warn("every block has zero null variance; Z is identically 0",
                      RuntimeWarning, stacklevel=2)
    return z_total(z_blocks(stats), bm)


class BlockState:
    """Mutable labeling with incrementally maintained block sums.

    ``delta(i, g)`` scores moving node ``i`` to group ``g`` in O(K);
    ``move(i, g)`` applies it in O(N + K).
    """

    def __init__(self, g, m, b, labels, eps: float = EPS_VAR):
        a, p = _as_arrays(g, m)
        self.b = np.ascontiguousarray(
            b.entries if isinstance(b, BlockMatrix) else np.asarray(b, dtype=float))
        self.k = self.b.shape[0]
        self.a = np.ascontiguousarray(a, dtype=float)
        self.p = np.ascontiguousarray(p - np.diag(np.diag(p)), dtype=float)
        self.p2 = self.p * self.p
        self.eps = float(eps)
        self.labels = check_labels(labels, self.k, self.a.shape[0]).copy()
        (self._wa, self._wp, self._wp2,
         self._s, self._t, self._u) = kern.init_state(self.a, self.p, self.p2, self.labels, self.k)
        self._z = kern.z_matrix(self._s, self._t, self._u, self.eps)

    @property
    def stats(self) -> BlockStats:
        return BlockStats(self._s.copy(), self._t.copy(), self._u.copy())

    @property
    def z_blocks(self) -> np.ndarray:
        return self._z.copy()

    @property
    def z(self) -> float:
        return float(kern.z_value(self._z, self.b))

    def delta(self, i: int, group: int) -> float:
        if group == self.labels[i]:
            raise ValueError("target group equals the node's current group")
        if not 0 <= group < self.k:
            raise ValueError(f"group must lie in [0, {self.k})")
        return float(kern.move_delta(int(i), int(group), self.labels, self._wa, self._wp,
                                     self._wp2, self._s, self._t, self._u, self._z,
                                     self.b, self.eps))

    def move(self, i: int, group: int) -> BlockStats:
        if group == self.labels[i]:
            raise ValueError("target group equals the node's current group")
        kern.apply_move(int(i), int(group), self.labels, self.a, self.p, self.p2,
                        self._wa, self._wp, self._wp2, self._s, self._t, self._u,
                        self._z, self.eps)
        return self.stats


def move_delta(state: BlockState, node: int, to: int) -> BlockStats:
    """Move ``node`` to group ``to`` in place and return the updated sums."""
    return state.move(node, to)
