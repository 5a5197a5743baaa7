"""Leading adjacency eigenpairs, used as constraint vectors by the RDPG null."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import Graph

__all__ = ["EigenBasis", "top_eigenpairs", "fix_signs"]

# dense eigh below this size; Lanczos (ARPACK) above
DENSE_LIMIT = 1500


@dataclass(frozen=True)
class EigenBasis:
    """Top-``d`` eigenpairs of a symmetric adjacency matrix.

    ``vectors[:, m]`` is the unit eigenvector for ``values[m]``; values are in
    descending algebraic order.
    """

    vectors: np.ndarray
    values: np.ndarray

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def scaled(self) -> np.ndarray:
        """Low-rank embedding rows ``sqrt(mu_m) e_m`` (needs mu_m >= 0)."""
        if np.any(self.values < 0):
            raise ValueError("negative eigenvalue: sqrt(mu) embedding undefined")
        return self.vectors * np.sqrt(self.values)

    @classmethod
    def from_vectors(cls, vectors) -> "EigenBasis":
        """Wrap arbitrary constraint vectors (e.g. the all-ones vector)."""
        v = np.asarray(vectors, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        return cls(vectors=v, values=np.full(v.shape[1], np.nan))


def fix_signs(vectors, tol=1e-10):
    """Flip columns so the first entry with ``|x| > tol`` is positive."""
    v = np.array(vectors, dtype=float, copy=True)
    for m in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, m]) > tol)
        if len(nz) and v[nz[0], m] < 0:
            v[:, m] *= -1
    return v


def top_eigenpairs(g: Graph, d: int) -> EigenBasis:
    """Top ``d`` eigenpairs of the adjacency matrix by algebraic value.

    Each eigenvector has unit norm and its first nonzero entry positive.
    """
    d = int(d)
    if d < 1 or d > g.n:
        raise ValueError(f"rank must satisfy 1 <= d <= N={g.n}, got {d}")
    if g.n <= DENSE_LIMIT or d >= g.n - 1:
        w, v = np.linalg.eigh(g.adjacency)
        w, v = w[::-1][:d], v[:, ::-1][:, :d]
    else:
        a = sp.coo_matrix((np.ones(2 * g.n_edges),
                           (g.edges.T.ravel(), g.edges[:, ::-1].T.ravel())),
                          shape=(g.n, g.n)).tocsr()
        w, v = spla.eigsh(a, k=d, which="LA", tol=1e-12)
        order = np.argsort(w)[::-1]
        w, v = w[order], v[:, order]
    v = fix_signs(v / np.linalg.norm(v, axis=0))
    return EigenBasis(vectors=v, values=np.asarray(w, dtype=float))
