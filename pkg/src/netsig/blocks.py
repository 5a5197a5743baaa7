"""Block matrices describing the meso-scale pattern being tested for."""
from __future__ import annotations

import json

import numpy as np

__all__ = ["BlockMatrix", "BlockMatrixError", "assortative", "named_pattern",
           "parse_block_matrix", "PATTERNS"]


class BlockMatrixError(ValueError):
    pass


class BlockMatrix:
    """Symmetric ``K x K`` pattern with entries in {-1, 0, +1}.

    A positive entry rewards an excess of edges between the two groups, a
    negative one a deficit, and zero ignores the block. With
    ``unassigned=True`` the last group has an all-zero row and column, so
    nodes placed there do not contribute to the statistic.
    """

    __slots__ = ("entries", "unassigned")

    def __init__(self, entries, unassigned=False):
        b = np.array(entries, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] == 0:
            raise BlockMatrixError(f"block matrix must be square and nonempty, got shape {b.shape}")
        if not np.all(np.isin(b, (-1.0, 0.0, 1.0))):
            raise BlockMatrixError("block matrix entries must be -1, 0 or +1")
        if not np.array_equal(b, b.T):
            raise BlockMatrixError("block matrix must be symmetric")
        if not np.any(b):
            raise BlockMatrixError("block matrix has no nonzero entry")
        if unassigned and (np.any(b[-1]) or np.any(b[:, -1])):
            raise BlockMatrixError("unassigned group needs an all-zero last row and column")
        b.setflags(write=False)
        self.entries = b
        self.unassigned = bool(unassigned)

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    def with_unassigned(self) -> "BlockMatrix":
        """Append a zero row and column for unassigned nodes."""
        if self.unassigned:
            return self
        b = np.zeros((self.k + 1, self.k + 1))
        b[:-1, :-1] = self.entries
        return BlockMatrix(b, unassigned=True)

    def permuted(self, perm) -> "BlockMatrix":
        """Relabel groups: new group ``perm[a]`` plays old group ``a``."""
        perm = np.asarray(perm)
        b = np.empty_like(self.entries)
        b[np.ix_(perm, perm)] = self.entries
        return BlockMatrix(b, unassigned=False)

    def to_dict(self) -> dict:
        return {"size": self.k, "entries": self.entries.astype(int).tolist(),
                "unassigned": self.unassigned}

    def __eq__(self, other):
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return self.unassigned == other.unassigned and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        rows = "; ".join(" ".join(f"{int(x):+d}" for x in r) for r in self.entries)
        return f"BlockMatrix([{rows}]{', unassigned' if self.unassigned else ''})"


def assortative(k: int, unassigned: bool = False) -> BlockMatrix:
    """``k`` communities: +1 on the diagonal, -1 elsewhere.

    >>> assortative(2).entries.astype(int).tolist()
    [[1, -1], [-1, 1]]
    """
    if k < 1:
        raise BlockMatrixError("need at least one group")
    b = 2.0 * np.eye(k) - 1.0
    bm = BlockMatrix(b)
    return bm.with_unassigned() if unassigned else bm


PATTERNS = {
    "bipartite": [[-1, 1], [1, -1]],
    "repulsive": [[-1, 0], [0, 0]],
    "double_core_periphery": [[1, 1, -1, -1],
                              [1, -1, -1, -1],
                              [-1, -1, 1, 1],
                              [-1, -1, 1, -1]],
}


def named_pattern(name: str, k: int | None = None, unassigned: bool = False) -> BlockMatrix:
    """Look up a pattern by name.

    ``assortative``/``community`` take ``k`` (default 2); ``repulsive`` has
    a zero last row and column already and is flagged unassigned.
    """
    key = name.replace("-", "_").lower()
    if key in ("assortative", "community", "communities"):
        return assortative(2 if k is None else k, unassigned)
    if key in ("double_cp", "core_periphery_2"):
        key = "double_core_periphery"
    if key not in PATTERNS:
        raise BlockMatrixError(f"unknown pattern {name!r}; choose from "
                               f"assortative, {', '.join(PATTERNS)}")
    bm = BlockMatrix(PATTERNS[key], unassigned=(key == "repulsive"))
    return bm.with_unassigned() if unassigned else bm


def parse_block_matrix(doc) -> BlockMatrix:
    """Validate ``{"size": K, "entries": [[...]], "unassigned": bool}``.

    ``doc`` may be a dict or JSON text.
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        size = int(doc["size"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError):
        raise BlockMatrixError("block matrix document needs 'size' and 'entries'") from None
    try:
        b = np.asarray(entries, dtype=float)
    except (TypeError, ValueError):
        raise BlockMatrixError("entries must be a numeric square array") from None
    if b.shape != (size, size):
        raise BlockMatrixError(f"entries shape {b.shape} does not match size {size}")
    return BlockMatrix(b, unassigned=bool(doc.get("unassigned", False)))
