"""Deterministic seed derivation, so parallel work reproduces serial runs."""
from __future__ import annotations

import hashlib

import numpy as np


def _key(x) -> int:
    if isinstance(x, (int, np.integer)):
        return int(x) & 0xFFFFFFFFFFFFFFFF
    h = hashlib.blake2b(str(x).encode(), digest_size=8).digest()
    return int.from_bytes(h, "little")


def derive_seed(master, *keys) -> int:
    """64-bit seed from a master seed and a path of int/str keys."""
    ss = np.random.SeedSequence([_key(master), *(_key(k) for k in keys)])
    return int(ss.generate_state(1, np.uint64)[0])


def derive_rng(master, *keys) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *keys))
