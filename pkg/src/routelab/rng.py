"""Random-number policy.

Every stochastic routine in this package takes an explicit integer seed (or an
already-constructed generator) and builds its randomness from
``numpy.random.default_rng``, i.e. the PCG64 bit generator.  Identical seeds on
the same numpy version reproduce runs bit for bit.

Benchmark trials derive their seeds from a master seed plus string labels via
SHA-256 so that adding a solver or an instance to a study never shifts the
seeds of the existing trials.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["make_rng", "derive_seed"]


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Return a PCG64 generator.

    Passing a generator returns it unchanged so helpers can share one stream.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_seed(*parts: object) -> int:
    """Derive a 64-bit seed from a tuple of labels.

    Parts are joined with ":" and hashed with SHA-256; the first 8 bytes
    (big-endian) become the seed.  Stable across processes and platforms,
    unlike the builtin ``hash``.
    """
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
