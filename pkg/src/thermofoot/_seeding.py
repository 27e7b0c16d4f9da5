"""Seed derivation.

All randomness descends from one integer root seed. A component seed is the
first 8 bytes of ``sha256("<root>/<label>/<label>...")`` read as a big-endian
unsigned integer, reduced modulo 2**32. The derivation depends only on the
labels, so any single fold, ranking or fit can be rerun on its own.
"""

import hashlib

import numpy as np


def derive_seed(root, *labels):
    key = "/".join([str(int(root))] + [str(label) for label in labels])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2 ** 32)


def as_generator(seed):
    """Accept an int, ``None`` or an existing generator-like object."""
    if seed is None or isinstance(seed, (int, np.integer)):
        return np.random.default_rng(seed)
    return seed
