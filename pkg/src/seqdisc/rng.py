"""Counter-based random streams.

Streams are numpy ``Philox`` generators keyed by ``SeedSequence(seed,
spawn_key=path)``, so any ``(seed, path)`` pair names one reproducible,
independent stream regardless of how many other streams exist.
"""
import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed, *path):
    """Generator for sub-stream ``path`` of ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def split_counts(total, parts):
    """Split ``total`` into ``parts`` near-equal non-negative chunks (larger first)."""
    if parts < 1:
        raise ValueError("parts must be >= 1")
    base, extra = divmod(int(total), int(parts))
    return [base + (1 if i < extra else 0) for i in range(parts)]
