"""Small shared helpers: worker resolution, seeding, JSON-safe conversion."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DudleyError

ENV_THREADS = "DUDLEY_THREADS"


def resolve_workers(requested: int | None = None) -> int:
    """Worker count, capped by the DUDLEY_THREADS environment variable.

    0 (or unset) means all available cores.  Explicit ``requested`` takes the
    same convention and is additionally capped by the environment.
    """
    raw = os.environ.get(ENV_THREADS, "0")
    try:
        env = int(raw)
    except ValueError as e:
        raise DudleyError(f"{ENV_THREADS} must be an integer, got {raw!r}") from e
    auto = os.cpu_count() or 1
    cap = auto if env <= 0 else env
    if requested is None or requested <= 0:
        return max(1, min(auto, cap))
    return max(1, min(requested, cap))


def subseed(seed: int, *tags: int) -> np.random.SeedSequence:
    """Deterministic seed derivation: one stream per (seed, tag...) tuple."""
    if seed < 0:
        raise DudleyError("seeds must be nonnegative integers")
    return np.random.SeedSequence((int(seed),) + tuple(int(t) for t in tags))


def thread_map(fn, items, workers: int):
    """Apply fn to items, preserving order; threads only when workers > 1."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
