"""Small shared helpers: seeded RNG streams, compensated sums, CSV float format.

All randomness in the package flows through ``child_rng`` so that every
consumer (constraint sampler, utility generator, baseline coin flips,
validators) pulls from an independent, reproducible stream keyed by integers.
"""

from __future__ import annotations

import os

import numpy as np

# Stream ids used with child_rng.  Keeping them in one place guarantees two
# consumers never collide on the same derived stream.
STREAM_CONSTRAINT = 1
STREAM_UTILITY = 2
STREAM_POLICY = 3
STREAM_STRUCTURE = 4
STREAM_VALIDATOR = 5

# Floats are written with 17 significant digits: round-trip exact for IEEE
# binary64, which is what makes rerun traces byte-identical.
FLOAT_FMT = "%.17g"


def child_rng(*keys: int) -> np.random.Generator:
    """Independent generator derived deterministically from integer keys."""
    if not keys:
        raise ValueError("child_rng needs at least one key")
    return np.random.default_rng(np.random.SeedSequence(list(int(k) for k in keys)))


def fmt_float(v: float) -> str:
    return FLOAT_FMT % float(v)


def fmt_vector(x: np.ndarray) -> str:
    """Semicolon-joined float vector, as used in trace CSV cells."""
    return ";".join(FLOAT_FMT % v for v in np.asarray(x, dtype=float))


def parse_vector(cell: str) -> np.ndarray:
    return np.array([float(tok) for tok in cell.split(";")], dtype=float)


def kahan_cumsum(values: np.ndarray) -> np.ndarray:
    """Running sum with Kahan compensation.

    Used for the cumulative trace columns, which must stay stable to ~1e-9
    relative error over horizons up to 1e5 rounds.
    """
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


def worker_count() -> int:
    """Parallel worker cap.  OLFW_THREADS overrides the CPU count."""
    env = os.environ.get("OLFW_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"OLFW_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ValueError("OLFW_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def parallel_map(fn, jobs):
    """Map ``fn`` over ``jobs`` preserving order, using up to worker_count() threads.

    Results are collected positionally, so output order never depends on
    thread scheduling.  With one worker this degrades to a plain loop.
    """
    jobs = list(jobs)
    workers = min(worker_count(), max(1, len(jobs)))
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))
